"""Minimization of Phi and critical-point search on torus parametrizations.

Every parametrization is linear in the angles: ``angles = M @ params`` with a
fixed integer matrix M, so gradients pull back as ``M.T @ grad``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PhaseVector, as_phase_vector, is_real_symmetric
from .phi import GRADIENT_SIGN, phi_fast, phi_parts

KINDS = ("full_torus", "real_symmetric", "half_symmetric_ac")


@dataclass(frozen=True)
class Parametrization:
    """Free-angle layouts.

    full_torus:        q = (1, q_1, ..., q_{N-1})
    real_symmetric:    N = 2m, q = (1, q_1..q_{m-1}, 1, conj(q_{m-1})..conj(q_1)).
                       For N = 4n the free angles read (a_1..a_{n-1}, b, c_{n-1}..c_1).
    half_symmetric_ac: N = 4n, the real-symmetric layout with c = a;
                       free angles (a_1..a_{n-1}, b).
    """

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown parametrization {self.kind!r}")
        if self.n < 1:
            raise ValueError("N must be positive")
        if self.kind == "real_symmetric" and self.n % 2:
            raise ValueError("real_symmetric layout needs even N")
        if self.kind == "half_symmetric_ac" and self.n % 4:
            raise ValueError("half_symmetric_ac layout needs N divisible by 4")

    @property
    def n_params(self) -> int:
        if self.kind == "full_torus":
            return self.n - 1
        if self.kind == "real_symmetric":
            return self.n // 2 - 1
        return self.n // 4

    @property
    def matrix(self) -> np.ndarray:
        n, k = self.n, self.n_params
        m = np.zeros((n, k))
        if self.kind == "full_torus":
            m[1:, :] = np.eye(k)
        elif self.kind == "real_symmetric":
            for i in range(1, n // 2):
                m[i, i - 1] = 1.0
                m[n - i, i - 1] = -1.0
        else:
            h = n // 4
            # index i in 1..2h-1 of the symmetric half maps to a_i, b or c_{2h-i} = a_{2h-i}
            for i in range(1, 2 * h):
                col = min(i, 2 * h - i) - 1 if i != h else h - 1
                m[i, col] += 1.0
                m[n - i, col] -= 1.0
        return m


def embed(params, kind: str | Parametrization, n: int | None = None) -> PhaseVector:
    par = kind if isinstance(kind, Parametrization) else Parametrization(kind, n)
    p = np.asarray(params, dtype=float).ravel()
    if p.size != par.n_params:
        raise ValueError(f"{par.kind} at N={par.n} takes {par.n_params} parameters, got {p.size}")
    return PhaseVector(par.matrix @ p if p.size else np.zeros(par.n))


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 256
    seed: int = 0
    max_iters: int = 10_000
    step: float = 0.1
    grad_tol: float = 1e-10
    backtrack: float = 0.5

    def __post_init__(self):
        if self.starts < 1 or self.max_iters < 1:
            raise ValueError("starts and max_iters must be positive")
        if self.step <= 0 or self.grad_tol <= 0:
            raise ValueError("step and grad_tol must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class MinResult:
    n: int
    kind: str
    best_value: float
    best_point: PhaseVector
    gap: float
    n_converged: int
    per_start: list = field(default_factory=list)

    def to_json(self, include_starts: bool = False) -> dict:
        out = {
            "n": self.n,
            "kind": self.kind,
            "best_value": self.best_value,
            "gap": self.gap,
            "n_converged": self.n_converged,
            "best_point": self.best_point.to_json(),
        }
        if include_starts:
            out["per_start"] = [float(v) for v in self.per_start]
        return out


@dataclass(frozen=True)
class CriticalPoint:
    q: PhaseVector
    phi_value: float
    parts: np.ndarray
    residual: float

    def to_json(self) -> dict:
        return {
            "q": self.q.to_json(),
            "phi_value": self.phi_value,
            "parts": [[float(z.real), float(z.imag)] for z in self.parts],
            "residual": self.residual,
        }


def start_points(cfg: OptimizerConfig, dim: int) -> np.ndarray:
    """Uniform starting angles from a counter-based (Philox) stream."""
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    return rng.uniform(0.0, 2 * math.pi, size=(cfg.starts, dim))


class _Objective:
    def __init__(self, par: Parametrization):
        self.par = par
        self.m = par.matrix
        self.n = par.n

    def angles(self, x):
        return self.m @ x

    def value(self, x) -> float:
        q = np.exp(1j * (self.m @ x))
        xi = np.fft.fft(q) / self.n
        return float(self.n ** 3 * np.sum(np.abs(xi) ** 4))

    def value_grad(self, x):
        q = np.exp(1j * (self.m @ x))
        xi = np.fft.fft(q) / self.n
        f = float(self.n ** 3 * np.sum(np.abs(xi) ** 4))
        parts = self.n ** 2 * q * np.fft.fft(xi * np.conj(xi) ** 2)
        g = self.m.T @ (GRADIENT_SIGN * 4.0 * parts.imag)
        return f, g

    def grad(self, x):
        return self.value_grad(x)[1]

    def hessian(self, x, h: float = 1e-5) -> np.ndarray:
        k = x.size
        hess = np.empty((k, k))
        for j in range(k):
            e = np.zeros(k)
            e[j] = h
            hess[:, j] = (self.grad(x + e) - self.grad(x - e)) / (2 * h)
        return 0.5 * (hess + hess.T)


def _newton_polish(obj: _Objective, x, tol: float, iters: int = 60, max_step: float = 0.1):
    """Newton iterations on grad = 0 started near a minimum.

    Minima of Phi can be degenerate (quartic in some direction), where Newton
    oscillates while still shrinking the gradient every other step; the best
    iterate that does not raise Phi is kept.
    """
    f0, g = obj.value_grad(x)
    ceiling = f0 + 1e-9 * max(1.0, abs(f0))
    best = (np.linalg.norm(g), x, f0, g)
    for _ in range(iters):
        if best[0] < tol:
            break
        step = -np.linalg.lstsq(obj.hessian(x), g, rcond=1e-10)[0]
        size = np.max(np.abs(step)) if step.size else 0.0
        if size > max_step:
            step *= max_step / size
        x = x + step
        f, g = obj.value_grad(x)
        if f > ceiling + 1e-6 * max(1.0, abs(f0)):
            break
        gn = np.linalg.norm(g)
        if gn < best[0] and f <= ceiling:
            best = (gn, x, f, g)
    _, x, f, g = best
    return x, f, g


def _descend(obj: _Objective, x, f, g, cfg: OptimizerConfig, switch: float, iters: int):
    """Armijo gradient descent with Barzilai-Borwein trial steps until |grad| < switch."""
    t = cfg.step
    used = 0
    while used < iters:
        gg = float(g @ g)
        if math.sqrt(gg) < switch:
            break
        used += 1
        accepted = False
        for _ in range(60):
            xn = x - t * g
            fn = obj.value(xn)
            if fn <= f - 1e-4 * t * gg:
                accepted = True
                break
            t *= cfg.backtrack
        if not accepted:
            break
        fn, gnew = obj.value_grad(xn)
        s, y = xn - x, gnew - g
        sy = float(s @ y)
        x, f, g = xn, fn, gnew
        t = float(s @ s) / sy if sy > 1e-300 else cfg.step
        t = min(max(t, 1e-8), 10.0)
    return x, f, g, used


def local_minimize(obj: _Objective, x0, cfg: OptimizerConfig):
    """Gradient descent to a basin, then Newton polish; returns (x, value, |grad|)."""
    x = np.array(x0, dtype=float)
    f, g = obj.value_grad(x)
    scale = float(obj.n ** 2)
    budget = cfg.max_iters
    for switch in (1e-3 * scale, 1e-6 * scale, 1e-9 * scale):
        x, f, g, used = _descend(obj, x, f, g, cfg, switch, budget)
        budget -= used
        x, f, g = _newton_polish(obj, x, cfg.grad_tol)
        if np.linalg.norm(g) < cfg.grad_tol or budget <= 0:
            break
    return x, f, float(np.linalg.norm(g))


def minimize_phi(n: int, kind: str = "real_symmetric",
                 cfg: OptimizerConfig | None = None, keep_starts: bool = False) -> MinResult:
    """Multistart minimization of Phi over a parametrized slice of the torus."""
    cfg = cfg or OptimizerConfig()
    if n < 2:
        raise ValueError("minimize_phi needs N >= 2")
    par = Parametrization(kind, n)
    obj = _Objective(par)
    if par.n_params == 0:
        pv = embed([], par)
        v = phi_fast(pv)
        return MinResult(n, kind, v, pv, v - n * n, 1, [v] if keep_starts else [])
    best = None
    values = []
    n_conv = 0
    fallback = None
    for x0 in start_points(cfg, par.n_params):
        x, f, gn = local_minimize(obj, x0, cfg)
        values.append(f)
        if fallback is None or f < fallback[0]:
            fallback = (f, x)
        if gn < cfg.grad_tol:
            n_conv += 1
            if best is None or f < best[0]:
                best = (f, x)
    f, x = best if best is not None else fallback
    pv = PhaseVector(obj.angles(x))
    return MinResult(n, kind, f, pv, f - n * n, n_conv, values if keep_starts else [])


# --- closed forms and named points ---

def n8_closed_form(alpha: float, beta: float, gamma: float) -> float:
    """Phi at N=8 on q = (1, a, b, c, 1, conj c, conj b, conj a)."""
    c = math.cos
    a, b, g = alpha, beta, gamma
    return (170 + 2 * c(4 * b) + 12 * c(2 * a + 2 * g)
            + 8 * c(a - 3 * g) + 8 * c(3 * a - g)
            + 48 * c(a + g) + 48 * c(a - b - g) + 48 * c(a + b - g)
            + 24 * c(2 * b) + 24 * c(a - 2 * b + g) + 24 * c(a + 2 * b + g)
            + 24 * c(2 * a - b) + 24 * c(2 * a + b) + 24 * c(b - 2 * g) + 24 * c(b + 2 * g))


def n8_xy_form(x: float, y: float) -> tuple[float, float]:
    """Phi at N=8 with a = c, in x = a^2 + conj(a)^2 and y = b + conj(b).

    Returns (phi, square_term) and checks the completed-square rewriting.
    """
    phi = 6 * x * x + 4 * x * (3 * y * y + 6 * y + 2) + (y ** 4 + 8 * y * y + 48 * y + 136)
    square = 3 * x + 3 * y * y + 6 * y + 2
    rest = -15 * y ** 4 - 72 * y ** 3 - 72 * y * y + 96 * y + 400
    alt = (2 * square * square + rest) / 3
    if abs(alt - phi) > 1e-10 * max(1.0, abs(phi)):
        raise ArithmeticError(f"square completion mismatch: {phi} vs {alt}")
    return phi, square


_ACOS = math.acos(1 / math.sqrt(3))

NAMED_MINIMA = {
    "N4": (4, [math.pi / 2], 16.0),
    "N8": (8, [-_ACOS, math.pi, -_ACOS], 256.0 / 3.0),
    "N12": (12, [math.pi / 4, -2 * math.pi / 3, -math.pi / 4, -2 * math.pi / 3, math.pi / 4], 162.0),
}


def named_minimum_point(which: str) -> PhaseVector:
    n, params, _ = NAMED_MINIMA[which]
    return embed(params, "real_symmetric", n)


def verify_named_minima(which: str) -> float:
    """Phi at the published minimizer for N = 4, 8 or 12."""
    if which not in NAMED_MINIMA:
        raise KeyError(f"unknown minimum {which!r}; choose from {sorted(NAMED_MINIMA)}")
    return phi_fast(named_minimum_point(which))


# --- critical points ---

def residual(q) -> float:
    return float(np.max(np.abs(phi_parts(q).imag)))


def _circ_dist(a, b) -> float:
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, 2 * math.pi) - math.pi
    return float(np.max(np.abs(d))) if d.size else 0.0


def _newton_root(obj: _Objective, x0, tol: float, max_iters: int, step: float):
    """Damped Newton on grad = 0 with a gradient-step fallback on the merit |grad|^2."""
    x = np.array(x0, dtype=float)
    g = obj.grad(x)
    gn = np.linalg.norm(g)
    for _ in range(max_iters):
        if gn < tol:
            break
        hess = obj.hessian(x)
        direction = -np.linalg.lstsq(hess, g, rcond=1e-10)[0]
        t = 1.0
        moved = False
        for _ in range(25):
            xn = x + t * direction
            gnew = obj.grad(xn)
            if np.linalg.norm(gnew) < gn:
                moved = True
                break
            t *= 0.5
        if not moved:
            # descend the merit 0.5 |grad|^2 instead
            mg = hess.T @ g
            t = step
            for _ in range(40):
                xn = x - t * mg
                gnew = obj.grad(xn)
                if np.linalg.norm(gnew) < gn:
                    moved = True
                    break
                t *= 0.5
        if not moved:
            break
        x, g, gn = xn, gnew, np.linalg.norm(gnew)
    return x, gn


def find_critical_points(n: int, kind: str = "full_torus", cfg: OptimizerConfig | None = None,
                         residual_tol: float = 1e-10, dedup_tol: float = 1e-6,
                         max_newton: int = 200) -> list[CriticalPoint]:
    """Multistart root finding for the critical points of Phi, normalized to q_0 = 1.

    Points are deduplicated by angle distance only; ``orbit_representatives``
    further reduces a list modulo the symmetry group.
    """
    cfg = cfg or OptimizerConfig()
    if n < 2:
        raise ValueError("find_critical_points needs N >= 2")
    if kind == "half_symmetric_ac":
        raise ValueError("critical points of Phi are searched on full_torus or real_symmetric")
    par = Parametrization(kind, n)
    obj = _Objective(par)
    found: list[np.ndarray] = []
    out: list[CriticalPoint] = []
    starts = start_points(cfg, par.n_params) if par.n_params else np.zeros((1, 0))
    for x0 in starts:
        x, _ = _newton_root(obj, x0, cfg.grad_tol, max_newton, cfg.step)
        angles = np.mod(obj.angles(x), 2 * math.pi)
        pv = PhaseVector(angles)
        parts = phi_parts(pv)
        res = float(np.max(np.abs(parts.imag)))
        if res >= residual_tol:
            continue
        if any(_circ_dist(angles, other) < dedup_tol for other in found):
            continue
        found.append(angles)
        out.append(CriticalPoint(pv, phi_fast(pv), parts, res))
    out.sort(key=lambda cp: (round(cp.phi_value, 8), tuple(np.round(cp.q.angles, 8))))
    return out


def canonical_orbit_form(q, decimals: int = 7) -> tuple:
    """Lexicographically least angle vector over global phase, rotation and q -> q~."""
    pv = as_phase_vector(q)
    a = pv.angles
    n = pv.n
    i = np.arange(n)
    best = None
    for r in range(n):
        rot = np.roll(a, -r)
        for t in range(n):
            cand = rot + 2 * math.pi * t * i / n
            cand = np.mod(cand - cand[0], 2 * math.pi)
            key = np.round(cand, decimals)
            key[key >= round(2 * math.pi, decimals)] = 0.0
            key = tuple(key.tolist())
            if best is None or key < best:
                best = key
    return best


def orbit_representatives(points: list[CriticalPoint]) -> list[CriticalPoint]:
    seen = {}
    for cp in points:
        seen.setdefault(canonical_orbit_form(cp.q), cp)
    return list(seen.values())


def parity_conjecture_check(cp: CriticalPoint, tol: float = 1e-6) -> bool:
    """Re(Phi_i) constant over even i and constant over odd i."""
    if cp.residual >= 1e-8:
        raise ValueError("parity check needs a critical point (residual < 1e-8)")
    re = cp.parts.real
    even, odd = re[0::2], re[1::2]
    ok_even = even.size == 0 or float(even.max() - even.min()) <= tol
    ok_odd = odd.size == 0 or float(odd.max() - odd.min()) <= tol
    return bool(ok_even and ok_odd)


def parity_evidence(ns, cfg: OptimizerConfig | None = None, kind: str = "full_torus") -> list[dict]:
    rows = []
    for n in ns:
        for idx, cp in enumerate(find_critical_points(n, kind, cfg)):
            rows.append({"N": n, "index": idx, "phi": cp.phi_value,
                         "residual": cp.residual, "real_symmetric": is_real_symmetric(cp.q, 1e-7),
                         "parity_holds": parity_conjecture_check(cp)})
    return rows


def ac_restriction_compare(n: int, cfg: OptimizerConfig | None = None) -> tuple[float, float]:
    """(min over real_symmetric, min over the a = c slice)."""
    if n % 4:
        raise ValueError("a = c comparison needs N divisible by 4")
    full = minimize_phi(n, "real_symmetric", cfg).best_value
    ac = minimize_phi(n, "half_symmetric_ac", cfg).best_value
    return full, ac


def gap_scan(n_max: int, cfg: OptimizerConfig | None = None) -> list[dict]:
    """min Phi - N^2 on the real-symmetric locus for even N = 2..n_max."""
    if n_max < 4:
        raise ValueError("gap_scan needs n_max >= 4")
    rows = []
    for n in range(2, n_max + 1, 2):
        res = minimize_phi(n, "real_symmetric", cfg)
        rows.append({"N": n, "min_phi": res.best_value, "gap": res.gap,
                     "converged_starts": res.n_converged})
    return rows


def gap_scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "min_phi", "gap", "converged_starts"])
    for r in rows:
        w.writerow([r["N"], repr(float(r["min_phi"])), repr(float(r["gap"])), r["converged_starts"]])
    return buf.getvalue()
