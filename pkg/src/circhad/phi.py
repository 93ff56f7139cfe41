"""The functional Phi(q) = sum_{i+k=j+l} q_i q_k / (q_j q_l) and its relatives.

All index arithmetic is modulo N. Two routes are kept apart on purpose:
``phi_naive`` sums the N^3 terms directly, ``phi_fast`` goes through the first
row xi of F Q F^* and uses Phi = N^3 sum_s |xi_s|^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PhaseVector, as_phase_vector, first_row, is_real_symmetric

# d Phi / d alpha_i = GRADIENT_SIGN * 4 * Im(Phi_i), fixed against finite differences.
GRADIENT_SIGN = -1.0


@dataclass(frozen=True)
class PhiReport:
    total: float
    parts: np.ndarray
    gradient: np.ndarray
    lower_bound_gap: float

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "parts": [[float(z.real), float(z.imag)] for z in self.parts],
            "gradient": [float(g) for g in self.gradient],
            "lower_bound_gap": self.lower_bound_gap,
        }


@dataclass(frozen=True)
class PsiReport:
    total: float
    parts: np.ndarray
    theta: np.ndarray
    degenerate: tuple = ()

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "parts": [[float(z.real), float(z.imag)] for z in self.parts],
            "theta": [float(t) for t in self.theta],
            "degenerate": list(self.degenerate),
        }


def _q(q) -> np.ndarray:
    return as_phase_vector(q).q


def phi_naive_complex(q) -> complex:
    """Direct O(N^3) sum, accumulated in ascending (i, k, j) order."""
    z = _q(q)
    n = z.size
    zc = np.conj(z)
    idx = np.arange(n)
    total = 0j
    for i in range(n):
        # rows: k, cols: j; l = i + k - j
        l = (i + idx[:, None] - idx[None, :]) % n
        total += np.sum(z[i] * z[:, None] * zc[None, :] * zc[l])
    return complex(total)


def phi_naive(q) -> float:
    val = phi_naive_complex(q)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"Phi accumulated an imaginary residue {val.imag:.3g}")
    return val.real


def phi_fast(q) -> float:
    z = _q(q)
    n = z.size
    xi = np.fft.fft(z) / n
    return float(n ** 3 * np.sum(np.abs(xi) ** 4))


def phi_batch(angles: np.ndarray) -> np.ndarray:
    """phi_fast over the rows of a (batch, N) array of angles."""
    angles = np.atleast_2d(angles)
    n = angles.shape[1]
    xi = np.fft.fft(np.exp(1j * angles), axis=1) / n
    return n ** 3 * np.sum(np.abs(xi) ** 4, axis=1)


def phi_parts(q) -> np.ndarray:
    """Phi_i = sum over k and j + l = i + k of q_i q_k / (q_j q_l)."""
    z = _q(q)
    n = z.size
    xi = np.fft.fft(z) / n
    return n ** 2 * z * np.fft.fft(xi * np.conj(xi) ** 2)


def phi_parts_naive(q) -> np.ndarray:
    z = _q(q)
    n = z.size
    zc = np.conj(z)
    idx = np.arange(n)
    out = np.empty(n, dtype=complex)
    for i in range(n):
        l = (i + idx[:, None] - idx[None, :]) % n
        out[i] = np.sum(z[i] * z[:, None] * zc[None, :] * zc[l])
    return out


def phi_gradient(q) -> np.ndarray:
    """Gradient of Phi with respect to the angles alpha_i."""
    return GRADIENT_SIGN * 4.0 * phi_parts(q).imag


def phi_decompose(q) -> PhiReport:
    pv = as_phase_vector(q)
    parts = phi_parts(pv)
    total = phi_fast(pv)
    n = pv.n
    return PhiReport(
        total=total,
        parts=parts,
        gradient=GRADIENT_SIGN * 4.0 * parts.imag,
        lower_bound_gap=total - n * n,
    )


def spread_term(q) -> float:
    """sum over unordered pairs i < j of (|nu_i|^2 - |nu_j|^2)^2, with nu = F q."""
    z = _q(q)
    m = np.abs(np.fft.ifft(z, norm="ortho")) ** 2
    diff = m[:, None] - m[None, :]
    return float(np.sum(np.triu(diff ** 2, k=1)))


def spread_identity(q) -> tuple[float, float]:
    """(Phi, N^2 + spread_term); the two agree for every q on the torus."""
    pv = as_phase_vector(q)
    return phi_fast(pv), float(pv.n ** 2) + spread_term(pv)


def phi_real_form(q, tol: float = 1e-9) -> float:
    """sum_{i+j+k+l=0} q_i q_j q_k q_l, valid on the real-symmetric locus."""
    pv = as_phase_vector(q)
    if not is_real_symmetric(pv, tol):
        raise ValueError("phi_real_form needs conj(q_i) == q_{-i}")
    z = pv.q
    n = z.size
    idx = np.arange(n)
    total = 0j
    for i in range(n):
        l = (-i - idx[:, None] - idx[None, :]) % n
        total += np.sum(z[i] * z[:, None] * z[None, :] * z[l])
    return float(total.real)


def twisted(q) -> PhaseVector:
    """q~_i = w^i q_i."""
    pv = as_phase_vector(q)
    return PhaseVector(pv.angles + 2 * math.pi * np.arange(pv.n) / pv.n)


def symmetry_quadruple(q) -> tuple[float, float, float, float]:
    """Phi at q, -q, q~ and -q~."""
    pv = as_phase_vector(q)
    t = twisted(pv)
    neg = lambda p: PhaseVector(p.angles + math.pi)
    return (phi_fast(pv), phi_fast(neg(pv)), phi_fast(t), phi_fast(neg(t)))


def psi_report(q, zero_tol: float = 1e-14) -> PsiReport:
    """Psi = (1/sqrt N) ||F Q F^*||_1 with its per-index parts Psi_k.

    theta_s = arg(xi_s); where xi_s vanishes theta_s is set to 0 and s is
    listed in ``degenerate``.
    """
    pv = as_phase_vector(q)
    z = pv.q
    n = z.size
    xi = first_row(pv)
    mod = np.abs(xi)
    degenerate = tuple(int(s) for s in np.nonzero(mod <= zero_tol)[0])
    theta = np.where(mod > zero_tol, np.angle(xi), 0.0)
    parts = z * np.fft.fft(np.exp(-1j * theta)) / math.sqrt(n)
    total = float(math.sqrt(n) * np.sum(mod))
    return PsiReport(total=total, parts=parts, theta=theta, degenerate=degenerate)


def p_norm(q, p: float) -> float:
    """Entrywise p-norm of the circulant unitary F Q F^*."""
    if p < 1:
        raise ValueError("p-norm needs p >= 1")
    pv = as_phase_vector(q)
    mod = np.abs(first_row(pv))
    if math.isinf(p):
        return float(mod.max())
    return float((pv.n * np.sum(mod ** p)) ** (1.0 / p))


def enveloping_sum(q) -> float:
    """|sum_i q_i|^4."""
    return float(abs(np.sum(_q(q))) ** 4)


def enveloping_report(q, real_case: bool = False, tol: float = 1e-9) -> float:
    """Enveloping sum; with real_case the input must be (1, q_1..q_{m-1}, 1, conj...)
    and the value is cross-checked against |2 + X + conj X|^4."""
    pv = as_phase_vector(q)
    val = enveloping_sum(pv)
    if real_case:
        z = pv.q
        n = z.size
        if n % 2 or n < 2:
            raise ValueError("real case needs even N")
        m = n // 2
        if abs(z[0] - 1) > tol or abs(z[m] - 1) > tol or not is_real_symmetric(pv, tol):
            raise ValueError("real case needs q = (1, q_1..q_{m-1}, 1, conj(q_{m-1})..conj(q_1))")
        x = np.sum(z[1:m])
        alt = abs(2 + x + np.conj(x)) ** 4
        if abs(alt - val) > 1e-9 * max(1.0, val):
            raise ArithmeticError(f"real-case identity failed: {val} vs {alt}")
    return val
