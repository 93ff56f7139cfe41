"""Moments of Phi and of the enveloping sum |sum q_i|^4 over the torus.

Exact values come from set-partition counting or from meet-in-the-middle
index counts; the real-symmetric ensemble only has Monte Carlo estimates.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .butson import BudgetExceeded
from .optimize import Parametrization
from .phi import phi_batch

PARTITION_CAP = 14
DEFAULT_STEP_BUDGET = 10 ** 9


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..n} into blocks, listed by smallest element."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        seen = sorted(x for b in blocks for x in b)
        if seen != list(range(1, self.n + 1)) or any(len(b) == 0 for b in blocks):
            raise ValueError("blocks must be nonempty, disjoint and cover {1..n}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @property
    def block_sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _check_cap(n: int):
    if n < 1:
        raise ValueError("ground set must be nonempty")
    if n > PARTITION_CAP:
        raise ValueError(f"partitions of {n} elements exceed the cap {PARTITION_CAP} "
                         f"(Bell({n}) = {bell(n)})")


def set_partitions(n: int):
    """Stream all set partitions of {1..n} via restricted growth strings."""
    _check_cap(n)
    a = [0] * n
    m = [0] * n  # m[i] = max(a[0..i-1])
    while True:
        k = max(a) + 1
        blocks = [[] for _ in range(k)]
        for i, b in enumerate(a):
            blocks[b].append(i + 1)
        yield SetPartition(n, tuple(tuple(b) for b in blocks))
        # odometer on the growth string
        i = n - 1
        while i > 0 and a[i] > m[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = max(m[j - 1], a[j - 1])


def falling_factorial(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1), zero when k > n."""
    if k > n:
        return 0
    return math.perm(n, k)


def multinomial(sizes) -> int:
    out = math.factorial(sum(sizes))
    for b in sizes:
        out //= math.factorial(b)
    return out


def _integer_partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for b in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - b, b):
            yield (b,) + rest


def _type_count(sizes) -> int:
    """Number of set partitions of {1..sum} with the given block sizes."""
    out = multinomial(sizes)
    for b in set(sizes):
        out //= math.factorial(sizes.count(b))
    return out


@lru_cache(maxsize=None)
def c_coefficients(p: int) -> tuple:
    """C[k] = sum over partitions of {1..p} with k blocks of the multinomial p!/prod b_i!.

    Grouped by block type, which gives the same sum as streaming set_partitions.
    Index 0 is unused (always 0).
    """
    _check_cap(p)
    c = [0] * (p + 1)
    for sizes in _integer_partitions(p):
        c[len(sizes)] += _type_count(list(sizes)) * multinomial(sizes)
    return tuple(c)


def c_coefficients_streamed(p: int) -> tuple:
    c = [0] * (p + 1)
    for pi in set_partitions(p):
        c[len(pi)] += multinomial(pi.block_sizes)
    return tuple(c)


def c_table_csv(p_max: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "k", "C"])
    for p in range(1, p_max + 1):
        c = c_coefficients(p)
        for k in range(1, p + 1):
            w.writerow([p, k, c[k]])
    return buf.getvalue()


def half_moment_exact(n: int, p: int) -> int:
    """Integral of |sum q_i|^(2p) over T^N."""
    if n < 1 or p < 1:
        raise ValueError("need N >= 1 and p >= 1")
    c = c_coefficients(p)
    return sum(c[k] * falling_factorial(n, k) for k in range(1, p + 1))


def enveloping_moment_exact(n: int, p: int) -> int:
    """Integral of |sum q_i|^(4p) over T^N: pairs of 2p-tuples with equal multisets."""
    if n < 1 or p < 1:
        raise ValueError("need N >= 1 and p >= 1")
    _check_cap(2 * p)
    total = 0
    for sizes in _integer_partitions(2 * p):
        total += _type_count(list(sizes)) * multinomial(sizes) * falling_factorial(n, len(sizes))
    return total


def _all_tuples(n: int, length: int) -> np.ndarray:
    return np.indices((n,) * length).reshape(length, -1).T


def _check_steps(steps: int, budget: int, what: str):
    if steps > budget:
        raise BudgetExceeded(what, steps, budget)


def _squared_class_count(keys: np.ndarray) -> int:
    _, counts = np.unique(keys, axis=0, return_counts=True)
    return int(sum(int(c) * int(c) for c in counts))


def enveloping_moment_bruteforce(n: int, p: int, budget: int = DEFAULT_STEP_BUDGET) -> int:
    """Count pairs of 2p-tuples over Z_N with equal multisets: sum over multisets of count^2."""
    _check_steps(n ** (2 * p), budget, f"enveloping brute force (N={n}, p={p})")
    t = _all_tuples(n, 2 * p)
    return _squared_class_count(np.sort(t, axis=1))


def phi_moment_bruteforce(n: int, p: int, budget: int = DEFAULT_STEP_BUDGET) -> int:
    """Integral of Phi^p over T^N as an index count.

    Counts (i_s, k_s, j_s, l_s), s = 1..p, with i_s + k_s = j_s + l_s mod N and
    equal multisets [i k] = [j l]. Both sides are keyed by (block sums, sorted
    multiset), so the count is the sum of squared class sizes over N^(2p) tuples.
    """
    if n < 1 or p < 1:
        raise ValueError("need N >= 1 and p >= 1")
    _check_steps(n ** (2 * p), budget, f"Phi moment brute force (N={n}, p={p})")
    t = _all_tuples(n, 2 * p)
    sums = (t[:, 0::2] + t[:, 1::2]) % n
    keys = np.concatenate([sums, np.sort(t, axis=1)], axis=1)
    return _squared_class_count(keys)


def lattice_loop_oracle(n: int, p: int, balanced: bool = False,
                        budget: int = DEFAULT_STEP_BUDGET) -> int:
    """Walks of length 4p on Z^N from the origin back to it, signs (+ + - -)^p.

    Step t moves along axis a_t; with ``balanced`` every 4-block (i, k, j, l)
    must also satisfy i + k = j + l mod N.
    """
    if n < 1 or p < 1:
        raise ValueError("need N >= 1 and p >= 1")
    _check_steps(n ** (4 * p), budget, f"lattice loops (N={n}, p={p})")
    length = 4 * p
    signs = [1, 1, -1, -1] * p
    pos = [0] * n

    def walk(t: int, dist: int, block: list) -> int:
        if dist > length - t:
            return 0
        if t == length:
            return 1
        sgn = signs[t]
        total = 0
        for a in range(n):
            if balanced and t % 4 == 3 and (block[0] + block[1] - block[2] - a) % n:
                continue
            before = abs(pos[a])
            pos[a] += sgn
            total += walk(t + 1, dist - before + abs(pos[a]),
                          block + [a] if t % 4 < 3 else [])
            pos[a] -= sgn
        return total

    return walk(0, 0, [])


@dataclass(frozen=True)
class MomentReport:
    n: int
    p: int
    value: object
    method: str
    stderr: float | None = None
    ensemble: str | None = None
    samples: int | None = None

    def __post_init__(self):
        if self.method not in ("closed_form", "brute_force", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")

    def to_json(self) -> dict:
        out = {"N": self.n, "p": self.p, "method": self.method,
               "value": self.value if isinstance(self.value, int) else float(self.value)}
        if self.method == "monte_carlo":
            out.update(stderr=self.stderr, ensemble=self.ensemble, samples=self.samples)
        return out


ENSEMBLES = ("complex_torus", "real_symmetric")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_angles(n: int, samples: int, seed: int, ensemble: str = "complex_torus") -> np.ndarray:
    """(samples, N) angles; the real ensemble draws the free angles of the symmetric layout."""
    rng = _rng(seed)
    if ensemble == "complex_torus":
        return rng.uniform(0.0, 2 * math.pi, size=(samples, n))
    if ensemble == "real_symmetric":
        par = Parametrization("real_symmetric", n)
        free = rng.uniform(0.0, 2 * math.pi, size=(samples, par.n_params))
        return free @ par.matrix.T
    raise ValueError(f"unknown ensemble {ensemble!r}; choose from {ENSEMBLES}")


def phi_samples(n: int, samples: int, seed: int, ensemble: str = "complex_torus",
                batch: int = 1 << 16) -> np.ndarray:
    angles = sample_angles(n, samples, seed, ensemble)
    return np.concatenate([phi_batch(angles[i:i + batch]) for i in range(0, samples, batch)])


def phi_moment_montecarlo(n: int, p: int, samples: int, seed: int = 0,
                          ensemble: str = "complex_torus") -> MomentReport:
    if samples < 1000:
        raise ValueError("Monte Carlo needs at least 1000 samples")
    if p < 1:
        raise ValueError("p must be >= 1")
    vals = phi_samples(n, samples, seed, ensemble) ** p
    return MomentReport(n, p, float(vals.mean()), "monte_carlo",
                        stderr=float(vals.std(ddof=1) / math.sqrt(samples)),
                        ensemble=ensemble, samples=samples)


def moment_report(n: int, p: int, method: str = "closed_form", **kw) -> MomentReport:
    """Phi moment for brute_force / monte_carlo; enveloping moment for closed_form."""
    if method == "closed_form":
        return MomentReport(n, p, enveloping_moment_exact(n, p), method)
    if method == "brute_force":
        return MomentReport(n, p, phi_moment_bruteforce(n, p, **kw), method)
    if method == "monte_carlo":
        return phi_moment_montecarlo(n, p, **kw)
    raise ValueError(f"unknown method {method!r}")


def pnorm_min_estimate(n: int, p_list, samples: int, seed: int = 0) -> list[dict]:
    """N^3 - (mean (N^3 - Phi)^p)^(1/p) for each p, on one fixed sample set.

    A final row with p = "inf" holds the smallest sampled Phi.
    """
    ps = list(p_list)
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValueError("p_list must be strictly ascending")
    if any(p < 1 for p in ps):
        raise ValueError("p must be >= 1")
    top = float(n) ** 3
    gap = np.clip(top - phi_samples(n, samples, seed), 0.0, None)
    with np.errstate(divide="ignore"):
        logs = np.log(gap)
    lmax = logs.max()
    rows = []
    for p in ps:
        # log of the power mean, shifted by the max for stability
        s = np.sum(np.exp(p * (logs - lmax)))
        log_mean = lmax + (math.log(s) - math.log(samples)) / p
        rows.append({"p": p, "estimate": top - math.exp(log_mean)})
    rows.append({"p": "inf", "estimate": top - math.exp(lmax)})
    return rows
