"""Circulant Butson matrices: exact vanishing tests, obstructions and enumeration.

A first row w^{r_0}, ..., w^{r_{N-1}} with w = exp(2 pi i / l) is stored by its
exponent vector r. Every vanishing test reduces an integer polynomial modulo
the l-th cyclotomic polynomial, so no floating point enters a verdict.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import circulant_det_modulus

DEFAULT_BUDGET = 10 ** 8
_CHUNK = 1 << 18


class BudgetExceeded(RuntimeError):
    """A search would need more candidates than its budget allows."""

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what} needs {required} candidates, budget is {budget}")
        self.required = required
        self.budget = budget


# --- integer polynomials and cyclotomic reduction ---

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial; coefficients low -> high."""
    rem = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(rem) - 1 < dd:
        return [0], rem
    quo = [0] * (len(rem) - dd)
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if c:
            quo[k - dd] = c
            for i in range(dd + 1):
                rem[k - dd + i] -= c * den[i]
    return quo, rem[:dd] if dd else [0]


@lru_cache(maxsize=None)
def cyclotomic_poly(l: int) -> tuple[int, ...]:
    """Coefficients (low -> high) of the l-th cyclotomic polynomial.

    x^l - 1 divided by every Phi_d with d | l, d < l.
    """
    if l < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (l - 1) + [1]
    for d in range(1, l):
        if l % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic_poly(d)))
            if any(rem):
                raise ArithmeticError(f"Phi_{d} does not divide x^{l} - 1 exactly")
    return tuple(num)


@lru_cache(maxsize=None)
def reduction_matrix(l: int) -> np.ndarray:
    """Row e holds the coefficients of x^e mod Phi_l; a count vector c vanishes iff c @ M == 0."""
    phi = list(cyclotomic_poly(l))
    deg = len(phi) - 1
    rows = []
    for e in range(l):
        mono = [0] * e + [1]
        _, rem = _poly_divmod(mono, phi)
        rem = list(rem) + [0] * (deg - len(rem))
        rows.append(rem[:deg])
    m = np.array(rows, dtype=np.int64)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class CyclotomicCounts:
    """counts[e] = multiplicity of w^e in a sum of l-th roots of unity."""

    l: int
    counts: tuple

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("order must be positive")
        c = tuple(int(x) for x in self.counts)
        if len(c) != self.l:
            raise ValueError(f"expected {self.l} counts, got {len(c)}")
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_exponents(cls, l: int, exponents) -> "CyclotomicCounts":
        c = [0] * l
        for e in exponents:
            c[e % l] += 1
        return cls(l, c)


def cyclotomic_is_vanishing(c: CyclotomicCounts) -> bool:
    """Exact test of sum_e counts[e] w^e == 0."""
    _, rem = _poly_divmod(list(c.counts), list(cyclotomic_poly(c.l)))
    return not any(rem)


# --- rows ---

@dataclass(frozen=True)
class ButsonRow:
    l: int
    exponents: tuple

    def __post_init__(self):
        if self.l < 2:
            raise ValueError("root order must be at least 2")
        e = tuple(int(x) % self.l for x in self.exponents)
        if not e:
            raise ValueError("row must be nonempty")
        object.__setattr__(self, "exponents", e)

    @property
    def n(self) -> int:
        return len(self.exponents)

    def values(self) -> np.ndarray:
        return np.exp(2j * math.pi * np.array(self.exponents) / self.l)

    def rotated(self, k: int) -> "ButsonRow":
        e = self.exponents
        k %= len(e)
        return ButsonRow(self.l, e[k:] + e[:k])

    def shifted(self, t: int) -> "ButsonRow":
        return ButsonRow(self.l, tuple(x + t for x in self.exponents))

    def canonical(self) -> "ButsonRow":
        """Least exponent vector over rotations and global shifts r -> r + t."""
        e = self.exponents
        n = len(e)
        best = min(tuple((e[(i + k) % n] - e[k]) % self.l for i in range(n)) for k in range(n))
        return ButsonRow(self.l, best)

    def is_canonical(self) -> bool:
        return self.canonical().exponents == self.exponents

    def census(self) -> tuple:
        """a_e = number of entries equal to w^e."""
        return CyclotomicCounts.from_exponents(self.l, self.exponents).counts

    def to_json(self) -> dict:
        return {"l": self.l, "exponents": list(self.exponents)}


def row_is_butson_hadamard(r: ButsonRow) -> bool:
    """Every autocorrelation sum_j w^{r_j - r_{j+s}}, s != 0, vanishes exactly."""
    e = r.exponents
    n = len(e)
    for s in range(1, n // 2 + 1):
        diffs = [e[j] - e[(j + s) % n] for j in range(n)]
        if not cyclotomic_is_vanishing(CyclotomicCounts.from_exponents(r.l, diffs)):
            return False
    return True


def det_modulus_check(r: ButsonRow, rel_tol: float = 1e-6) -> float:
    """|det H| through the circulant eigenvalues; must equal N^{N/2}."""
    n = r.n
    val = circulant_det_modulus(r.values())
    expected = n ** (n / 2)
    if abs(val - expected) > rel_tol * expected:
        raise ArithmeticError(f"|det| = {val}, expected N^(N/2) = {expected}")
    return val


# --- obstructions ---

def prime_factors(l: int) -> list[int]:
    out, p, m = [], 2, l
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def lam_leung_admissible(n: int, l: int) -> bool:
    """N is a nonnegative integer combination of the primes dividing l."""
    if n < 1 or l < 2:
        raise ValueError("need N >= 1 and l >= 2")
    ps = prime_factors(l)
    reach = [True] + [False] * n
    for k in range(1, n + 1):
        reach[k] = any(k >= p and reach[k - p] for p in ps)
    return reach[n]


def compositions(n: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to n (stars and bars)."""
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield tuple(out)


def n_compositions(n: int, parts: int) -> int:
    return math.comb(n + parts - 1, parts - 1)


def autocorrelations(a) -> list[int]:
    """A_k = sum_i a_i a_{i+k}, indices mod len(a)."""
    l = len(a)
    return [sum(a[i] * a[(i + k) % l] for i in range(l)) for k in range(l)]


def turyn_holds(a, n: int) -> bool:
    """sum_k w^k A_k == N for the census a (exact)."""
    l = len(a)
    acs = autocorrelations(a)
    acs[0] -= n
    _, rem = _poly_divmod(acs, list(cyclotomic_poly(l)))
    return not any(rem)


def turyn_holds_prime(a, n: int) -> bool:
    """Prime l form: sum_i (a_i - a_{i+k})^2 == 2N for every k != 0."""
    l = len(a)
    return all(sum((a[i] - a[(i + k) % l]) ** 2 for i in range(l)) == 2 * n
               for k in range(1, l))


def turyn_witness(n: int, l: int, budget: int = DEFAULT_BUDGET):
    """First census (a_0..a_{l-1}) summing to N that satisfies the Turyn identity, or None."""
    need = n_compositions(n, l)
    if need > budget:
        raise BudgetExceeded(f"Turyn search at (N={n}, l={l})", need, budget)
    test = turyn_holds_prime if len(prime_factors(l)) == 1 and prime_factors(l)[0] == l else turyn_holds
    for a in compositions(n, l):
        if test(a, n):
            return a
    return None


def turyn_admissible(n: int, l: int, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff some census passes the Turyn identity; BudgetExceeded when inconclusive."""
    return turyn_witness(n, l, budget) is not None


def _groupable(values: tuple) -> bool:
    """Can the 9 squares be split into 3 triples x^2, y^2, z^2 with x + y + z = 0?"""
    roots = [math.isqrt(v) for v in values]

    def zero_triple(t):
        return any(sum(s * r for s, r in zip(signs, t)) == 0
                   for signs in itertools.product((1, -1), repeat=3))

    idx = list(range(9))
    for first in itertools.combinations(idx, 3):
        if 0 not in first:
            continue
        rest = [i for i in idx if i not in first]
        for second in itertools.combinations(rest, 3):
            if rest[0] not in second:
                continue
            third = [i for i in rest if i not in second]
            if all(zero_triple([roots[i] for i in g]) for g in (first, second, third)):
                return True
    return False


def _square_decompositions(total: int, terms: int) -> list[tuple]:
    squares = [k * k for k in range(math.isqrt(total), -1, -1)]
    out = []

    def rec(rem, left, start, acc):
        if left == 0:
            if rem == 0:
                out.append(tuple(acc))
            return
        for i in range(start, len(squares)):
            s = squares[i]
            if s <= rem and s * left >= rem:
                rec(rem - s, left - 1, i, acc + [s])

    rec(total, terms, 0, [])
    return out


def turyn_l9_analysis(n: int) -> dict:
    """The l = 9 Turyn system over censuses a of N.

    With A_k = sum_i a_i a_{i+k} the identity sum_k w^k A_k = N splits into
    A_0 - N = A_3 = A_6, A_1 = A_4 = A_7, A_2 = A_5 = A_8. The first equation
    is a sum of nine squares equal to 2N over the residue classes mod 3.
    """
    decomps = _square_decompositions(2 * n, 9)
    first_patterns = set()
    first_count = 0
    solutions = []
    for a in compositions(n, 9):
        acs = autocorrelations(a)
        if acs[0] - n != acs[3]:
            continue
        first_count += 1
        classes = tuple(sorted(tuple(sorted(a[c::3])) for c in range(3)))
        first_patterns.add(classes)
        if acs[0] - n == acs[6] and acs[1] == acs[4] == acs[7] and acs[2] == acs[5] == acs[8]:
            solutions.append(a)
    exact = turyn_admissible(n, 9)
    if exact != bool(solutions):
        raise ArithmeticError("l=9 split system disagrees with the cyclotomic Turyn test")
    return {
        "N": n,
        "square_decompositions": [
            {"squares": list(d), "groupable": _groupable(d)} for d in decomps
        ],
        "first_equation_solutions": first_count,
        "class_patterns": [[list(t) for t in p] for p in sorted(first_patterns)],
        "n_solutions": len(solutions),
        "witness": list(solutions[0]) if solutions else None,
        "obstructed": not solutions,
    }


def unit_product_vanishing_search(n: int, l: int, budget: int = DEFAULT_BUDGET):
    """Sorted exponents of N l-th roots with vanishing sum and product 1, or None."""
    need = n_compositions(n, l)
    if need > budget:
        raise BudgetExceeded(f"unit-product search at (N={n}, l={l})", need, budget)
    for a in compositions(n, l):
        if sum(e * c for e, c in enumerate(a)) % l:
            continue
        if cyclotomic_is_vanishing(CyclotomicCounts(l, a)):
            return [e for e, c in enumerate(a) for _ in range(c)]
    return None


def two_cycle_construction(p: int, a: int) -> tuple[int, list[int]]:
    """(l, exponents) of a length p + 2 vanishing sum with unit product, l = 2 p^a.

    A rotated p-cycle w^{2k p^{a-1} + 1}, k < p, plus the 2-cycle
    w^{(p^a - p)/2} + w^{p^a + (p^a - p)/2}.
    """
    if p < 3 or p % 2 == 0 or a < 1:
        raise ValueError("needs an odd prime p and a >= 1")
    l = 2 * p ** a
    cycle = [2 * k * p ** (a - 1) + 1 for k in range(p)]
    half = (p ** a - p) // 2
    return l, [e % l for e in cycle + [half, p ** a + half]]


# --- exhaustive enumeration ---

def _digits(lo: int, hi: int, n: int, l: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    rows = np.zeros((idx.size, n), dtype=np.int64)
    for p in range(1, n):
        rows[:, p] = idx % l
        idx //= l
    return rows


def _hadamard_mask(rows: np.ndarray, l: int) -> np.ndarray:
    m = reduction_matrix(l)
    b, n = rows.shape
    alive = np.ones(b, dtype=bool)
    offsets = np.arange(b, dtype=np.int64)[:, None] * l
    for s in range(1, n // 2 + 1):
        live = np.nonzero(alive)[0]
        if live.size == 0:
            break
        sub = rows[live]
        d = (sub - np.roll(sub, -s, axis=1)) % l
        counts = np.bincount((offsets[: live.size] + d).ravel(),
                             minlength=live.size * l).reshape(live.size, l)
        alive[live[(counts @ m).any(axis=1)]] = False
    return alive


def enumerate_circulant_butson(n: int, l: int, budget: int = DEFAULT_BUDGET,
                               first_only: bool = False) -> list[ButsonRow]:
    """Canonical first rows of all circulant matrices in the Butson class C_N(l).

    Rows are searched with r_0 = 0 (global scalar) and reported once per
    rotation/shift orbit, sorted.
    """
    if n < 1 or l < 2:
        raise ValueError("need N >= 1 and l >= 2")
    total = l ** (n - 1)
    if total > budget:
        raise BudgetExceeded(f"enumeration of C_{n}({l})", total, budget)
    found = set()
    for lo in range(0, total, _CHUNK):
        rows = _digits(lo, min(total, lo + _CHUNK), n, l)
        for r in rows[_hadamard_mask(rows, l)]:
            found.add(ButsonRow(l, tuple(int(x) for x in r)).canonical())
            if first_only:
                return sorted(found, key=lambda b: b.exponents)
    return sorted(found, key=lambda b: b.exponents)


# --- the existence table ---

@dataclass
class ObstructionReport:
    n: int
    l: int
    lam_leung_blocked: bool
    turyn_blocked: bool | None
    exists: bool | None = None
    witness: ButsonRow | None = None
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.lam_leung_blocked:
            return "lam_leung"
        if self.turyn_blocked:
            return "turyn"
        if self.exists:
            return "cross"
        return "blank_unknown"

    @property
    def symbol(self) -> str:
        return {"lam_leung": "o", "turyn": "o_t", "cross": "x", "blank_unknown": ""}[self.status]

    def to_json(self) -> dict:
        return {
            "N": self.n, "l": self.l, "status": self.status,
            "lam_leung_blocked": self.lam_leung_blocked,
            "turyn_blocked": self.turyn_blocked,
            "exists": self.exists,
            "witness": list(self.witness.exponents) if self.witness else None,
            "notes": list(self.notes),
        }


def obstruction_cell(n: int, l: int, budget: int = DEFAULT_BUDGET) -> ObstructionReport:
    ll_blocked = not lam_leung_admissible(n, l)
    rep = ObstructionReport(n, l, ll_blocked, None)
    try:
        rep.turyn_blocked = not turyn_admissible(n, l, budget)
    except BudgetExceeded as exc:
        rep.notes.append(str(exc))
    try:
        rows = enumerate_circulant_butson(n, l, budget, first_only=True)
        rep.exists = bool(rows)
        rep.witness = rows[0] if rows else None
    except BudgetExceeded as exc:
        rep.notes.append(str(exc))
    if rep.exists and (rep.lam_leung_blocked or rep.turyn_blocked):
        raise ArithmeticError(f"cell ({n}, {l}) has a matrix but is flagged as obstructed")
    if rep.status == "blank_unknown":
        rep.notes.append("no obstruction found, no matrix found within budget"
                         if rep.exists is False else "unknown")
    return rep


def _cell_args(args):
    return obstruction_cell(*args)


def obstruction_table(n_range, l_range, budget: int = DEFAULT_BUDGET,
                      workers: int = 1) -> list[ObstructionReport]:
    """Lam-Leung first, Turyn next, then exhaustive enumeration, for every (N, l)."""
    cells = [(n, l, budget) for n in n_range for l in l_range]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell_args, cells))
    return [obstruction_cell(*c) for c in cells]


def table_csv(reports: list[ObstructionReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "l", "status"])
    for r in reports:
        w.writerow([r.n, r.l, r.status])
    return buf.getvalue()


def table_grid(reports: list[ObstructionReport]) -> str:
    """Human-readable grid with rows N and columns l."""
    ns = sorted({r.n for r in reports})
    ls = sorted({r.l for r in reports})
    cell = {(r.n, r.l): r.symbol for r in reports}
    lines = ["N\\l " + " ".join(f"{l:>3}" for l in ls)]
    for n in ns:
        lines.append(f"{n:>3} " + " ".join(f"{cell.get((n, l), '?'):>3}" for l in ls))
    return "\n".join(lines)
