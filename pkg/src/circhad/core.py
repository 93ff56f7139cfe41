"""Phase vectors, the Fourier/circulant correspondence and Hadamard checks.

Index convention used throughout the package: ``F = (w^{ij}) / sqrt(N)`` with
``w = exp(2 pi i / N)``, ``H = F Q F^*`` with ``Q = diag(q)``, and ``xi`` is the
literally computed first row of ``H``, so ``H[i, j] = xi[(j - i) % N]``.
With numpy's sign conventions this gives ``xi = fft(q) / N`` and
``q = N * ifft(xi)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.eps}")


TolLike = Union[Tolerance, float, None]


def _eps(tol: TolLike) -> float:
    if tol is None:
        return DEFAULT_EPS
    if isinstance(tol, Tolerance):
        return tol.eps
    return Tolerance(float(tol)).eps


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhaseVector:
    """A point of the torus T^N stored as angles, q_i = exp(i * angles[i])."""

    angles: np.ndarray = field()

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).ravel()
        if a.size == 0:
            raise ValueError("phase vector must be nonempty")
        if not np.all(np.isfinite(a)):
            raise ValueError("phase vector angles must be finite")
        object.__setattr__(self, "angles", _frozen(a, float))

    @classmethod
    def from_complex(cls, q) -> "PhaseVector":
        q = np.asarray(q, dtype=complex).ravel()
        return cls(np.angle(q))

    @property
    def n(self) -> int:
        return int(self.angles.size)

    @property
    def q(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def normalized(self) -> "PhaseVector":
        """Angles reduced to [0, 2 pi)."""
        a = np.mod(self.angles, TWO_PI)
        a[a >= TWO_PI] = 0.0
        return PhaseVector(a)

    def to_json(self) -> dict:
        return {"n": self.n, "angles": [float(x) for x in self.angles]}

    @classmethod
    def from_json(cls, data) -> "PhaseVector":
        if isinstance(data, str):
            data = json.loads(data)
        pv = cls(data["angles"])
        if "n" in data and int(data["n"]) != pv.n:
            raise ValueError(f"n={data['n']} does not match {pv.n} angles")
        return pv

    def __eq__(self, other):
        if not isinstance(other, PhaseVector):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.angles, other.angles))

    def __hash__(self):
        return hash(self.angles.tobytes())


def as_phase_vector(q) -> PhaseVector:
    """Accept a PhaseVector, or a complex array of unit-modulus numbers."""
    if isinstance(q, PhaseVector):
        return q
    arr = np.asarray(q)
    if np.iscomplexobj(arr):
        return PhaseVector.from_complex(arr)
    raise TypeError("expected a PhaseVector or a complex array; "
                    "wrap real angles with PhaseVector(angles)")


@dataclass(frozen=True)
class CirculantMatrix:
    """Circulant matrix stored by its first row: H[i][j] = first_row[(j - i) % n]."""

    first_row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.first_row, dtype=complex).ravel()
        if row.size == 0:
            raise ValueError("first row must be nonempty")
        object.__setattr__(self, "first_row", _frozen(row, complex))

    @property
    def n(self) -> int:
        return int(self.first_row.size)

    def dense(self) -> np.ndarray:
        n = self.n
        idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return self.first_row[idx]

    def scaled(self, factor: complex) -> "CirculantMatrix":
        return CirculantMatrix(self.first_row * factor)

    def __getitem__(self, ij):
        i, j = ij
        return self.first_row[(j - i) % self.n]

    def to_json(self) -> dict:
        return {"n": self.n,
                "first_row": [[float(z.real), float(z.imag)] for z in self.first_row]}

    @classmethod
    def from_json(cls, data) -> "CirculantMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        row = [complex(re, im) for re, im in data["first_row"]]
        m = cls(row)
        if "n" in data and int(data["n"]) != m.n:
            raise ValueError(f"n={data['n']} does not match row length {m.n}")
        return m


@dataclass(frozen=True)
class CyclicRoot:
    values: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.values, dtype=complex).ravel()
        if z.size == 0:
            raise ValueError("cyclic root must be nonempty")
        if np.max(np.abs(np.abs(z) - 1.0)) > 1e-6:
            raise ValueError("cyclic root entries must have modulus 1")
        object.__setattr__(self, "values", _frozen(z, complex))

    @property
    def n(self) -> int:
        return int(self.values.size)


# --- Fourier transform and the circulant correspondence ---

def dft(v, inverse: bool = False) -> np.ndarray:
    """Apply the unitary Fourier matrix F = (w^{ij})/sqrt(N), or F^* if inverse."""
    v = np.asarray(v, dtype=complex)
    if v.size == 0:
        raise ValueError("dft of an empty vector")
    if inverse:
        return np.fft.fft(v, norm="ortho")
    return np.fft.ifft(v, norm="ortho")


def first_row(q) -> np.ndarray:
    """First row xi of F diag(q) F^*."""
    q = as_phase_vector(q).q
    return np.fft.fft(q) / q.size


def circulant_from_eigenvalues(q) -> CirculantMatrix:
    return CirculantMatrix(first_row(q))


def eigenvalues_of_circulant(h: CirculantMatrix, tol: TolLike = 1e-8) -> PhaseVector:
    """Inverse of circulant_from_eigenvalues; the matrix must be unitary."""
    xi = h.first_row
    lam = xi.size * np.fft.ifft(xi)
    dev = np.max(np.abs(np.abs(lam) - 1.0))
    if dev > _eps(tol):
        raise ValueError(f"eigenvalues are not unimodular (max deviation {dev:.3g}); "
                         "the circulant is not unitary")
    return PhaseVector(np.angle(lam))


def is_complex_hadamard(h: CirculantMatrix, scale: float = 1.0, tol: TolLike = None) -> bool:
    """True iff scale*H has unimodular entries and pairwise orthogonal rows."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    eps = _eps(tol)
    row = h.first_row * scale
    if np.max(np.abs(np.abs(row) - 1.0)) > eps:
        return False
    m = h.dense() * scale
    gram = m @ m.conj().T
    return bool(np.max(np.abs(gram - h.n * np.eye(h.n))) <= eps * max(1, h.n))


def is_real_symmetric(q, tol: TolLike = None) -> bool:
    """conj(q_i) == q_{-i} for every i."""
    z = as_phase_vector(q).q
    mirrored = z[(-np.arange(z.size)) % z.size]
    return bool(np.max(np.abs(np.conj(z) - mirrored)) <= _eps(tol))


# --- cyclic N-roots ---

def cyclic_root_from_row(xi) -> CyclicRoot:
    xi = np.asarray(xi, dtype=complex).ravel()
    if np.any(np.abs(xi) == 0):
        raise ValueError("row has a zero entry")
    return CyclicRoot(xi / np.roll(xi, 1))


def row_from_cyclic_root(z: CyclicRoot, lam: complex = 1.0) -> np.ndarray:
    """xi_0 = lam, xi_i = xi_{i-1} * z_i."""
    vals = z.values
    xi = np.empty(vals.size, dtype=complex)
    xi[0] = lam
    for i in range(1, vals.size):
        xi[i] = xi[i - 1] * vals[i]
    return xi


def cyclic_product_sums(z: CyclicRoot) -> np.ndarray:
    """sums[k-1] = sum_i z_i z_{i+1} ... z_{i+k-1}, for k = 1..N-1."""
    vals = z.values
    n = vals.size
    prods = np.ones(n, dtype=complex)
    sums = np.empty(n - 1, dtype=complex)
    for k in range(1, n):
        prods = prods * np.roll(vals, -(k - 1))
        sums[k - 1] = prods.sum()
    return sums


def verify_cyclic_root(z: CyclicRoot, tol: TolLike = None) -> bool:
    eps = _eps(tol)
    if z.n > 1 and np.max(np.abs(cyclic_product_sums(z))) > eps:
        return False
    return bool(abs(np.prod(z.values) - 1.0) <= eps)


# --- named matrices ---

def bf6_parameter() -> complex:
    """Root of a^2 - (1 - sqrt 3) a + 1 = 0 with positive imaginary part."""
    b = 1.0 - math.sqrt(3.0)
    return complex(b / 2.0, math.sqrt(4.0 - b * b) / 2.0)


def ftilde_row(n: int) -> np.ndarray:
    """First row of the circulant form of the Fourier matrix F_N.

    xi_j = w^{j(j-1)/2}, times exp(i pi j / N) when N is even so that the
    consecutive ratios form a cyclic N-root.
    """
    if n < 2:
        raise ValueError("Ftilde needs N >= 2")
    j = np.arange(n)
    ang = TWO_PI * ((j * (j - 1) // 2) % n) / n
    if n % 2 == 0:
        ang = ang + math.pi * j / n
    return np.exp(1j * ang)


def fixture(name: str, n: int | None = None) -> CirculantMatrix:
    """Named circulant complex Hadamard matrices: K4, F2tilde, Ftilde (needs n), BF6.

    ``Ftilde5`` style names are accepted as shorthand for ``fixture("Ftilde", 5)``.
    """
    key = name.strip()
    if key.lower().startswith("ftilde") and key[6:].isdigit():
        n = int(key[6:])
        key = "Ftilde"
    if key == "K4":
        return CirculantMatrix([-1, 1, 1, 1])
    if key == "F2tilde":
        return CirculantMatrix([1, 1j])
    if key == "Ftilde":
        if n is None:
            raise ValueError("Ftilde needs a size")
        return CirculantMatrix(ftilde_row(n))
    if key == "BF6":
        a = bf6_parameter()
        ab = a.conjugate()
        return CirculantMatrix([1, 1j * a, -a, -1j, -ab, 1j * ab])
    raise KeyError(f"unknown fixture {name!r}")


FIXTURE_NAMES = ("K4", "F2tilde", "Ftilde3", "Ftilde5", "Ftilde7", "BF6")


def hadamard_eigenvalues(h: CirculantMatrix) -> PhaseVector:
    """Eigenvalue vector of the unitary H / sqrt(N) for a Hadamard matrix H."""
    return eigenvalues_of_circulant(h.scaled(1.0 / math.sqrt(h.n)))


def circulant_det_modulus(row) -> float:
    """|det| of the circulant with the given first row, via its eigenvalues."""
    row = np.asarray(row, dtype=complex)
    lam = np.fft.fft(row)
    # product of moduli through logs to stay finite for larger N
    with np.errstate(divide="ignore"):
        return float(np.exp(np.sum(np.log(np.abs(lam)))))


def turyn_size_admissible(n: int) -> bool:
    """N = 4 m^2 for some m >= 1."""
    if n < 1:
        raise ValueError("N must be positive")
    if n % 4:
        return False
    r = math.isqrt(n // 4)
    return r * r == n // 4
