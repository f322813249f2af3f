"""Polynomials orthogonal on the unit circle generated by a real Verblunsky sequence.

Coefficient arrays are ascending: ``c[k]`` multiplies z**k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .params import ParameterSet
from .rep import BandedOperator, coeff_a, coeff_alpha, reflection_matrix

MAX_DEGREE = 512
FAMILIES = ("a", "alpha")


@dataclass(frozen=True)
class VerblunskySource:
    """A real sequence n -> value(n) with value(-1) = -1.

    ``limit`` is the first index at which the sequence stops being usable
    (for truncated families, one past the boundary index).
    """

    family: str
    func: Callable[[int], float]
    limit: int | None = None

    def __call__(self, n: int) -> float:
        if n == -1:
            return -1.0
        if n < -1:
            return 0.0
        if self.limit is not None and n >= self.limit:
            raise DomainError(f"{self.family}-family defined only for n < {self.limit}")
        return float(self.func(n))

    def values(self, n: int) -> np.ndarray:
        return np.array([self(k) for k in range(n)])

    @classmethod
    def from_params(cls, P: ParameterSet, family: str = "a", limit: int | None = None):
        if family == "a":
            return cls("a", lambda n: coeff_a(n, P), limit)
        if family == "alpha":
            return cls("alpha", lambda n: coeff_alpha(n, P), limit)
        raise DomainError(f"family must be one of {FAMILIES}, got {family!r}")

    @classmethod
    def from_sequence(cls, seq, family: str = "custom"):
        seq = [float(x) for x in seq]
        return cls(family, seq.__getitem__, len(seq))


@dataclass(frozen=True)
class MonicOPUC:
    degree: int
    coeffs: np.ndarray

    @property
    def reversed(self) -> np.ndarray:
        """Coefficients of Phi*_n (real sequence, so no conjugation)."""
        return self.coeffs[::-1].copy()

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def star(self, z):
        return np.polynomial.polynomial.polyval(z, self.reversed)


def _check_degree(n):
    if n < 0:
        raise DomainError("degree must be non-negative")
    if n > MAX_DEGREE:
        raise DomainError(f"degree {n} above the cap {MAX_DEGREE}")


def szego_table(n: int, src: VerblunskySource) -> list[MonicOPUC]:
    """Phi_0..Phi_n from Phi_{k+1} = z Phi_k - a_k Phi*_k."""
    _check_degree(n)
    out = [MonicOPUC(0, np.ones(1))]
    c = np.ones(1)
    for k in range(n):
        nxt = np.zeros(k + 2)
        nxt[1:] = c
        nxt[: k + 1] -= src(k) * c[::-1]
        c = nxt
        out.append(MonicOPUC(k + 1, c))
    return out


def szego_polynomial(n: int, src: VerblunskySource) -> MonicOPUC:
    return szego_table(n, src)[-1]


def szego_values(n_max: int, z: complex, src: VerblunskySource) -> tuple[np.ndarray, np.ndarray]:
    """Phi_n(z) and Phi*_n(z) for n < n_max by the recursion on values.

    Much better conditioned than summing the coefficient arrays, which
    cancel heavily away from the origin.
    """
    _check_degree(n_max)
    z = complex(z)
    phi = np.empty(n_max, dtype=complex)
    star = np.empty(n_max, dtype=complex)
    p, s = 1.0 + 0j, 1.0 + 0j
    for n in range(n_max):
        phi[n], star[n] = p, s
        a = src(n) if n + 1 < n_max else 0.0
        p, s = z * p - a * s, s - a * z * p
    return phi, star


def laurent_values(n_max: int, z: complex, src: VerblunskySource) -> np.ndarray:
    """phi_0(z)..phi_{n_max-1}(z).

    phi_{2m}(z) = z^m Phi_{2m}(1/z) = z^{-m} Phi*_{2m}(z) and
    phi_{2m+1}(z) = z^{-m} Phi_{2m+1}(z).
    """
    if z == 0:
        raise DomainError("Laurent basis is undefined at z = 0")
    z = complex(z)
    phi, star = szego_values(n_max, z, src)
    n = np.arange(n_max)
    powers = z ** (-(n // 2))
    return np.where(n % 2 == 0, star, phi) * powers


def laurent_basis(n: int, z: complex, src: VerblunskySource) -> complex:
    return complex(laurent_values(n + 1, z, src)[n])


def _unit_sqrt(x):
    return np.sqrt(np.clip(1 - x ** 2, 0.0, None))


def pencil_factors(N: int, src: VerblunskySource) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric involutions (L, M): L has blocks at even indices, M = [1] + blocks at odd ones.

    For the a-family these are R1, R2; for the alpha family R4, R3 with the
    gauge stripped.
    """
    if N % 2:
        raise DomainError("N must be even so that L ends on a whole block")
    a = src.values(N)
    r = _unit_sqrt(a)
    return (reflection_matrix(a, r, 0, N), reflection_matrix(a, r, 1, N))


@dataclass
class CMVOperator:
    U: BandedOperator
    L: np.ndarray
    M: np.ndarray
    orthogonality_residual: float


def build_cmv(N: int, src: VerblunskySource, P: ParameterSet | None = None) -> CMVOperator:
    """U = M L, the five-diagonal matrix of multiplication by z on the Laurent basis.

    ``P`` is accepted for interface symmetry; the matrices depend only on the
    sequence.
    """
    L, M = pencil_factors(N, src)
    U = M @ L
    op = BandedOperator(U, 2, 4, f"U[{src.family}]")
    w = op.window
    res = float(np.abs((U @ U.T - np.eye(N))[:w, :w]).max())
    return CMVOperator(op, L, M, res)


def pencil_vector(N: int, z: complex, src: VerblunskySource) -> np.ndarray:
    """Laurent basis in orthonormal scaling: phi_n / (r_0 ... r_{n-1})."""
    phi = laurent_values(N, z, src)
    r = _unit_sqrt(src.values(N))
    norm = np.concatenate(([1.0], np.cumprod(r[: N - 1])))
    return phi / norm


def pencil_residual(z: complex, N: int, src: VerblunskySource,
                    P: ParameterSet | None = None) -> float:
    """max over rows 0..N-3 of |((L - z M) v)_row| / max(1, |v|_max)."""
    if z == 0:
        raise DomainError("pencil is evaluated at z != 0")
    L, M = pencil_factors(N, src)
    v = pencil_vector(N, z, src)
    res = (L - z * M) @ v
    return float(np.abs(res[: N - 2]).max() / max(1.0, np.abs(v).max()))


def coefficient_rows(n_max: int, src: VerblunskySource) -> list[list[float]]:
    """Rows (n, c_0, ..., c_n) of Phi_n, zero padded to a common width."""
    table = szego_table(n_max, src)
    rows = []
    for p in table:
        row = [p.degree] + [float(c) for c in p.coeffs] + [0.0] * (n_max - p.degree)
        rows.append(row)
    return rows
