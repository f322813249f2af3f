"""Symmetric and non-symmetric interval polynomials built from a real Verblunsky sequence.

Recurrences are monic, p_{n+1}(x) = (x - b_n) p_n(x) - u_n p_{n-1}(x) with
p_{-1} = 0, p_0 = 1. ``u[0]`` is kept in the arrays but never used by the
recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, PositivityError
from .opuc import VerblunskySource, szego_values
from .params import ParameterSet
from .rep import BandedOperator, build_reflection

MAX_DEGREE = 512


@dataclass(frozen=True)
class ThreeTermRecurrence:
    b: np.ndarray
    u: np.ndarray
    name: str = ""

    @property
    def length(self) -> int:
        return len(self.b)

    def evaluate(self, n: int, x) -> np.ndarray:
        """p_0(x)..p_n(x) stacked along the first axis."""
        if n >= self.length + 1:
            raise DomainError(f"{self.name}: coefficients available up to degree {self.length}")
        x = np.asarray(x, dtype=float)
        out = np.empty((n + 1,) + x.shape)
        out[0] = 1.0
        prev = np.zeros_like(x)
        for k in range(n):
            nxt = (x - self.b[k]) * out[k] - (self.u[k] * prev if k else 0.0)
            prev = out[k]
            out[k + 1] = nxt
        return out

    def __call__(self, n: int, x):
        return self.evaluate(n, x)[n]

    def jacobi(self, N: int) -> np.ndarray:
        """N x N symmetric Jacobi matrix (orthonormal form)."""
        if N > self.length:
            raise DomainError(f"{self.name}: only {self.length} coefficients")
        self.check_positive(N)
        J = np.diag(self.b[:N].astype(float))
        off = np.sqrt(self.u[1:N])
        return J + np.diag(off, 1) + np.diag(off, -1)

    def check_positive(self, N: int):
        bad = np.flatnonzero(self.u[1:N] <= 0)
        if bad.size:
            k = int(bad[0]) + 1
            raise PositivityError(f"{self.name}: u_{k} = {self.u[k]:.3g} is not positive")

    def coefficients(self):
        return np.asarray(self.b), np.asarray(self.u)


def _avals(src: VerblunskySource, lo: int, hi: int) -> dict[int, float]:
    return {k: src(k) for k in range(lo, hi)}


def v1(src: VerblunskySource, n_max: int) -> np.ndarray:
    """v_n = (1 + a_{n-1})(1 - a_{n-2}) / 4 for n < n_max (v_0 = 0)."""
    a = _avals(src, -2, n_max)
    return np.array([(1 + a[n - 1]) * (1 - a[n - 2]) / 4 for n in range(n_max)])


def v2(src: VerblunskySource, n_max: int) -> np.ndarray:
    """v_n = (1 + a_{n-1})(1 - a_n) / 4 for n < n_max (v_0 = 0)."""
    a = _avals(src, -1, n_max)
    return np.array([(1 + a[n - 1]) * (1 - a[n]) / 4 for n in range(n_max)])


def s1_recurrence(src: VerblunskySource, n_max: int) -> ThreeTermRecurrence:
    return ThreeTermRecurrence(np.zeros(n_max), v1(src, n_max), "s1")


def s2_recurrence(src: VerblunskySource, n_max: int) -> ThreeTermRecurrence:
    return ThreeTermRecurrence(np.zeros(n_max), v2(src, n_max), "s2")


def s3_recurrence(src: VerblunskySource, n_max: int) -> ThreeTermRecurrence:
    """Diagonal (a_n - a_{n-1}) / 2, sub-diagonal (1 - a_{n-1}^2) / 4.

    With a_{-1} = -1 the first diagonal entry is (a_0 + 1) / 2.
    """
    a = _avals(src, -1, n_max)
    b = np.array([(a[n] - a[n - 1]) / 2 for n in range(n_max)])
    u = np.array([0.0] + [(1 - a[n - 1] ** 2) / 4 for n in range(1, n_max)])
    return ThreeTermRecurrence(b, u, "s3")


def lower_christoffel(src: VerblunskySource, n_max: int) -> np.ndarray:
    """L_n = S_{n+1}(-1) / S_n(-1) = (a_{n-1} - 1) / 2."""
    a = _avals(src, -1, n_max)
    return np.array([(a[n - 1] - 1) / 2 for n in range(n_max)])


def double_christoffel(src: VerblunskySource, n_max: int) -> np.ndarray:
    """K_n = S_{n+2}(1) / S_n(1) = (1 - a_n)(1 - a_{n-1}) / 4."""
    a = _avals(src, -1, n_max)
    return np.array([(1 - a[n]) * (1 - a[n - 1]) / 4 for n in range(n_max)])


def split_coefficients(v: np.ndarray, n_max: int):
    """Coefficients of P_n, Q_n with S_{2n}(x) = P_n(x^2), S_{2n+1}(x) = x Q_n(x^2).

    B_n = v_{2n} + v_{2n+1}, U_n = v_{2n-1} v_{2n};
    C_n = v_{2n+1} + v_{2n+2}, V_n = v_{2n} v_{2n+1}.
    """
    if len(v) < 2 * n_max + 3:
        raise DomainError("need v_n up to index 2 n_max + 2")
    n = np.arange(n_max)
    B = v[2 * n] + v[2 * n + 1]
    U = np.where(n > 0, v[np.maximum(2 * n - 1, 0)] * v[2 * n], 0.0)
    C = v[2 * n + 1] + v[2 * n + 2]
    V = np.where(n > 0, v[2 * n] * v[2 * n + 1], 0.0)
    return B, U, C, V


def even_odd_split(family: int, src: VerblunskySource, n_max: int):
    """(P, Q) recurrences of the requested symmetric family (1 or 2)."""
    if family not in (1, 2):
        raise DomainError("family must be 1 or 2")
    v = (v1 if family == 1 else v2)(src, 2 * n_max + 3)
    B, U, C, V = split_coefficients(v, n_max)
    return (ThreeTermRecurrence(B, U, f"p{family}"), ThreeTermRecurrence(C, V, f"q{family}"))


def split_closed_forms(family: int, src: VerblunskySource, n_max: int):
    """B, U, C, V written directly in terms of the a_n.

    The leading factor of the first term of B for family 2 is 1/4; the value
    1/2 would break B_n = v_{2n} + v_{2n+1}.
    """
    a = _avals(src, -3, 2 * n_max + 3)
    B, U, C, V = (np.empty(n_max) for _ in range(4))
    for n in range(n_max):
        e = 2 * n
        if family == 1:
            B[n] = (1 + a[e - 1]) * (1 - a[e - 2]) / 4 + (1 + a[e]) * (1 - a[e - 1]) / 4
            U[n] = (1 + a[e - 1]) * (1 - a[e - 2] ** 2) * (1 - a[e - 3]) / 16
            C[n] = (1 + a[e]) * (1 - a[e - 1]) / 4 + (1 - a[e]) * (1 + a[e + 1]) / 4
            V[n] = (1 + a[e]) * (1 - a[e - 1] ** 2) * (1 - a[e - 2]) / 16
        else:
            B[n] = (1 + a[e - 1]) * (1 - a[e]) / 4 + (1 + a[e]) * (1 - a[e + 1]) / 4
            U[n] = (1 - a[e]) * (1 - a[e - 1] ** 2) * (1 + a[e - 2]) / 16
            C[n] = (1 + a[e]) * (1 - a[e + 1]) / 4 + (1 + a[e + 1]) * (1 - a[e + 2]) / 4
            V[n] = (1 - a[e + 1]) * (1 - a[e] ** 2) * (1 + a[e - 1]) / 16
    U[0] = V[0] = 0.0
    return B, U, C, V


def family_recurrence(name: str, src: VerblunskySource, n_max: int) -> ThreeTermRecurrence:
    """Recurrence by short name: s1, s2, s3, p1, p2, q1, q2."""
    if name == "s1":
        return s1_recurrence(src, n_max)
    if name == "s2":
        return s2_recurrence(src, n_max)
    if name == "s3":
        return s3_recurrence(src, n_max)
    if name in ("p1", "q1", "p2", "q2"):
        P, Q = even_odd_split(int(name[1]), src, n_max)
        return P if name[0] == "p" else Q
    raise DomainError(f"unknown family {name!r}")


def _circle_point(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise DomainError("circle map needs |x| < 1")
    half = np.exp(1j * np.arccos(x))  # z^{1/2}, x = cos(theta/2)
    return half, half ** 2


def circle_map_s1(n: int, x, src: VerblunskySource):
    """S_n^(1)(x) from 2^-n z^(-n/2) (Phi_n + Phi*_n) / (1 - a_{n-1})."""
    half, z = _circle_point(x)
    out = []
    for h, zz in zip(np.ravel(half), np.ravel(z)):
        phi, star = szego_values(n + 1, zz, src)
        out.append(2.0 ** -n * h ** -n * (phi[n] + star[n]) / (1 - src(n - 1)))
    return np.array(out).reshape(np.shape(half)).real


def circle_map_s2(n: int, x, src: VerblunskySource):
    """S_n^(2)(x) from 2^-n z^(-n/2) (z Phi_n - Phi*_n) / (z - 1)."""
    half, z = _circle_point(x)
    out = []
    for h, zz in zip(np.ravel(half), np.ravel(z)):
        phi, star = szego_values(n + 1, zz, src)
        out.append(2.0 ** -n * h ** -n * (zz * phi[n] - star[n]) / (zz - 1))
    return np.array(out).reshape(np.shape(half)).real


def christoffel_checks(src: VerblunskySource, n_max: int, xs) -> dict[str, float]:
    """Pointwise defects of the single and double Christoffel identities and of
    the ratio formulas for L_n, K_n, for n <= n_max."""
    xs = np.asarray(xs, dtype=float)
    S1 = s1_recurrence(src, n_max + 3).evaluate(n_max + 2, xs)
    S2 = s2_recurrence(src, n_max + 1).evaluate(n_max, xs)
    S3 = s3_recurrence(src, n_max + 1).evaluate(n_max, xs)
    L = lower_christoffel(src, n_max + 1)
    K = double_christoffel(src, n_max + 1)
    at_m1 = s1_recurrence(src, n_max + 3).evaluate(n_max + 2, -1.0)
    at_p1 = s1_recurrence(src, n_max + 3).evaluate(n_max + 2, 1.0)

    def rel(a, b):
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))

    ss, s3, lr, kr = [], [], [], []
    for n in range(n_max + 1):
        ss.append(rel((S1[n + 2] - K[n] * S1[n]) / (xs ** 2 - 1), S2[n]))
        s3.append(rel((S1[n + 1] - L[n] * S1[n]) / (xs + 1), S3[n]))
        lr.append(rel(at_m1[n + 1] / at_m1[n], L[n]))
        kr.append(rel(at_p1[n + 2] / at_p1[n], K[n]))
    return {"ss_ct": max(ss), "s3_ct": max(s3), "L_ratio": max(lr), "K_ratio": max(kr)}


def split_check(family: int, src: VerblunskySource, n_max: int, xs) -> float:
    """max |S_{2n}(x) - P_n(x^2)|, |S_{2n+1}(x) - x Q_n(x^2)| relative to max(1, |S|)."""
    xs = np.asarray(xs, dtype=float)
    S = (s1_recurrence if family == 1 else s2_recurrence)(src, 2 * n_max + 2).evaluate(2 * n_max + 1, xs)
    P, Q = even_odd_split(family, src, n_max + 1)
    Pv, Qv = P.evaluate(n_max, xs ** 2), Q.evaluate(n_max, xs ** 2)
    worst = 0.0
    for n in range(n_max + 1):
        worst = max(worst, float(np.max(np.abs(S[2 * n] - Pv[n]) / np.maximum(1.0, np.abs(S[2 * n])))))
        worst = max(worst, float(np.max(np.abs(S[2 * n + 1] - xs * Qv[n]) / np.maximum(1.0, np.abs(S[2 * n + 1])))))
    return worst


def jacobi_from_reflections(N: int, P: ParameterSet) -> BandedOperator:
    """J = R1 + R2: diagonal a_n - a_{n-1}, off-diagonal r_{n-1}.

    J / 2 is the orthonormal Jacobi matrix of the S^(3) recurrence. The last
    row and column see the boundary padding of R2 and are outside the window.
    """
    J = build_reflection("R1", N, P).entries + build_reflection("R2", N, P).entries
    return BandedOperator(J, 1, 1, "J")


@dataclass(frozen=True)
class DiscreteMeasure:
    nodes: np.ndarray
    weights: np.ndarray


def spectral_measure(rec: ThreeTermRecurrence, N: int) -> DiscreteMeasure:
    """Gauss rule of the recurrence: exact for polynomials of degree <= 2N - 1."""
    rec.check_positive(N)
    nodes, vecs = eigh_tridiagonal(rec.b[:N].astype(float), np.sqrt(rec.u[1:N]))
    return DiscreteMeasure(nodes, vecs[0] ** 2)


def gram_matrix(rec: ThreeTermRecurrence, mu: DiscreteMeasure, n_max: int) -> np.ndarray:
    vals = rec.evaluate(n_max, mu.nodes)
    return (vals * mu.weights) @ vals.T


def orthogonality_defect(rec: ThreeTermRecurrence, mu: DiscreteMeasure, n_max: int) -> float:
    """max |G_mn| / sqrt(G_mm G_nn) over m != n."""
    G = gram_matrix(rec, mu, n_max)
    d = np.sqrt(np.abs(np.diag(G)))
    R = np.abs(G) / np.outer(d, d)
    np.fill_diagonal(R, 0.0)
    return float(R.max(initial=0.0))


def chebyshev_monic(kind: str, n: int, x):
    """Monic Chebyshev polynomials from the trigonometric definitions (|x| < 1)."""
    th = np.arccos(np.asarray(x, dtype=float))
    if kind == "T":
        return np.cos(n * th) / (2.0 ** (n - 1) if n else 1.0)
    if kind == "U":
        return np.sin((n + 1) * th) / np.sin(th) / 2.0 ** n
    if kind == "V":
        # third kind: cos((n + 1/2) th) / cos(th / 2)
        return np.cos((n + 0.5) * th) / np.cos(th / 2) / 2.0 ** n
    raise DomainError(f"unknown Chebyshev kind {kind!r}")
