"""Tridiagonal representation: Verblunsky coefficients, gauge and the R_i, T_i matrices.

All matrices are dense N x N truncations of infinite operators. Products of
truncated matrices are wrong in their trailing rows, so every check works on
an interior window ``[:N - margin, :N - margin]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError, WindowError
from .params import SINGULAR_TOL, ParameterSet

XI0 = 1.0
PRODUCT_MARGIN = 8  # two-factor products K = T1 T2 - Q T4^-1 T3^-1
FULL_PRODUCT_MARGIN = 10  # four-factor product T1 T2 T3 T4


def _denominator(x, what):
    if abs(x) <= SINGULAR_TOL:
        raise SingularityError(f"vanishing denominator {what}")
    return x


def verblunsky(n: int, beta, q: float) -> float:
    """Closed-form coefficient a_n for parameters ``beta``.

    a_{-1} = -1; indices below -1 return 0, a value that only ever appears
    multiplied by (1 + a_{-1}) = 0.
    """
    if n == -1:
        return -1.0
    if n < -1:
        return 0.0
    b1, b2, b3, b4 = beta
    g = b1 * b2 * b3 * b4
    if n % 2 == 0:
        m = n // 2
        den = _denominator(b1 - b4, "b1 - b4") * _denominator(1 - g * q ** (2 * m), f"1 - g q^{2 * m}")
        return 1 - 2 * b1 * (1 - b2 * b4 * q ** m) * (1 - b3 * b4 * q ** m) / den
    m = (n + 1) // 2
    den = _denominator(1 - b1 * b4, "1 - b1 b4") * _denominator(1 - g * q ** (2 * m - 1), f"1 - g q^{2 * m - 1}")
    return 1 - 2 * (1 - g * q ** (m - 1)) * (1 - b1 * b4 * q ** m) / den


def coeff_a(n: int, P: ParameterSet) -> float:
    return verblunsky(n, P.beta, P.q)


def coeff_alpha(n: int, P: ParameterSet) -> float:
    return verblunsky(n, P.tilde_beta, P.q)


def r_squared_closed(n: int, P: ParameterSet) -> float:
    """1 - a_n^2 written as a product of factors (no cancellation)."""
    b1, b2, b3, b4 = P.beta
    q, g = P.q, P.g
    if n % 2 == 0:
        m = n // 2
        num = (1 - b3 * b4 * q ** m) * (1 - b2 * b4 * q ** m) * (1 - b1 * b3 * q ** m) * (1 - b1 * b2 * q ** m)
        return -4 * b1 * b4 * num / ((b1 - b4) ** 2 * (1 - g * q ** (2 * m)) ** 2)
    m = (n + 1) // 2
    num = (1 - q ** m) * (1 - b1 * b4 * q ** m) * (1 - b2 * b3 * q ** (m - 1)) * (1 - g * q ** (m - 1))
    return -4 * b1 * b4 * num / ((1 - b1 * b4) ** 2 * (1 - g * q ** (2 * m - 1)) ** 2)


def rho_ratio(n: int, P: ParameterSet) -> float:
    """rho_n^2 / r_n^2 = (delta_1 / delta_4)^2 (even n), (delta_2 / delta_3)^2 (odd n).

    The odd case carries b2 b3 / (q b1 b4): t_3^2 = b2 b3 / q.
    """
    b1, b2, b3, b4 = P.beta
    base = b2 * b3 / (b1 * b4)
    if n % 2 == 0:
        return base * ((b1 - b4) / (b2 - b3)) ** 2
    return base / P.q * ((1 - b1 * b4) / (1 - b2 * b3 / P.q)) ** 2


def _real_if_close(x: complex) -> complex | float:
    return x.real if abs(x.imag) <= 1e-14 * max(1.0, abs(x)) else x


@dataclass(frozen=True)
class RepCoefficients:
    """Coefficient sequences on indices 0..n_max-1 (gauge z on 0..n_max)."""

    a: np.ndarray
    alpha: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    z: np.ndarray
    zeta: np.ndarray
    gamma0: complex
    gamma1: complex
    xi0: float
    xi1: float

    def a_at(self, n: int) -> float:
        return -1.0 if n == -1 else (0.0 if n < -1 else float(self.a[n]))

    def alpha_at(self, n: int) -> float:
        return -1.0 if n == -1 else (0.0 if n < -1 else float(self.alpha[n]))


def gauge_constants(P: ParameterSet, xi0: float = XI0):
    """(gamma0, gamma1, xi1) fixed by the product relation once xi0 is chosen."""
    t1, t2, t3, t4 = P.t
    Q = P.Q
    gamma0 = -t2 * t3 * t4 * (1 - t1 ** 2) / (Q * xi0 ** 2 * t1 * (1 - t4 ** 2))
    gamma1 = -xi0 ** 2 * (1 - t2 ** 2) / (t2 ** 2 * (1 - t3 ** 2))
    xi1 = -Q * xi0 / (t2 * t3)
    return _real_if_close(gamma0), _real_if_close(gamma1), _real_if_close(xi1)


def gauge(n: int, P: ParameterSet, xi0: float = XI0) -> float:
    """Diagonal similarity entry z_n."""
    xi1 = gauge_constants(P, xi0)[2]
    if n % 2:
        return xi1 * P.Q ** ((n - 1) // 2)
    return xi0 * P.Q ** (-(n // 2))


def _unit_sqrt(values: np.ndarray, name: str) -> np.ndarray:
    sq = 1 - values ** 2
    bad = np.flatnonzero(sq < -1e-12)
    if bad.size:
        raise DomainError(f"|{name}_n| > 1 at n = {int(bad[0])}; outside the Euclidean regime")
    return np.sqrt(np.clip(sq, 0.0, None))


def rep_coefficients(P: ParameterSet, n_max: int, xi0: float = XI0) -> RepCoefficients:
    a = np.array([coeff_a(n, P) for n in range(n_max)])
    alpha = np.array([coeff_alpha(n, P) for n in range(n_max)])
    gamma0, gamma1, xi1 = gauge_constants(P, xi0)
    z = np.array([gauge(n, P, xi0) for n in range(n_max + 1)])
    return RepCoefficients(
        a=a, alpha=alpha, r=_unit_sqrt(a, "a"), rho=_unit_sqrt(alpha, "alpha"),
        z=z, zeta=z[1:] / z[:-1], gamma0=gamma0, gamma1=gamma1, xi0=xi0, xi1=xi1)


@dataclass
class BandedOperator:
    """Dense truncation of a banded operator.

    Rows and columns with index below ``size - interior_margin`` are trusted.
    """

    entries: np.ndarray
    bandwidth: int
    interior_margin: int
    name: str = ""

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def window(self) -> int:
        return self.size - self.interior_margin

    def interior(self) -> np.ndarray:
        w = self.window
        return self.entries[:w, :w]

    def band_violation(self) -> float:
        i, j = np.indices(self.entries.shape)
        outside = np.abs(i - j) > self.bandwidth
        return float(np.abs(self.entries[outside]).max(initial=0.0))

    def to_json(self) -> dict:
        flat = self.entries.astype(complex).ravel()
        return {"n": self.size, "band": self.bandwidth,
                "entries": [[float(v.real), float(v.imag)] for v in flat]}


_BLOCK_START = {"R1": 0, "R2": 1, "R3": 1, "R4": 0}


def reflection_matrix(diag_seq, off_seq, start: int, N: int,
                      zeta=None, allow_partial_block: bool = False) -> np.ndarray:
    """Assemble a block-diagonal reflection from its 2 x 2 blocks.

    Blocks sit at (k, k+1) for k = start, start+2, ...; index 0 is the scalar
    [1] when ``start`` is 1. A trailing index whose block would be cut off is
    filled with the scalar sign(diag_seq[k]) (the boundary block of a
    truncated representation).
    """
    dtype = float if zeta is None or np.isrealobj(zeta) else complex
    R = np.zeros((N, N), dtype=dtype)
    if start == 1:
        R[0, 0] = 1.0
    k = start
    while k < N:
        if k + 1 < N:
            up = off_seq[k] * (zeta[k] if zeta is not None else 1.0)
            down = off_seq[k] / (zeta[k] if zeta is not None else 1.0)
            R[k, k] = diag_seq[k]
            R[k + 1, k + 1] = -diag_seq[k]
            R[k, k + 1] = up
            R[k + 1, k] = down
        else:
            if not allow_partial_block and start == 0:
                raise DomainError(f"N = {N} splits the last 2x2 block; pass allow_partial_block")
            R[k, k] = 1.0 if diag_seq[k] >= 0 else -1.0
        k += 2
    return R


def build_reflection(which: str, N: int, P: ParameterSet, *,
                     symmetric: bool = False, allow_partial_block: bool = False,
                     coeffs: RepCoefficients | None = None) -> BandedOperator:
    """R1..R4 as N x N matrices.

    R3 and R4 carry the gauge zeta_k (rho_k zeta_k above the diagonal,
    rho_k / zeta_k below) unless ``symmetric`` is set. Odd N splits a block of
    R1 and R4 and is rejected unless ``allow_partial_block``; even N always
    leaves R2 and R3 with a lone trailing index, padded by a scalar +-1.
    """
    if which not in _BLOCK_START:
        raise DomainError(f"unknown reflection {which!r}")
    if N < 2:
        raise DomainError("N must be at least 2")
    c = coeffs if coeffs is not None else rep_coefficients(P, N)
    start = _BLOCK_START[which]
    if which in ("R1", "R2"):
        M = reflection_matrix(c.a, c.r, start, N, allow_partial_block=allow_partial_block)
    else:
        zeta = None if symmetric else c.zeta
        M = reflection_matrix(c.alpha, c.rho, start, N, zeta=zeta,
                              allow_partial_block=allow_partial_block)
    return BandedOperator(M, 1, 2, which)


def build_T(i: int, N: int, P: ParameterSet, *, inverse: bool = False,
            coeffs: RepCoefficients | None = None, **kw) -> BandedOperator:
    """T_i = sigma_i I + delta_i R_i, or its inverse sigma_i I - delta_i R_i."""
    R = build_reflection(f"R{i}", N, P, coeffs=coeffs, **kw).entries
    s, d = P.sigma[i - 1], P.delta[i - 1]
    T = s * np.eye(N) + (-d if inverse else d) * R
    return BandedOperator(T, 1, 2, f"T{i}^-1" if inverse else f"T{i}")


def max_abs(M) -> float:
    return float(np.abs(M).max(initial=0.0))


def entry_scale(*factors) -> np.ndarray:
    """Entrywise |A1||A2|...: the natural scale of rounding error in A1 A2 ..."""
    out = np.abs(factors[0])
    for F in factors[1:]:
        out = out @ np.abs(F)
    return out


@dataclass
class ProductReport:
    max_residual: float
    window: int
    full_residual: float | None = None
    full_window: int | None = None
    scaled_residual: float = float("nan")
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"max_residual": self.max_residual, "window": self.window,
                "full_residual": self.full_residual, "full_window": self.full_window,
                "scaled_residual": self.scaled_residual, **self.extra}


def verify_product_relation(N: int, P: ParameterSet, margin: int = PRODUCT_MARGIN,
                            full_margin: int = FULL_PRODUCT_MARGIN) -> ProductReport:
    """Interior size of K = T1 T2 - Q T4^-1 T3^-1 and of T1 T2 T3 T4 - Q I.

    ``scaled_residual`` divides K entrywise by |T1||T2| + Q|T4^-1||T3^-1|, the
    diagonals floored at |delta_i| (a_n and alpha_n are evaluated as 1 - O(1)
    and carry an absolute error of eps); it stays at rounding level even where
    the gauge makes entries of R3, R4 huge.
    The four-factor residual is only reported when N >= 2 * full_margin.
    """
    if N < 2 * margin:
        raise WindowError(f"N = {N} is smaller than twice the interior margin {margin}")
    c = rep_coefficients(P, N)
    T = [build_T(i, N, P, coeffs=c).entries for i in range(1, 5)]
    Ti = [build_T(i, N, P, inverse=True, coeffs=c).entries for i in range(1, 5)]
    K = T[0] @ T[1] - P.Q * Ti[3] @ Ti[2]
    w = N - margin
    F = [_floored(M, P.delta[k]) for k, M in enumerate(T)]
    Fi = [_floored(M, P.delta[k]) for k, M in enumerate(Ti)]
    scale = entry_scale(F[0], F[1]) + P.Q * entry_scale(Fi[3], Fi[2])
    report = ProductReport(
        max_residual=max_abs(K[:w, :w]), window=w,
        scaled_residual=max_abs(K[:w, :w] / np.maximum(scale[:w, :w], 1.0)))
    if N >= 2 * full_margin:
        full = T[0] @ T[1] @ T[2] @ T[3] - P.Q * np.eye(N)
        fw = N - full_margin
        report.full_residual = max_abs(full[:fw, :fw])
        report.full_window = fw
        fs = entry_scale(*F)
        report.extra["full_scaled"] = max_abs(full[:fw, :fw] / np.maximum(fs[:fw, :fw], 1.0))
    return report


def free_relation_residual(N: int, P: ParameterSet, margin: int = PRODUCT_MARGIN) -> dict[str, float]:
    """R1 R2 - Q R4 R3 on the interior, the form the product relation takes at
    the free point.

    ``scaled`` divides entrywise by (|R1| + I)(|R2| + I) + Q (|R4| + I)(|R3| + I):
    the diagonals a_n, alpha_n are evaluated as 1 - O(1), so they carry an
    absolute error of eps even where their value is 0, and the gauge entries
    they multiply grow like q^-n.
    """
    if N < 2 * margin:
        raise WindowError(f"N = {N} is smaller than twice the interior margin {margin}")
    c = rep_coefficients(P, N)
    R1, R2, R3, R4 = (build_reflection(w, N, P, coeffs=c).entries for w in ("R1", "R2", "R3", "R4"))
    K = R1 @ R2 - P.Q * R4 @ R3
    I = np.eye(N)
    scale = entry_scale(np.abs(R1) + I, np.abs(R2) + I) + P.Q * entry_scale(np.abs(R4) + I, np.abs(R3) + I)
    w = N - margin
    return {"absolute": max_abs(K[:w, :w]), "scaled": max_abs(K[:w, :w] / np.maximum(scale[:w, :w], 1.0)), "window": w}


def _floored(M: np.ndarray, d=1.0) -> np.ndarray:
    """|M| with every diagonal entry raised to at least |d|."""
    A = np.abs(M).astype(float)
    np.fill_diagonal(A, np.maximum(np.diag(A), abs(d)))
    return A


def quadratic_residual(i: int, N: int, P: ParameterSet, coeffs=None) -> float:
    """max |(T_i - t_i)(T_i - 1/t_i)| over the whole matrix."""
    T = build_T(i, N, P, coeffs=coeffs).entries
    t = P.t[i - 1]
    I = np.eye(N)
    return max_abs((T - t * I) @ (T - I / t))


def involution_residual(which: str, N: int, P: ParameterSet, coeffs=None) -> float:
    R = build_reflection(which, N, P, coeffs=coeffs).entries
    return max_abs(R @ R - np.eye(N))


def scaled_relation_residuals(N: int, P: ParameterSet, coeffs=None) -> dict[str, float]:
    """R_i^2 - I and (T_i - t_i)(T_i - 1/t_i) divided entrywise by the size of
    the terms they cancel, floored at 1.

    Inside a block, a_k (rho_k zeta_k) and (rho_k zeta_k) a_k cancel; BLAS may
    fuse one of the two products, which leaves eps |rho_k zeta_k a_k|.
    """
    c = coeffs if coeffs is not None else rep_coefficients(P, N)
    I = np.eye(N)
    inv = quad = 0.0
    for i, w in enumerate(("R1", "R2", "R3", "R4"), start=1):
        R = build_reflection(w, N, P, coeffs=c).entries
        F = _floored(R)
        inv = max(inv, max_abs((R @ R - I) / np.maximum(F @ F, 1.0)))
        T = build_T(i, N, P, coeffs=c).entries
        t = P.t[i - 1]
        E = (T - t * I) @ (T - I / t)
        sc = (_floored(T, P.delta[i - 1]) + abs(t) * I) @ (_floored(T, P.delta[i - 1]) + I / abs(t))
        quad = max(quad, max_abs(E / np.maximum(sc, 1.0)))
    return {"involution": inv, "quadratic": quad}


def symmetrize(op: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Undo the gauge: D op D^-1 with D = diag(z)."""
    z = np.asarray(z)[: op.shape[0]]
    return (z[:, None] * op) / z[None, :]


def _rel(lhs, rhs, scale: float = 0.0) -> float:
    """|lhs - rhs| relative to the larger side, or to ``scale`` (the size of
    the terms before cancellation) when that is larger."""
    return float(abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs), scale))


def verify_derivation_system(N: int, P: ParameterSet) -> dict[str, float]:
    """Substitute the closed forms into the equations obtained from K = 0.

    Returns the max relative residual |lhs - rhs| / max(1, |lhs|, |rhs|, s)
    per family, s being the size of the gauge-weighted terms before they
    cancel, for the equation index n up to N // 2. ``dc_from_int_*`` compare
    each main-diagonal equation with the product of the two inner-diagonal
    equations it follows from.
    """
    n_max = N // 2
    c = rep_coefficients(P, 2 * n_max + 3)
    s1, s2, s3, s4 = P.sigma
    d1, d2, d3, d4 = P.delta
    Q, g0, g1 = P.Q, c.gamma0, c.gamma1
    a, al, r, rho, z = c.a_at, c.alpha_at, c.r, c.rho, c.z
    fam: dict[str, list[float]] = {k: [] for k in (
        "out_1", "out_2", "int_1", "int_2", "int_3", "int_4", "dc_1", "dc_2",
        "dc_from_int_1", "dc_from_int_2", "rho_r_even", "rho_r_odd", "rr_1", "rr_2")}
    for n in range(n_max + 1):
        fam["out_1"].append(_rel(d1 * d2 * r[2 * n] * r[2 * n + 1],
                                 Q * d3 * d4 * rho[2 * n] * rho[2 * n + 1] * z[2 * n + 2] / z[2 * n]))
        i1 = (d1 * (d2 * a(2 * n + 1) + s2), Q * d4 * g0 * z[2 * n + 1] ** 2 * (d3 * al(2 * n + 1) - s3))
        i2 = (d2 * (d1 * a(2 * n) - s1), Q * d3 * g1 * z[2 * n + 1] ** -2 * (d4 * al(2 * n) + s4))
        i3 = (d1 * (d2 * a(2 * n - 1) - s2), Q * d4 * g0 * z[2 * n] ** 2 * (d3 * al(2 * n - 1) + s3))
        i4 = (d2 * (d1 * a(2 * n) + s1), Q * d3 * g1 * z[2 * n] ** -2 * (d4 * al(2 * n) - s4))
        # a_n, alpha_n come out of 1 - (O(1) ratio), so their absolute error is
        # eps whatever their size; the gauge factor then amplifies it
        sc = (abs(Q * d4 * g0 * z[2 * n + 1] ** 2) * (abs(d3) + abs(s3)),
              abs(Q * d3 * g1 * z[2 * n + 1] ** -2) * (abs(d4) + abs(s4)),
              abs(Q * d4 * g0 * z[2 * n] ** 2) * (abs(d3) + abs(s3)),
              abs(Q * d3 * g1 * z[2 * n] ** -2) * (abs(d4) + abs(s4)))
        for name, (lhs, rhs), s in zip(("int_1", "int_2", "int_3", "int_4"), (i1, i2, i3, i4), sc):
            fam[name].append(_rel(lhs, rhs, s))
        dc1 = ((-d1 * a(2 * n) + s1) * (d2 * a(2 * n + 1) + s2),
               Q * (d4 * al(2 * n) + s4) * (-d3 * al(2 * n + 1) + s3))
        dc2 = ((d1 * a(2 * n) + s1) * (-d2 * a(2 * n - 1) + s2),
               Q * (-d4 * al(2 * n) + s4) * (d3 * al(2 * n - 1) + s3))
        fam["dc_1"].append(_rel(*dc1))
        fam["dc_2"].append(_rel(*dc2))
        # int_1 * int_2 / (d1 d2) reproduces -dc_1 on each side; likewise int_3 * int_4
        fam["dc_from_int_1"].append(max(_rel(-i1[0] * i2[0] / (d1 * d2), dc1[0]),
                                        _rel(-i1[1] * i2[1] / (d1 * d2), dc1[1])))
        fam["dc_from_int_2"].append(max(_rel(-i3[0] * i4[0] / (d1 * d2), dc2[0]),
                                        _rel(-i3[1] * i4[1] / (d1 * d2), dc2[1])))
        fam["rho_r_even"].append(_rel(rho[2 * n], g0 * r[2 * n] * z[2 * n] * z[2 * n + 1]))
        fam["rr_2"].append(_rel(abs(d4 * rho[2 * n]), abs(d1 * r[2 * n])))
        if n >= 1:
            fam["out_2"].append(_rel(d1 * d2 * r[2 * n] * r[2 * n - 1],
                                     Q * d3 * d4 * rho[2 * n] * rho[2 * n - 1] * z[2 * n - 1] / z[2 * n + 1]))
            fam["rho_r_odd"].append(_rel(rho[2 * n - 1], g1 * r[2 * n - 1] / (z[2 * n] * z[2 * n - 1])))
            fam["rr_1"].append(_rel(abs(d3 * rho[2 * n - 1]), abs(d2 * r[2 * n - 1])))
    out = {k: max(v) for k, v in fam.items()}
    out["res_gd"] = _rel(d1 * d2, Q * g0 * g1 * d3 * d4)
    return out


DERIVATION_FAMILIES = ("out_1", "out_2", "int_1", "int_2", "int_3", "int_4", "dc_1", "dc_2")


def coefficient_table(P: ParameterSet, n_max: int) -> list[tuple]:
    """Rows (n, a_n, r_n, alpha_n, rho_n, z_n) for n = 0..n_max-1."""
    c = rep_coefficients(P, n_max)
    return [(n, float(c.a[n]), float(c.r[n]), float(c.alpha[n]), float(c.rho[n]),
             float(np.real(c.z[n]))) for n in range(n_max)]


def sequence(fn: Callable[[int, ParameterSet], float], P: ParameterSet, n_max: int) -> np.ndarray:
    return np.array([fn(n, P) for n in range(n_max)])


def condition_report(P: ParameterSet, n_max: int) -> dict[str, float]:
    """Distances of the closed-form denominators from zero (smaller is worse)."""
    b1, b2, b3, b4 = P.beta
    dens = [abs(b1 - b4), abs(1 - b1 * b4), abs(b2 - b3), abs(1 - b2 * b3 / P.q)]
    dens += [abs(1 - P.g * P.q ** k) for k in range(0, n_max + 1)]
    return {"min_denominator": float(min(dens)),
            "max_gauge": float(max(abs(gauge(n, P)) for n in range(n_max + 1))),
            "log10_gauge_spread": math.log10(abs(gauge(n_max - n_max % 2, P)) / abs(gauge(1, P)) + 1e-300)}
