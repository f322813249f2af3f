"""Anticommutators X = R1 R2 + R2 R1, Y = R2 R3 + R3 R2 in the basis where R2
is diagonal, their parity sectors, and the quadratic (AW(3)) relations they obey.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankError, StructureError, WindowError
from .interval import ThreeTermRecurrence, even_odd_split
from .opuc import VerblunskySource
from .params import ParameterSet
from .rep import BandedOperator, build_reflection, rep_coefficients

TRIPLE_MARGIN = 12
STRUCTURE_TOL = 1e-13


@dataclass
class Diagonalizer:
    S: np.ndarray
    mu: np.ndarray
    nu: np.ndarray


def build_diagonalizer(N: int, P: ParameterSet) -> Diagonalizer:
    """S = diag([1]; S_1, S_3, ...) with S_i = [[-mu_i, nu_i], [nu_i, mu_i]].

    A lone trailing index (N even) gets the scalar 1.
    """
    a = rep_coefficients(P, N).a
    if np.any(np.abs(a) > 1 + 1e-12):
        raise DomainError("some |a_i| > 1; the blocks of S are not real")
    mu = np.sqrt(np.clip((1 - a) / 2, 0, None))
    nu = np.sqrt(np.clip((1 + a) / 2, 0, None))
    S = np.zeros((N, N))
    S[0, 0] = 1.0
    for i in range(1, N, 2):
        if i + 1 < N:
            S[i, i], S[i, i + 1], S[i + 1, i], S[i + 1, i + 1] = -mu[i], nu[i], nu[i], mu[i]
        else:
            S[i, i] = 1.0
    return Diagonalizer(S, mu, nu)


@dataclass
class XYPair:
    X: BandedOperator
    Y: BandedOperator
    R2: np.ndarray  # S R2 S, diagonal +-1
    S: np.ndarray
    q: float
    y: np.ndarray  # block values of Y, see y_block_values
    margin: int = TRIPLE_MARGIN

    @property
    def Ydiag(self) -> np.ndarray:
        return np.diag(self.y)

    @property
    def window(self) -> int:
        return self.X.size - self.margin

    @property
    def projectors(self):
        I = np.eye(self.X.size)
        return (I + self.R2) / 2, (I - self.R2) / 2


def y_block_values(N: int, P: ParameterSet, coeffs=None) -> np.ndarray:
    """Diagonal of Y computed block by block.

    R2 and R3 have 2 x 2 blocks on the same index pairs, and the
    anticommutator of two traceless 2 x 2 matrices is tr(AB) I, so each block
    of Y is 2 a_k alpha_k + r_k rho_k (zeta_k + 1/zeta_k) times I. Forming the
    matrix product instead cancels terms of size zeta_k ~ q^-k.
    """
    c = coeffs if coeffs is not None else rep_coefficients(P, N)
    y = np.empty(N)
    y[0] = 2.0
    for k in range(1, N, 2):
        if k + 1 < N:
            val = 2 * c.a[k] * c.alpha[k] + c.r[k] * c.rho[k] * np.real(c.zeta[k] + 1 / c.zeta[k])
            y[k] = y[k + 1] = val
        else:
            y[k] = 2.0 * np.sign(c.a[k]) * np.sign(c.alpha[k])
    return y


def build_xy(N: int, P: ParameterSet, margin: int = TRIPLE_MARGIN) -> XYPair:
    """X~ = S X S and Y~ = S Y S from the matrices (Y with the gauged R3).

    ``y`` carries the same diagonal computed without cancellation; the
    algebra checks use it.
    """
    if N < 2 * margin:
        raise WindowError(f"N = {N} is smaller than twice the margin {margin}")
    c = rep_coefficients(P, N)
    R1 = build_reflection("R1", N, P, coeffs=c).entries
    R2 = build_reflection("R2", N, P, coeffs=c).entries
    R3 = build_reflection("R3", N, P, coeffs=c).entries
    S = build_diagonalizer(N, P).S
    X = S @ (R1 @ R2 + R2 @ R1) @ S
    Y = S @ (R2 @ R3 + R3 @ R2) @ S
    return XYPair(BandedOperator(X, 2, margin, "X"), BandedOperator(np.real_if_close(Y), 0, margin, "Y"),
                  S @ R2 @ S, S, P.q, y_block_values(N, P, c), margin)


def x_entries(P: ParameterSet, n_max: int):
    """Closed forms A_n (n >= 2) and B_n (n >= 0) of the pentadiagonal X~.

    Indices below -1 of a_n are read as 0; they only occur next to 1 + a_{-1} = 0.
    """
    c = rep_coefficients(P, n_max + 3)
    a = c.a_at
    A = np.zeros(n_max)
    B = np.zeros(n_max)
    for n in range(n_max):
        if n % 2 == 0:
            m = n // 2
            if n >= 2:
                A[n] = np.sqrt((1 + a(2 * m - 1)) * (1 - a(2 * m - 2) ** 2) * (1 - a(2 * m - 3)))
            B[n] = a(2 * m) * (1 - a(2 * m - 1)) - a(2 * m - 2) * (1 + a(2 * m - 1))
        else:
            m = (n - 1) // 2
            if n >= 2:
                A[n] = np.sqrt((1 - a(2 * m + 1)) * (1 - a(2 * m) ** 2) * (1 + a(2 * m - 1)))
            B[n] = a(2 * m) * (1 - a(2 * m + 1)) - a(2 * m + 2) * (1 + a(2 * m + 1))
    return A, B


def x_structure(xy: XYPair) -> dict[str, float]:
    """Size of the entries that must vanish, and of the commutators with R2~."""
    w = xy.window
    X, Y, R = xy.X.entries[:w, :w], xy.Y.entries[:w, :w], xy.R2[:w, :w]
    first = max(np.abs(np.diag(X, 1)).max(), np.abs(np.diag(X, -1)).max())
    far = xy.X.band_violation()
    Yoff = np.abs(Y - np.diag(np.diag(Y))).max()
    return {"x_first_off": float(first), "x_beyond_band": float(far), "y_off_diagonal": float(Yoff),
            "comm_x_r2": float(np.abs(X @ R - R @ X).max()), "comm_y_r2": float(np.abs(Y @ R - R @ Y).max())}


@dataclass
class Sector:
    name: str
    Z1: np.ndarray  # tridiagonal
    Z2: np.ndarray  # diagonal
    recurrence: ThreeTermRecurrence


def split_sectors(xy: XYPair, tol: float = 1e-10) -> tuple[Sector, Sector]:
    """Even and odd parts of X~ and Y~ on the trusted window.

    Raises StructureError if X~ has weight on its first off-diagonals or Y~
    off its diagonal.
    """
    st = x_structure(xy)
    scale = max(1.0, float(np.abs(xy.X.interior()).max()))
    yscale = max(1.0, float(np.abs(np.diag(xy.Y.interior())).max()))
    if st["x_first_off"] > tol * scale or st["y_off_diagonal"] > tol * yscale:
        raise StructureError(f"X~/Y~ do not decouple into parity sectors: {st}")
    w = xy.window
    out = []
    for name, start in (("even", 0), ("odd", 1)):
        idx = np.arange(start, w, 2)
        Z1 = xy.X.entries[np.ix_(idx, idx)].real
        Z2 = np.diag(xy.y[idx])
        b = np.diag(Z1).copy()
        u = np.concatenate(([0.0], np.diag(Z1, 1) * np.diag(Z1, -1)))
        out.append(Sector(name, Z1, Z2, ThreeTermRecurrence(b, u, f"X[{name}]")))
    return out[0], out[1]


def affine_match(sector: ThreeTermRecurrence, target: ThreeTermRecurrence, n: int | None = None):
    """Fit x -> k1 x + k0 taking ``target`` to ``sector`` from its first two
    coefficients (k1^2 from u_1, k0 from b_0; the sign of k1 is the one that
    fits b_1 better), then return (k1, k0, max relative mismatch of all b_n, u_n)."""
    n = min(sector.length, target.length) if n is None else n
    mag = np.sqrt(sector.u[1] / target.u[1])
    best = None
    for k1 in (mag, -mag):
        k0 = sector.b[0] - k1 * target.b[0]
        err = abs(sector.b[1] - (k1 * target.b[1] + k0))
        if best is None or err < best[2]:
            best = (k1, k0, err)
    k1, k0, _ = best
    db = np.abs(sector.b[:n] - (k1 * target.b[:n] + k0)) / np.maximum(1.0, np.abs(sector.b[:n]))
    du = np.abs(sector.u[1:n] - k1 ** 2 * target.u[1:n]) / np.maximum(1.0, np.abs(sector.u[1:n]))
    return float(k1), float(k0), float(max(db.max(), du.max(initial=0.0)))


def sector_vs_interval(xy: XYPair, P: ParameterSet, n: int | None = None) -> dict:
    """Even sector against P^(1), odd sector against Q^(2)."""
    even, odd = split_sectors(xy)
    n = n or even.recurrence.length - 2
    src = VerblunskySource.from_params(P, "a")
    p1, _ = even_odd_split(1, src, n + 1)
    _, q2 = even_odd_split(2, src, n + 1)
    e = affine_match(even.recurrence, p1, n)
    o = affine_match(odd.recurrence, q2, n)
    return {"even": {"k1": e[0], "k0": e[1], "mismatch": e[2]},
            "odd": {"k1": o[0], "k0": o[1], "mismatch": o[2]}}


def _anti(A, B):
    return A @ B + B @ A


@dataclass
class StructureConstants:
    sector: str
    c: np.ndarray  # seven constants
    relation1: np.ndarray  # fitted (c1, c2, c3, c4, c5)
    relation2: np.ndarray  # fitted (c2, c1, c3, c6, c7)
    residual: float
    consistency: float  # disagreement of the shared constants between relations
    window: int

    def as_dict(self):
        return {"sector": self.sector, "constants": [float(v) for v in self.c],
                "residual": self.residual, "consistency": self.consistency, "window": self.window}


def _term_scale(*products, coef=None):
    """Entrywise sum of |c| |A1||A2|... over the given factor lists: the size
    of the terms before they cancel, hence the scale of their rounding error."""
    coef = coef or [1.0] * len(products)
    total = 0.0
    for c, factors in zip(coef, products):
        out = np.abs(factors[0])
        for F in factors[1:]:
            out = out @ np.abs(F)
        total = total + abs(c) * out
    return np.maximum(total, 1.0)


def _band_bound(Z: np.ndarray, bandwidth: int) -> np.ndarray:
    """max|Z| on every position of the band: the entries of X~ carry absolute
    rounding of order eps max|X~| even where their exact value is zero."""
    i, j = np.indices(Z.shape)
    return np.where(np.abs(i - j) <= bandwidth, np.abs(Z).max(), 0.0)


def _fit(lhs, basis, rows, scale, tag):
    """Least squares with each entry divided by its own term scale."""
    wts = 1.0 / scale[rows].ravel()
    M = np.column_stack([B[rows].ravel() * wts for B in basis])
    y = lhs[rows].ravel() * wts
    rank = np.linalg.matrix_rank(M)
    if rank < M.shape[1]:
        raise RankError(f"{tag}: regression matrix has rank {rank} < {M.shape[1]}")
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    defect = lhs - sum(cf * B for cf, B in zip(coef, basis))
    res = float(np.abs(defect[rows] / scale[rows]).max())
    return coef, res


def fit_structure_constants(sector: str, xy: XYPair, q: float | None = None) -> StructureConstants:
    """Least-squares AW(3) constants of one parity sector.

    Relation 1: Z1^2 Z2 + Z2 Z1^2 - (q + 1/q) Z1 Z2 Z1 in span{Z1^2, {Z1,Z2}, Z1, Z2, I}.
    Relation 2: Z2^2 Z1 + Z1 Z2^2 - (q + 1/q) Z2 Z1 Z2 in span{Z2^2, {Z1,Z2}, Z2, Z1, I}.
    The residual is the largest entry of the defect over the sector window
    (products of two tridiagonal factors lose their last two rows), each
    entry divided by max(1, size of the left-hand terms before cancellation).
    Y~ grows like q^-n, and y_n - q^(+-1) y_{n+1} cancels by q^(2n), so a
    single global scale would report rounding as a defect.
    """
    q = xy.q if q is None else q
    even, odd = split_sectors(xy)
    sec = {"even": even, "odd": odd}.get(sector)
    if sec is None:
        raise DomainError("sector must be 'even' or 'odd'")
    Z1, Z2 = sec.Z1, sec.Z2
    m = Z1.shape[0] - 3
    rows = np.s_[:m, :m]
    I = np.eye(Z1.shape[0])
    s = q + 1 / q
    lhs1 = Z1 @ Z1 @ Z2 + Z2 @ Z1 @ Z1 - s * Z1 @ Z2 @ Z1
    lhs2 = Z2 @ Z2 @ Z1 + Z1 @ Z2 @ Z2 - s * Z2 @ Z1 @ Z2
    B1 = _band_bound(Z1, 1)
    sc1 = _term_scale([B1, B1, Z2], [Z2, B1, B1], [B1, Z2, B1], coef=[1, 1, s])
    sc2 = _term_scale([Z2, Z2, B1], [B1, Z2, Z2], [Z2, B1, Z2], coef=[1, 1, s])
    c1, res1 = _fit(lhs1, [Z1 @ Z1, _anti(Z1, Z2), Z1, Z2, I], rows, sc1, f"{sector} relation 1")
    c2, res2 = _fit(lhs2, [Z2 @ Z2, _anti(Z1, Z2), Z2, Z1, I], rows, sc2, f"{sector} relation 2")
    consts = np.array([c1[0], c1[1], c1[2], c1[3], c1[4], c2[3], c2[4]])
    shared = np.array([c2[1] - c1[0], c2[0] - c1[1], c2[2] - c1[2]])
    scale = max(1.0, float(np.abs(consts).max()))
    return StructureConstants(sector, consts, c1, c2, max(res1, res2),
                              float(np.abs(shared).max() / scale), m)


def central_extension_residual(xy: XYPair, even: StructureConstants, odd: StructureConstants,
                               q: float | None = None) -> dict[str, float]:
    """Both relations on the full space with coefficients a_k P_e + b_k P_o."""
    q = xy.q if q is None else q
    w = xy.window
    X = xy.X.entries.real
    Y = xy.Ydiag
    Pe, Po = xy.projectors
    I = np.eye(X.shape[0])
    C = [even.c[k] * Pe + odd.c[k] * Po for k in range(7)]
    s = q + 1 / q
    lhs1 = X @ X @ Y + Y @ X @ X - s * X @ Y @ X
    rhs1 = C[0] @ X @ X + C[1] @ _anti(X, Y) + C[2] @ X + C[3] @ Y + C[4]
    lhs2 = Y @ Y @ X + X @ Y @ Y - s * Y @ X @ Y
    rhs2 = C[1] @ Y @ Y + C[0] @ _anti(X, Y) + C[2] @ Y + C[5] @ X + C[6] @ I
    # full-space window: two sector rows per full row, and the last sector rows are corrupted
    v = w - 6
    Xb = _band_bound(X[:w, :w], 2)
    Xb = np.pad(Xb, (0, X.shape[0] - w))
    sc1 = _term_scale([Xb, Xb, Y], [Y, Xb, Xb], [Xb, Y, Xb], coef=[1, 1, s])
    sc2 = _term_scale([Y, Y, Xb], [Xb, Y, Y], [Y, Xb, Y], coef=[1, 1, s])
    out = {}
    for name, l, r, sc in (("relation1", lhs1, rhs1, sc1), ("relation2", lhs2, rhs2, sc2)):
        out[name] = float(np.abs((l - r)[:v, :v] / sc[:v, :v]).max())
    return out


CASIMIR_MIX = "half_sum"  # coefficient -(q + 1/q)/2 on XY^2X + YX^2Y


def casimir_scalar(q: float) -> float:
    return 2 * (q ** 2 - q ** -2) * (q - 1 / q)


@dataclass
class CasimirReport:
    is_scalar: bool
    scalar: float
    residual: float
    expected: float
    off_diagonal: float


def casimir(xy: XYPair, q: float | None = None, mix: float | None = None,
            tol: float = 1e-9) -> CasimirReport:
    """(XY)^2 + (YX)^2 - mix (XY^2X + YX^2Y) + (q^2 - q^-2)(q - 1/q)/2 (X^2 + Y^2).

    ``mix`` defaults to (q + 1/q)/2: with it the operator is a multiple of the
    identity at the free point, which (q + 1/q)^2 / 2 is not.
    """
    q = xy.q if q is None else q
    if xy.margin < TRIPLE_MARGIN:
        raise WindowError("quartic products need the default margin")
    mix = (q + 1 / q) / 2 if mix is None else mix
    X = xy.X.entries.real
    Y = xy.Ydiag
    XY, YX = X @ Y, Y @ X
    lam = 0.5 * (q ** 2 - q ** -2) * (q - 1 / q)
    C = (XY @ XY + YX @ YX - mix * (X @ Y @ Y @ X + Y @ X @ X @ Y) + lam * (X @ X + Y @ Y))
    Xb = _band_bound(X, 2)
    scale = _term_scale([Xb, Y, Xb, Y], [Y, Xb, Y, Xb], [Xb, Y, Y, Xb], [Y, Xb, Xb, Y], [Xb, Xb], [Y, Y],
                        coef=[1, 1, mix, mix, lam, lam])
    v = xy.window - 4
    Cw, Sw = C[:v, :v], scale[:v, :v]
    d = np.diag(Cw)
    # read the scalar where the terms are smallest, i.e. rounding is least
    k = int(np.argmin(np.diag(Sw)))
    scalar = float(d[k])
    expected = casimir_scalar(q)
    off = float(np.abs((Cw - np.diag(d)) / Sw).max())
    spread = float(np.abs((d - expected) / np.diag(Sw)).max())
    residual = max(off, spread)
    return CasimirReport(residual < tol and abs(scalar - expected) <= tol * abs(expected),
                         scalar, residual, expected, off)


def casimir_free(N: int, q: float, mix: float | None = None) -> CasimirReport:
    """Casimir at the free point (the only point where a closed form is known)."""
    from .params import free_parameters

    return casimir(build_xy(N, free_parameters(q, depth=N)), q, mix)


def require_free(P: ParameterSet):
    if not P.is_free:
        raise DomainError("the Casimir check is defined at the free point only (use --mode free)")
