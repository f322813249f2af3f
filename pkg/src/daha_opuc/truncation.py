"""Finite-dimensional reduction: parameters with |a_K| = 1, the finite CMV
matrix, its unit-circle spectrum and the discrete orthogonality it carries."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import (DegeneracyError, DomainError, ForbiddenConditionError, SingularityError,
                     TruncationError)
from .opuc import VerblunskySource, pencil_vector, szego_table, szego_values
from .params import ParameterSet, derive_parameters, singular_indices
from .rep import coeff_a, coeff_alpha, r_squared_closed, reflection_matrix, rho_ratio

BOUNDARY_TOL = 1e-10
ORTH_DPS = 50
EVEN_PAIRS = ((1, 2), (1, 3), (2, 4), (3, 4))


@dataclass(frozen=True)
class TruncationCondition:
    """beta_i beta_k = q^-power, reached at Verblunsky index ``index``.

    kind "b1b4": beta_1 beta_4 = q^-(M+1), a_{2M+1} = +1.
    kind "b2b3": beta_2 beta_3 = q^-M, a_{2M+1} = -1.
    kind "even": beta_i beta_k = q^-M for a pair in EVEN_PAIRS, a_{2M} = +-1.
    """

    kind: str
    pair: tuple[int, int]
    order: int

    @property
    def power(self) -> int:
        return self.order + 1 if self.kind == "b1b4" else self.order

    @property
    def index(self) -> int:
        return 2 * self.order + (0 if self.kind == "even" else 1)

    def product(self, q: float) -> float:
        return q ** -self.power

    def residual(self, beta, q: float) -> float:
        i, k = self.pair
        return abs(beta[i - 1] * beta[k - 1] * q ** self.power - 1)


def parse_kind(text: str, order: int) -> TruncationCondition:
    """'b1b4', 'b2b3', 'even:i,k' or the excluded 'g'."""
    if order < 1:
        raise DomainError("truncation order must be at least 1")
    t = text.strip().lower()
    if t in ("g", "forbidden", "g=q^-n"):
        raise ForbiddenConditionError(
            "g = q^-N makes the coefficient denominators vanish; the para q-Racah "
            "regime it leads to is not implemented")
    if t == "b1b4":
        return TruncationCondition("b1b4", (1, 4), order)
    if t == "b2b3":
        return TruncationCondition("b2b3", (2, 3), order)
    if t.startswith("even:"):
        try:
            i, k = sorted(int(v) for v in t[5:].split(","))
        except ValueError as exc:
            raise DomainError(f"bad pair in {text!r}; expected even:i,k") from exc
        if (i, k) not in EVEN_PAIRS:
            raise DomainError(f"even truncation pairs are {EVEN_PAIRS}; (1,4) and (2,3) are the odd kinds")
        return TruncationCondition("even", (i, k), order)
    raise DomainError(f"unknown truncation kind {text!r}; expected b1b4 | b2b3 | even:i,k")


def admissibility(cond: TruncationCondition, beta, q: float) -> str | None:
    """None if ``beta`` gives a finite representation cut at cond.index, else the reason."""
    b1, b2, b3, b4 = beta
    if not (b1 * b4 > 0 and b2 * b3 > 0):
        return "sign: need b1 b4 > 0 and b2 b3 > 0"
    g = b1 * b2 * b3 * b4
    K = cond.index
    for k in range(0, K + 2):
        if abs(g * q ** k - 1) < 1e-9:
            return f"forbidden: g q^{k} = 1"
    if singular_indices(beta, q, K + 1):
        return "singular denominator"
    try:
        P = derive_parameters(beta, q, "finite", depth=K + 1)
    except (DomainError, SingularityError) as exc:
        return str(exc)
    for n in range(K):
        if r_squared_closed(n, P) <= 0:
            return f"r_{n}^2 <= 0"
        if rho_ratio(n, P) <= 0:
            return f"rho_{n}^2 <= 0"
        if not abs(coeff_a(n, P)) < 1:
            return f"|a_{n}| >= 1"
        if not abs(coeff_alpha(n, P)) < 1:
            return f"|alpha_{n}| >= 1"
    if abs(abs(coeff_a(K, P)) - 1) > BOUNDARY_TOL:
        return f"|a_{K}| != 1"
    return None


_GRID = (0.5, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9, 0.4, 0.6, 1.5, 2.0, 3.0, 5.0)


def _complete(cond, free, q):
    """Insert the beta fixed by the condition into the three free ones."""
    i, k = cond.pair
    beta = list(free[: k - 1]) + [None] + list(free[k - 1:])
    beta[k - 1] = cond.product(q) / beta[i - 1]
    return tuple(beta)


def default_free_betas(cond: TruncationCondition, q: float) -> tuple[float, float, float]:
    """Three betas (all but beta_k of the pair) that pass the positivity checks.

    b1b4 has a closed choice: beta = (2 q^-(M+1), 1/2, q^(M+1)/4, 1/2), all
    positive. Other kinds use a fixed-order grid search, so the result is
    deterministic.
    """
    if cond.kind == "b1b4":
        return (2 * q ** -(cond.order + 1), 0.5, q ** (cond.order + 1) / 4)
    mags = list(_GRID) + [q ** (cond.power + 1) / 4, q ** -(cond.power + 1)]
    for signs in itertools.product((1, -1), repeat=3):
        for vals in itertools.product(mags, repeat=3):
            free = tuple(s * v for s, v in zip(signs, vals))
            if admissibility(cond, _complete(cond, free, q), q) is None:
                return free
    raise DomainError(f"no admissible parameters found for {cond} at q = {q}")


def solve_truncation(kind: str | TruncationCondition, M: int, free_betas=None,
                     q: float = 0.8) -> ParameterSet:
    """Finite-mode parameters with beta_i beta_k = q^-power exactly.

    ``free_betas`` are the three betas other than beta_k (k the larger index of
    the pair), in order; beta_k is solved for.
    """
    cond = kind if isinstance(kind, TruncationCondition) else parse_kind(kind, M)
    if not 0 < q < 1:
        raise DomainError("q must lie in (0, 1)")
    free = tuple(default_free_betas(cond, q) if free_betas is None else free_betas)
    if len(free) != 3:
        raise DomainError("give exactly three free betas")
    beta = _complete(cond, free, q)
    g = float(np.prod(beta))
    for N in range(0, 4 * cond.index + 4):
        if abs(g * q ** N - 1) < 1e-12:
            raise ForbiddenConditionError(f"g = q^-{N}: excluded (para q-Racah regime, not implemented)")
    why = admissibility(cond, beta, q)
    if why is not None:
        raise DomainError(f"{cond.kind} truncation at index {cond.index} fails: {why}")
    return derive_parameters(beta, q, "finite", depth=cond.index + 1)


def truncation_index(P: ParameterSet, limit: int = 512, tol: float = BOUNDARY_TOL) -> int:
    """First n with |a_n| = 1."""
    for n in range(limit):
        if abs(abs(coeff_a(n, P)) - 1) <= tol:
            return n
    raise TruncationError(f"no |a_n| = 1 for n < {limit}")


def finite_source(P: ParameterSet, K: int, family: str = "a") -> VerblunskySource:
    """Sequence a_0..a_K with the boundary value snapped to its sign."""
    fn = coeff_a if family == "a" else coeff_alpha
    vals = [fn(n, P) for n in range(K + 1)]
    vals[K] = float(np.sign(vals[K]))
    return VerblunskySource.from_sequence(vals, family)


def build_finite_lm(K: int, P: ParameterSet, family: str = "a"):
    """(L, M) of size K + 1; the boundary index carries the scalar a_K = +-1.

    The scalar sits in L when K is even and in M when K is odd.
    """
    fn = coeff_a if family == "a" else coeff_alpha
    aK = fn(K, P)
    if abs(abs(aK) - 1) > BOUNDARY_TOL:
        raise TruncationError(f"|{family}_{K}| = {abs(aK):.12g} is not 1")
    src = finite_source(P, K, family)
    a = src.values(K + 1)
    r = np.sqrt(np.clip(1 - a ** 2, 0.0, None))
    L = reflection_matrix(a, r, 0, K + 1, allow_partial_block=True)
    M = reflection_matrix(a, r, 1, K + 1, allow_partial_block=True)
    return L, M


@dataclass
class FiniteSpectrum:
    eigenvalues: np.ndarray
    angles: np.ndarray
    weights: np.ndarray
    norms: np.ndarray
    unitarity: float
    unimodularity: float
    conjugate_pairing: float
    weight_pairing: float
    root_residual: float
    eigvec_weight_defect: float

    def rows(self):
        return [(s, float(t), float(w)) for s, (t, w) in enumerate(zip(self.angles, self.weights))]

    def as_dict(self):
        return {"angles": [float(t) for t in self.angles], "weights": [float(w) for w in self.weights],
                "norms": [float(h) for h in self.norms], "unitarity": self.unitarity,
                "unimodularity": self.unimodularity, "conjugate_pairing": self.conjugate_pairing,
                "weight_pairing": self.weight_pairing, "root_residual": self.root_residual,
                "eigvec_weight_defect": self.eigvec_weight_defect}


def sequence_from_lm(L: np.ndarray, M: np.ndarray) -> VerblunskySource:
    """a_n is the (n, n) entry of L for even n and of M for odd n."""
    n = L.shape[0]
    return VerblunskySource.from_sequence([(L if k % 2 == 0 else M)[k, k] for k in range(n)], "finite")


def finite_spectrum(L: np.ndarray, M: np.ndarray, src: VerblunskySource | None = None,
                    gap_tol: float = 1e-9) -> FiniteSpectrum:
    """Eigen-decomposition of U = M L.

    The eigenvector of U at lambda is the Laurent vector v(lambda) in
    orthonormal scaling (L v = lambda M v and M^2 = I), so the weight, the
    squared first component of the unit eigenvector, is 1 / |v(lambda)|^2.
    This keeps small weights accurate to relative precision; the LAPACK
    eigenvector route only reaches absolute precision and is kept as a check.
    The eigenvalues are also checked as roots of Phi_{K+1}.
    """
    if src is None:
        src = sequence_from_lm(L, M)
    U = M @ L
    n = U.shape[0]
    unitarity = float(np.abs(U.conj().T @ U - np.eye(n)).max())
    lam, vecs = np.linalg.eig(U)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    theta = np.mod(np.angle(lam), 2 * np.pi)
    order = np.argsort(theta)
    lam, theta, vecs = lam[order], theta[order], vecs[:, order]
    gaps = np.abs(np.angle(lam[:, None] / lam[None, :]))
    np.fill_diagonal(gaps, np.inf)
    if n > 1 and gaps.min() < gap_tol:
        raise DegeneracyError("two eigenvalues coincide; e_0 is not cyclic")
    w = np.array([1 / np.sum(np.abs(pencil_vector(n, z, src)) ** 2) for z in lam])
    w_eig = np.abs(vecs[0]) ** 2
    # pair every eigenvalue with the one closest to its conjugate
    partner = np.argmin(np.abs(lam[:, None] - lam.conj()[None, :]), axis=1)
    pairing = float(np.abs(lam[partner] - lam.conj()).max())
    wpair = float(np.abs(w[partner] - w).max())
    phi = szego_table(n, src)[n]
    scale = float(np.abs(phi.coeffs).sum())
    vals = np.array([szego_values(n + 1, z, src)[0][n] for z in lam])
    a = src.values(n - 1)
    norms = np.concatenate(([1.0], np.cumprod(1 - a ** 2)))
    return FiniteSpectrum(lam, theta, w, norms, unitarity, float(np.abs(np.abs(lam) - 1).max()),
                          pairing, wpair, float(np.abs(vals).max() / scale),
                          float(np.abs(w_eig - w).max()))


@dataclass
class OrthogonalityReport:
    gram: np.ndarray
    norms: np.ndarray
    off_diagonal: float
    scaled_off_diagonal: float
    expected_norms: np.ndarray
    double_off_diagonal: float
    dps: int
    root_shift: float = 0.0

    def as_dict(self):
        return {"norms": [float(h) for h in self.norms], "off_diagonal": self.off_diagonal,
                "scaled_off_diagonal": self.scaled_off_diagonal,
                "double_off_diagonal": self.double_off_diagonal, "dps": self.dps,
                "root_shift": self.root_shift,
                "expected_norms": [float(h) for h in self.expected_norms]}


def _phi_and_star(z, a):
    """Phi_0..Phi_n(z) and the derivative of Phi_n, over mpmath numbers."""
    p, s, dp, ds = mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0)
    vals = [p]
    for ak in a:
        p, s, dp, ds = (z * p - ak * s, s - ak * z * p, p + z * dp - ak * ds, ds - ak * (p + z * dp))
        vals.append(p)
    return vals, dp


def refine_roots(eigenvalues, src: VerblunskySource, K: int, dps: int = ORTH_DPS, steps: int = 6):
    """Newton refinement of the roots of Phi_{K+1} from double-precision starts."""
    with mpmath.workdps(dps):
        a = [mpmath.mpf(float(x)) for x in src.values(K + 1)]
        out = []
        for lam in eigenvalues:
            z = mpmath.mpc(lam.real, lam.imag)
            for _ in range(steps):
                vals, d = _phi_and_star(z, a)
                z = z - vals[-1] / d
            out.append(z)
        return out


def finite_orthogonality(spec: FiniteSpectrum, src: VerblunskySource, N: int,
                         dps: int | None = ORTH_DPS) -> OrthogonalityReport:
    """G_nm = sum_s rho_s Phi_n(l_s) conj(Phi_m(l_s)) for n, m <= N.

    ``off_diagonal`` is max |G_nm| (n != m) over min_n G_nn, and
    ``scaled_off_diagonal`` divides each entry by sqrt(G_nn G_mm). The norms
    should equal prod_{k<n} (1 - a_k^2) for total mass 1.

    The relation is checked at the exact roots of Phi_{K+1} (K + 1 the size of
    the spectrum), refined by Newton steps in ``dps`` digits, with weights
    1 / sum_n |Phi_n|^2 / h_n taken there. In double precision the sums cancel
    down to h_N, so the defect grows like eps / h_N; that figure is kept as
    ``double_off_diagonal``. ``dps=None`` uses the double-precision spectrum.
    """
    K = len(spec.eigenvalues) - 1
    if N > K:
        raise DomainError(f"degree {N} above the truncation index {K}")
    a = src.values(N)
    expected = np.concatenate(([1.0], np.cumprod(1 - a ** 2)))
    mask = ~np.eye(N + 1, dtype=bool)

    def metrics(G):
        h = np.real(np.diag(G)).astype(float)
        if h.min() <= 0:
            raise DegeneracyError("non-positive norm in the finite Gram matrix")
        absG = np.abs(G).astype(float)
        if not N:
            return h, 0.0, 0.0
        return h, float(absG[mask].max() / h.min()), float((absG / np.sqrt(np.outer(h, h)))[mask].max())

    vals = np.array([szego_values(N + 1, z, src)[0] for z in spec.eigenvalues])  # (s, n)
    G = (vals.T * spec.weights) @ vals.conj()
    h, off_d, corr = metrics(G)
    if dps is None:
        return OrthogonalityReport(G, h, off_d, corr, expected, off_d, 16)
    with mpmath.workdps(dps):
        roots = refine_roots(spec.eigenvalues, src, K, dps)
        aK = [mpmath.mpf(float(x)) for x in src.values(K)]
        hK = [mpmath.mpf(1)]
        for x in aK:
            hK.append(hK[-1] * (1 - x * x))
        Gm = mpmath.matrix(N + 1, N + 1)
        for z in roots:
            vals_s, _ = _phi_and_star(z, aK)
            w = 1 / mpmath.fsum(abs(v) ** 2 / hn for v, hn in zip(vals_s, hK))
            for n in range(N + 1):
                for m in range(N + 1):
                    Gm[n, m] += w * vals_s[n] * mpmath.conj(vals_s[m])
        Gd = np.array([[complex(Gm[n, m]) for m in range(N + 1)] for n in range(N + 1)])
    h, off, corr = metrics(Gd)
    # the refined roots must be the eigenvalues of M L, not some other roots
    shift = max(abs(complex(z) - lam) for z, lam in zip(roots, spec.eigenvalues))
    if len({round(complex(z).real, 8) + 1j * round(complex(z).imag, 8) for z in roots}) < len(roots):
        raise DegeneracyError("Newton refinement merged two roots")
    return OrthogonalityReport(Gd, h, off, corr, expected, off_d, dps, float(shift))


def finite_check(kind: str, M: int, q: float, free_betas=None) -> dict:
    """Every finite-mode property for one truncation, as a flat report."""
    P = solve_truncation(kind, M, free_betas, q)
    cond = parse_kind(kind, M)
    K = cond.index
    L, Mm = build_finite_lm(K, P)
    src = finite_source(P, K)
    spec = finite_spectrum(L, Mm, src)
    orth = finite_orthogonality(spec, src, K)
    return {
        "beta": list(P.beta), "q": q, "index": K,
        "boundary": float(coeff_a(K, P)),
        "boundary_defect": abs(abs(coeff_a(K, P)) - 1),
        "interior_max_abs": float(max(abs(coeff_a(n, P)) for n in range(K))) if K else 0.0,
        "t_imag": float(max(abs(t.imag) for t in P.t)),
        "involution": float(max(np.abs(L @ L - np.eye(K + 1)).max(), np.abs(Mm @ Mm - np.eye(K + 1)).max())),
        "unitarity": spec.unitarity, "unimodularity": spec.unimodularity,
        "conjugate_pairing": spec.conjugate_pairing, "weight_pairing": spec.weight_pairing,
        "root_residual": spec.root_residual, "orthogonality": orth.off_diagonal, "orthogonality_double": orth.double_off_diagonal, "root_shift": orth.root_shift, "orthogonality_scaled": orth.scaled_off_diagonal,
        "eigvec_weight_defect": spec.eigvec_weight_defect,
        "norms_match": float(np.abs(orth.norms / orth.expected_norms - 1).max()),
        "min_gap": float(np.min(np.diff(np.sort(spec.angles)))) if K else float("inf"),
    }
