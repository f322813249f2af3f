"""Askey-Wilson polynomials from the terminating 4phi3 series, and their match
with the even/odd interval families."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError, SingularityError
from .interval import family_recurrence
from .opuc import VerblunskySource
from .params import SINGULAR_TOL, ParameterSet

IDENTIFICATIONS = ("P1", "Q1", "P2", "Q2")
SERIES_DPS = 40


def qpochhammer(a, q: float, n: int):
    """(a; q)_n = prod_{k<n} (1 - a q^k)."""
    out = 1.0
    for k in range(n):
        out = out * (1 - a * q ** k)
    return out


def shifted_betas(which: str, beta, q: float):
    """Parameter quadruple of the Askey-Wilson family matching ``which``."""
    b1, b2, b3, b4 = beta
    shifts = {"P1": (1, 1), "Q1": (q, 1), "P2": (1, q), "Q2": (q, q)}
    if which not in shifts:
        raise DomainError(f"identification must be one of {IDENTIFICATIONS}, got {which!r}")
    s1, s4 = shifts[which]
    return (b1 * s1, b2, b3, b4 * s4)


@dataclass(frozen=True)
class AWParameters:
    """Askey-Wilson parameters plus the affine map x -> sigma x + tau.

    ``sigma`` and ``tau`` are built from ``base`` (the unshifted beta_1,
    beta_4), so all four identifications share one affine map.
    """

    beta: tuple
    q: float
    base: tuple = field(default=None)

    @property
    def g(self) -> float:
        return float(np.prod(self.beta))

    @property
    def sigma(self) -> float:
        b1, b4 = (self.base or self.beta)[0], (self.base or self.beta)[3]
        return (b4 + 1 / b4 - b1 - 1 / b1) / 2

    @property
    def tau(self) -> float:
        b1 = (self.base or self.beta)[0]
        return (b1 + 1 / b1) / 2

    @property
    def support(self) -> tuple[float, float]:
        return ((1 - self.tau) / self.sigma, -(1 + self.tau) / self.sigma)

    @classmethod
    def for_identification(cls, which: str, P: ParameterSet):
        return cls(shifted_betas(which, P.beta, P.q), P.q, tuple(P.beta))


def _check_den(x, what):
    if abs(x) <= SINGULAR_TOL:
        raise SingularityError(f"vanishing factor {what} in the 4phi3 denominator")


def phi43(n: int, z, beta, q: float, dps: int = SERIES_DPS):
    """Terminating 4phi3(q^-n, g q^(n-1), b1 z, b1/z; b1 b2, b1 b3, b1 b4; q, q).

    Summed by term ratios in ``dps`` decimal digits: the terms grow like
    q^(-n k) and cancel down to O(1), which double precision cannot absorb
    beyond n of about 8. ``z`` may be an array.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    b1, b2, b3, b4 = beta
    for k in range(n):
        qk = q ** k
        for d, name in ((1 - q ** (k + 1), "q"), (1 - b1 * b2 * qk, "b1 b2"),
                        (1 - b1 * b3 * qk, "b1 b3"), (1 - b1 * b4 * qk, "b1 b4")):
            _check_den(d, f"(1 - {name} q^{k})")
    zs = np.asarray(z, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    with mpmath.workdps(dps):
        B1, B2, B3, B4, mq = (mpmath.mpf(float(v)) for v in (b1, b2, b3, b4, q))
        g = B1 * B2 * B3 * B4
        for idx, zv in np.ndenumerate(zs):
            w = mpmath.mpc(zv.real, zv.imag)
            term = total = mpmath.mpc(1)
            for k in range(n):
                qk = mq ** k
                num = (1 - mq ** (k - n)) * (1 - g * mq ** (n - 1 + k)) * (1 - B1 * w * qk) * (1 - B1 / w * qk)
                den = (1 - mq ** (k + 1)) * (1 - B1 * B2 * qk) * (1 - B1 * B3 * qk) * (1 - B1 * B4 * qk)
                term = term * num / den * mq
                total += term
            out[idx] = complex(total)
    return out if out.shape else out[()]


def leading_coefficient_closed(n: int, beta, q: float) -> float:
    """Coefficient of x^n in the 4phi3: 2^n b1^n (g q^(n-1); q)_n / (b1b2, b1b3, b1b4; q)_n."""
    b1, b2, b3, b4 = beta
    g = b1 * b2 * b3 * b4
    den = qpochhammer(b1 * b2, q, n) * qpochhammer(b1 * b3, q, n) * qpochhammer(b1 * b4, q, n)
    return 2.0 ** n * b1 ** n * qpochhammer(g * q ** (n - 1), q, n) / den


def _z_of(y):
    y = np.asarray(y, dtype=complex)
    return y + np.sqrt(y * y - 1)


def _phi43_real(n, y, beta, q):
    z = _z_of(y)
    # the series is symmetric under z -> 1/z; averaging removes branch residue
    return ((phi43(n, z, beta, q) + phi43(n, 1 / z, beta, q)) / 2).real


@lru_cache(maxsize=512)
def _leading_by_interpolation(n: int, beta: tuple, q: float) -> float:
    nodes = np.cos(np.pi * (np.arange(n + 2) + 0.5) / (n + 2))
    vals = _phi43_real(n, nodes, beta, q)
    cheb = np.polynomial.chebyshev.chebfit(nodes, vals, n + 1)
    power = np.polynomial.chebyshev.cheb2poly(cheb)
    return float(power[n]) if n < len(power) else 0.0


def leading_coefficient(n: int, aw: AWParameters) -> float:
    """Coefficient of x^n of the 4phi3, from n + 2 point Chebyshev interpolation."""
    if n == 0:
        return 1.0
    lead = _leading_by_interpolation(n, tuple(float(b) for b in aw.beta), float(aw.q))
    if lead == 0 or not np.isfinite(lead):
        raise SingularityError(f"degree {n}: leading coefficient vanishes")
    return lead


def aw_monic(n: int, x, aw: AWParameters):
    """Monic Askey-Wilson polynomial V_n(x)."""
    if n == 0:
        return np.ones_like(np.asarray(x, dtype=float))
    return _phi43_real(n, x, aw.beta, aw.q) / leading_coefficient(n, aw)


def interval_family(which: str, P: ParameterSet, n_max: int):
    src = VerblunskySource.from_params(P, "a")
    return family_recurrence(which.lower(), src, n_max + 1)


@dataclass
class IdentityReport:
    which: str
    residual: float
    per_degree: list[float]
    samples: np.ndarray

    def as_dict(self):
        return {"family": self.which, "residual": self.residual, "per_degree": self.per_degree}


def verify_circle_identity(which: str, n_max: int, samples: int, P: ParameterSet,
                           seed: int = 0, xs=None) -> IdentityReport:
    """Compare the interval recurrence route with sigma^-n V_n(sigma x + tau).

    Points are drawn uniformly from the support interval [x1, x2]; the
    residual of degree n is max |A - B| / max(1, |A|).
    """
    aw = AWParameters.for_identification(which, P)
    if xs is None:
        lo, hi = sorted(aw.support)
        xs = np.random.default_rng(seed).uniform(lo, hi, samples)
    xs = np.asarray(xs, dtype=float)
    rec = interval_family(which, P, n_max)
    route_a = rec.evaluate(n_max, xs)
    per = []
    for n in range(n_max + 1):
        route_b = aw.sigma ** -n * aw_monic(n, aw.sigma * xs + aw.tau, aw)
        per.append(float(np.max(np.abs(route_a[n] - route_b) / np.maximum(1.0, np.abs(route_a[n])))))
    return IdentityReport(which, max(per), per, xs)


def aw_spectrum(n: int, P: ParameterSet) -> float:
    """y_0 = 2 and y_{2m-1} = y_{2m} = 2 + 4 (1 - q^m)(q^-m - g/q) / ((1 - b1 b4)(1 - b2 b3 / q))."""
    if n < 0:
        raise DomainError("index must be non-negative")
    if n == 0:
        return 2.0
    b1, b2, b3, b4 = P.beta
    q, g = P.q, P.g
    den = (1 - b1 * b4) * (1 - b2 * b3 / q)
    if abs(den) <= SINGULAR_TOL:
        raise SingularityError("vanishing denominator (1 - b1 b4)(1 - b2 b3 / q)")
    m = (n + 1) // 2
    return 2 + 4 * (1 - q ** m) * (q ** -m - g / q) / den


def aw_spectrum_array(n: int, P: ParameterSet) -> np.ndarray:
    return np.array([aw_spectrum(k, P) for k in range(n)])
