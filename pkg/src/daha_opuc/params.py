"""Parameter family (beta_1..beta_4, q) and the scalars derived from it."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, SingularityError

MODES = ("infinite", "finite", "free-boundary")
_MODE_ALIASES = {"free": "free-boundary"}

# relative distance below which a denominator is treated as zero
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class ParameterSet:
    """Immutable parameter point of the representation.

    ``t``, ``sigma`` and ``delta`` are complex: purely imaginary ``t`` in the
    infinite-dimensional regime, real ``t`` in the finite one.
    """

    beta: tuple[float, float, float, float]
    q: float
    mode: str
    Q: float
    t: tuple[complex, complex, complex, complex]
    sigma: tuple[complex, complex, complex, complex]
    delta: tuple[complex, complex, complex, complex]
    g: float
    tilde_beta: tuple[float, float, float, float]
    depth: int = 64

    def to_dict(self) -> dict:
        return {"beta": list(self.beta), "q": self.q, "mode": self.mode}

    @property
    def is_free(self) -> bool:
        ref = free_case_betas(self.q)
        return all(abs(a - b) < 1e-14 for a, b in zip(ref, self.beta))


def tilde_betas(beta: Sequence[float], q: float) -> tuple[float, float, float, float]:
    """Parameters of the adjacent (alpha) family."""
    b1, b2, b3, b4 = beta
    sq = math.sqrt(q)
    return (b2 / sq, b1 * sq, b4 * sq, b3 / sq)


def hecke_parameters(beta: Sequence[float], q: float) -> tuple[complex, ...]:
    """t_1..t_4 from the betas, principal square roots throughout."""
    b1, b2, b3, b4 = (float(b) for b in beta)
    Q = q ** -0.5
    return (
        1j * cmath.sqrt(-b4 / b1),
        1j * cmath.sqrt(-b1 * b4),
        1j * Q * cmath.sqrt(-b2 * b3),
        1j * cmath.sqrt(-b3 / b2),
    )


def free_case_betas(q: float) -> tuple[float, float, float, float]:
    sq = math.sqrt(q)
    return (1.0, sq, -sq, -1.0)


def _check_mode(beta, mode):
    b1, b2, b3, b4 = beta
    if mode == "infinite":
        ok = 0 < b1 < 1 and 0 < b2 < 1 and -1 < b3 < 0 and -1 < b4 < 0
        if not ok:
            raise DomainError(
                f"infinite mode needs 0<b1,b2<1 and -1<b3,b4<0, got {beta}")
    elif mode == "free-boundary":
        ok = 0 < b1 <= 1 and 0 < b2 < 1 and -1 < b3 < 0 and -1 <= b4 < 0
        if not ok:
            raise DomainError(
                f"free-boundary mode needs 0<b1<=1, 0<b2<1, -1<b3<0, -1<=b4<0, got {beta}")
    elif mode == "finite":
        # real t_i and positive rho_n^2 need b1*b4 > 0 and b2*b3 > 0
        if not (b1 * b4 > 0 and b2 * b3 > 0):
            raise DomainError(
                f"finite mode needs b1*b4 > 0 and b2*b3 > 0, got {beta}")
    else:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def _near_zero(x: float, scale: float = 1.0) -> bool:
    return abs(x) <= SINGULAR_TOL * max(1.0, abs(scale))


def singular_indices(beta: Sequence[float], q: float, depth: int) -> list[str]:
    """Names of the denominators of the closed forms that vanish up to ``depth``."""
    b1, b2, b3, b4 = beta
    g = b1 * b2 * b3 * b4
    bad = []
    if _near_zero(b1 - b4, b1):
        bad.append("b1 - b4")
    if _near_zero(1 - b1 * b4):
        bad.append("1 - b1*b4")
    if _near_zero(b2 - b3, b2):
        bad.append("b2 - b3")
    if _near_zero(1 - b2 * b3 / q):
        bad.append("1 - b2*b3/q")
    for k in range(0, depth + 1):
        if _near_zero(1 - g * q ** k):
            bad.append(f"1 - g*q^{k}")
    return bad


def derive_parameters(beta: Sequence[float], q: float, mode: str = "infinite",
                      depth: int = 64) -> ParameterSet:
    """Validate ``beta`` for ``mode`` and compute every derived scalar.

    ``depth`` bounds the index range scanned for vanishing denominators
    ``1 - g q^k``; use the largest matrix size needed downstream.
    """
    mode = _MODE_ALIASES.get(mode, mode)
    beta = tuple(float(b) for b in beta)
    if len(beta) != 4:
        raise DomainError("beta must have four entries")
    q = float(q)
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if any(b == 0 for b in beta):
        raise DomainError("beta entries must be nonzero")
    _check_mode(beta, mode)
    bad = singular_indices(beta, q, depth)
    if bad:
        raise SingularityError("vanishing denominator(s): " + ", ".join(bad))

    t = hecke_parameters(beta, q)
    sigma = tuple((ti + 1 / ti) / 2 for ti in t)
    delta = tuple((ti - 1 / ti) / 2 for ti in t)
    b1, b2, b3, b4 = beta
    return ParameterSet(
        beta=beta, q=q, mode=mode, Q=q ** -0.5, t=t, sigma=sigma, delta=delta,
        g=b1 * b2 * b3 * b4, tilde_beta=tilde_betas(beta, q), depth=depth)


def free_parameters(q: float, depth: int = 64) -> ParameterSet:
    """The point t_1 = t_2 = t_3 = t_4 = i where every Verblunsky coefficient vanishes."""
    return derive_parameters(free_case_betas(q), q, "free-boundary", depth)


def parse_beta(text: str) -> tuple[float, float, float, float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 4:
        raise DomainError(f"--beta expects four comma separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def load_parameters(path: str, depth: int = 64) -> ParameterSet:
    """Read ``{"beta": [...], "q": ..., "mode": ...}`` from a JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    return derive_parameters(doc["beta"], doc["q"], doc.get("mode", "infinite"), depth)
