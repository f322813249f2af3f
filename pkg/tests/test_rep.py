from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GENERIC_BETA, GENERIC_Q, infinite_params
from daha_opuc import rep
from daha_opuc.errors import DomainError, WindowError
from daha_opuc.params import derive_parameters, free_parameters


def a_exact(n, beta, q):
    """Closed form in rational arithmetic."""
    b1, b2, b3, b4 = (Fraction(str(b)) for b in beta)
    q = Fraction(str(q))
    g = b1 * b2 * b3 * b4
    if n % 2 == 0:
        m = n // 2
        return 1 - 2 * b1 * (1 - b2 * b4 * q ** m) * (1 - b3 * b4 * q ** m) / ((b1 - b4) * (1 - g * q ** (2 * m)))
    m = (n + 1) // 2
    return 1 - 2 * (1 - g * q ** (m - 1)) * (1 - b1 * b4 * q ** m) / ((1 - b1 * b4) * (1 - g * q ** (2 * m - 1)))


def test_a0_value(generic):
    assert rep.coeff_a(0, generic) == pytest.approx(-53 / 235, rel=1e-15)
    assert a_exact(0, GENERIC_BETA, GENERIC_Q) == Fraction(-53, 235)


def test_against_rationals(generic):
    for n in range(12):
        assert rep.coeff_a(n, generic) == pytest.approx(float(a_exact(n, GENERIC_BETA, GENERIC_Q)), abs=1e-15)
        assert rep.coeff_alpha(n, generic) == pytest.approx(
            float(a_exact(n, generic.tilde_beta, GENERIC_Q)), abs=1e-14)


@given(infinite_params(), st.integers(0, 40))
def test_coefficients_in_disk(P, n):
    assert abs(rep.coeff_a(n, P)) < 1
    assert abs(rep.coeff_alpha(n, P)) < 1


@given(infinite_params(), st.integers(0, 40))
def test_r_squared(P, n):
    a = rep.coeff_a(n, P)
    assert rep.r_squared_closed(n, P) == pytest.approx(1 - a * a, abs=1e-14)


@given(infinite_params(), st.integers(0, 30))
def test_rho_ratio(P, n):
    # rho_n^2 = 1 - alpha_n^2 against the ratio formula
    al = rep.coeff_alpha(n, P)
    assert (1 - al ** 2) == pytest.approx(rep.rho_ratio(n, P) * rep.r_squared_closed(n, P), rel=1e-10, abs=1e-14)


def test_boundary_values(generic):
    assert rep.verblunsky(-1, generic.beta, generic.q) == -1.0
    c = rep.rep_coefficients(generic, 8)
    assert c.a_at(-1) == -1 and c.a_at(-3) == 0


def test_gauge(generic):
    c = rep.rep_coefficients(generic, 10)
    xi1 = c.xi1
    for n in range(5):
        assert c.z[2 * n] == pytest.approx(generic.Q ** -n)
        assert c.z[2 * n + 1] == pytest.approx(xi1 * generic.Q ** n)


@given(infinite_params(depth=32))
def test_reflection_structure(P):
    N = 32
    for w in ("R1", "R2", "R3", "R4"):
        R = rep.build_reflection(w, N, P)
        assert R.band_violation() == 0
        # R3, R4 stay similar to symmetric matrices through the gauge
        if w in ("R3", "R4"):
            S = rep.build_reflection(w, N, P, symmetric=True).entries
            assert np.allclose(S, S.T)
    sc = rep.scaled_relation_residuals(N, P)
    assert sc["involution"] < 1e-13 and sc["quadratic"] < 1e-12


@given(infinite_params(q=st.floats(0.5, 0.95), depth=32))
def test_product_relation(P):
    rpt = rep.verify_product_relation(32, P)
    assert rpt.scaled_residual < 1e-13
    assert rpt.extra["full_scaled"] < 1e-13


def test_product_relation_fails_off_relation(generic):
    # perturb one generator: the relation must notice
    c = rep.rep_coefficients(generic, 32)
    T = [rep.build_T(i, 32, generic, coeffs=c).entries for i in range(1, 5)]
    T[0] = T[0] * 1.001
    E = T[0] @ T[1] @ T[2] @ T[3] - generic.Q * np.eye(32)
    assert np.abs(E[:20, :20]).max() > 1e-4


def test_T_inverse(generic):
    T = rep.build_T(2, 16, generic, allow_partial_block=True).entries
    Ti = rep.build_T(2, 16, generic, inverse=True, allow_partial_block=True).entries
    assert np.abs(T @ Ti - np.eye(16)).max() < 1e-14


def test_derivation(generic):
    d = rep.verify_derivation_system(64, generic)
    assert max(d[k] for k in rep.DERIVATION_FAMILIES) < 1e-11
    assert d["res_gd"] < 1e-13


def test_free_relation():
    for q in (0.3, 0.64, 0.9):
        assert rep.free_relation_residual(64, free_parameters(q))["scaled"] < 1e-13
    # away from the free point R1 R2 = Q R4 R3 is false
    assert rep.free_relation_residual(64, derive_parameters(GENERIC_BETA, GENERIC_Q))["scaled"] > 1e-3


def test_errors(generic):
    with pytest.raises(WindowError):
        rep.verify_product_relation(8, generic)
    with pytest.raises(DomainError):
        rep.build_reflection("R1", 7, generic)
    with pytest.raises(DomainError):
        rep.build_reflection("R5", 8, generic)
    rep.build_reflection("R1", 7, generic, allow_partial_block=True)
