import json
import math

import pytest
from hypothesis import given

from conftest import infinite_params
from daha_opuc.errors import DomainError, SingularityError
from daha_opuc.params import (derive_parameters, free_case_betas, free_parameters, load_parameters,
                              parse_beta, tilde_betas)


@given(infinite_params())
def test_hecke_squares(P):
    # t_i^2 written without square roots
    b1, b2, b3, b4 = P.beta
    t1, t2, t3, t4 = P.t
    assert t1 ** 2 == pytest.approx(b4 / b1, rel=1e-13)
    assert t2 ** 2 == pytest.approx(b1 * b4, rel=1e-13)
    assert t3 ** 2 == pytest.approx(b2 * b3 / P.q, rel=1e-13)
    assert t4 ** 2 == pytest.approx(b3 / b2, rel=1e-13)
    # infinite mode: purely imaginary t, so real sigma-part vanishes
    assert all(t.real == 0 and t.imag > 0 for t in P.t)


@given(infinite_params())
def test_sigma_delta(P):
    for t, s, d in zip(P.t, P.sigma, P.delta):
        assert s + d == pytest.approx(t, rel=1e-14)
        assert s * s - d * d == pytest.approx(1, abs=1e-13)


def test_tilde_involution():
    q = 0.6
    b = (0.3, 0.4, -0.2, -0.7)
    tb = tilde_betas(b, q)
    assert tb == pytest.approx((0.4 / math.sqrt(q), 0.3 * math.sqrt(q), -0.7 * math.sqrt(q), -0.2 / math.sqrt(q)))
    # tilde twice swaps back up to the q-shifts
    assert tilde_betas(tb, q) == pytest.approx((b[0], b[1], b[2], b[3]))


def test_free_point():
    P = free_parameters(0.64)
    assert P.beta == pytest.approx(free_case_betas(0.64))
    assert all(abs(t - 1j) < 1e-15 for t in P.t)
    assert P.is_free
    assert not derive_parameters((0.6, 0.5, -0.5, -0.4), 0.7).is_free
    assert P.g == pytest.approx(0.64)


@pytest.mark.parametrize("beta, q", [
    ((0.6, 0.5, -0.5, -0.4), 1.0),
    ((0.6, 0.5, -0.5, -0.4), 0.0),
    ((1.2, 0.5, -0.5, -0.4), 0.7),
    ((0.6, 0.5, 0.5, -0.4), 0.7),
    ((0.6, 0.5, -0.5, 0.0), 0.7),
])
def test_domain_errors(beta, q):
    with pytest.raises(DomainError):
        derive_parameters(beta, q)


def test_finite_mode_signs_and_singular():
    with pytest.raises(DomainError):
        derive_parameters((0.6, 0.5, -0.5, -0.4), 0.7, "finite")
    q = 0.7
    # b1 = b4 puts a zero in the even-index denominator
    with pytest.raises(SingularityError, match="b1 - b4"):
        derive_parameters((q ** -2, 0.5, 0.3, q ** -2), q, "finite")
    with pytest.raises(DomainError):
        derive_parameters((0.6, 0.5, -0.5, -0.4), 0.7, "nonsense")


def test_parse_and_load(tmp_path):
    assert parse_beta("0.6, 0.5,-0.5,-0.4") == (0.6, 0.5, -0.5, -0.4)
    with pytest.raises(DomainError):
        parse_beta("1,2,3")
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"beta": [0.6, 0.5, -0.5, -0.4], "q": 0.7}))
    P = load_parameters(str(f))
    assert P.mode == "infinite" and P.q == 0.7
    assert P.to_dict() == {"beta": [0.6, 0.5, -0.5, -0.4], "q": 0.7, "mode": "infinite"}
