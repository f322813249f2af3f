import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GENERIC_BETA, infinite_params
from daha_opuc import askey_wilson as aw
from daha_opuc.errors import DomainError, SingularityError
from daha_opuc.params import free_parameters


def test_qpochhammer():
    assert aw.qpochhammer(0.5, 0.3, 0) == 1
    assert aw.qpochhammer(0.5, 0.3, 3) == pytest.approx(0.5 * 0.85 * 0.955)


def test_phi43_degree_one():
    b, q = (0.6, 0.5, -0.5, -0.4), 0.7
    b1, b2, b3, b4 = b
    g = np.prod(b)
    z = 0.3 + 0.9j
    ref = 1 + (1 - 1 / q) * (1 - g) * (1 - b1 * z) * (1 - b1 / z) * q / (
        (1 - q) * (1 - b1 * b2) * (1 - b1 * b3) * (1 - b1 * b4))
    assert aw.phi43(1, z, b, q) == pytest.approx(ref, rel=1e-14)
    assert aw.phi43(0, z, b, q) == 1


@given(st.integers(1, 8), st.floats(0.1, 3.0), st.floats(0, 6.3))
@settings(max_examples=15)
def test_z_symmetry(n, r, t):
    z = r * np.exp(1j * t)
    assert aw.phi43(n, z, GENERIC_BETA, 0.7) == pytest.approx(aw.phi43(n, 1 / z, GENERIC_BETA, 0.7), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_leading_coefficient(n):
    awp = aw.AWParameters(GENERIC_BETA, 0.7)
    assert aw.leading_coefficient(n, awp) == pytest.approx(aw.leading_coefficient_closed(n, GENERIC_BETA, 0.7),
                                                           rel=1e-8)


@given(infinite_params(q=st.floats(0.3, 0.9)), st.sampled_from(aw.IDENTIFICATIONS))
@settings(max_examples=8)
def test_identification(P, which):
    assert aw.verify_circle_identity(which, 8, 10, P).residual < 1e-9


def test_spectrum(generic):
    y = aw.aw_spectrum_array(11, generic)
    assert y[0] == 2
    assert np.array_equal(y[1::2], y[2::2])
    q = 0.64
    free = aw.aw_spectrum_array(9, free_parameters(q))
    m = (np.arange(9) + 1) // 2
    assert np.allclose(free, q ** m + q ** -m, rtol=1e-14)


def test_errors():
    with pytest.raises(DomainError):
        aw.shifted_betas("P3", GENERIC_BETA, 0.7)
    with pytest.raises(SingularityError):
        aw.phi43(2, 0.5, (1.0, 1.0, -0.5, -0.4), 0.7)
    with pytest.raises(DomainError):
        aw.phi43(-1, 0.5, GENERIC_BETA, 0.7)
