import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as C

from conftest import infinite_params
from daha_opuc import interval
from daha_opuc.errors import DomainError, PositivityError
from daha_opuc.opuc import VerblunskySource
from daha_opuc.params import free_parameters

xs = np.linspace(-0.95, 0.95, 17)


@pytest.mark.parametrize("n", range(8))
def test_chebyshev_reference(n):
    # monic T_n from numpy's Chebyshev basis
    T = C.chebval(xs, np.eye(n + 1)[n]) / (2.0 ** (n - 1) if n else 1.0)
    assert np.allclose(interval.chebyshev_monic("T", n, xs), T, atol=1e-14)
    U = np.polynomial.Polynomial(C.cheb2poly(np.eye(n + 2)[n + 1]).tolist()).deriv()(xs) / (n + 1) / 2.0 ** n
    assert np.allclose(interval.chebyshev_monic("U", n, xs), U, atol=1e-13)


def test_free_v():
    src = VerblunskySource.from_params(free_parameters(0.64), "a")
    v1, v2 = interval.v1(src, 8), interval.v2(src, 8)
    assert v1[1] == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(v1[2:], 0.25, atol=1e-15)
    assert np.allclose(v2[1:], 0.25, atol=1e-15)


@given(infinite_params())
def test_positive_recurrences(P):
    src = VerblunskySource.from_params(P, "a")
    for fam in ("s1", "s2", "s3", "p1", "q1", "p2", "q2"):
        interval.family_recurrence(fam, src, 16).check_positive(16)


@given(infinite_params())
def test_christoffel(P):
    src = VerblunskySource.from_params(P, "a")
    ch = interval.christoffel_checks(src, 12, xs)
    assert max(ch.values()) < 1e-10
    assert max(interval.split_check(f, src, 12, xs) for f in (1, 2)) < 1e-10


@given(infinite_params())
def test_split_closed_forms(P):
    src = VerblunskySource.from_params(P, "a")
    for fam in (1, 2):
        v = (interval.v1 if fam == 1 else interval.v2)(src, 2 * 10 + 3)
        for a, b in zip(interval.split_coefficients(v, 10), interval.split_closed_forms(fam, src, 10)):
            assert np.allclose(a, b, atol=1e-15)


@given(infinite_params(), st.sampled_from(["s1", "s2", "s3"]))
def test_gauss_measure_orthogonality(P, fam):
    src = VerblunskySource.from_params(P, "a")
    rec = interval.family_recurrence(fam, src, 40)
    mu = interval.spectral_measure(rec, 40)
    assert interval.orthogonality_defect(rec, mu, 12) < 1e-10
    assert mu.weights.sum() == pytest.approx(1)
    assert np.all(np.abs(mu.nodes) < 1 + 1e-12)


def test_jacobi_from_reflections(generic):
    # (R1 + R2) / 2 is the Jacobi matrix of S^(3)
    J = interval.jacobi_from_reflections(24, generic).entries / 2
    rec = interval.family_recurrence("s3", VerblunskySource.from_params(generic, "a"), 24)
    assert np.allclose(J[:22, :22], rec.jacobi(22), atol=1e-15)


def test_errors():
    src = VerblunskySource.from_params(free_parameters(0.5), "a")
    with pytest.raises(DomainError):
        interval.family_recurrence("s4", src, 4)
    with pytest.raises(DomainError):
        interval.chebyshev_monic("W", 2, xs)
    rec = interval.ThreeTermRecurrence(np.zeros(3), np.array([0.0, -1.0, 0.5]), "bad")
    with pytest.raises(PositivityError):
        rec.jacobi(3)
    with pytest.raises(DomainError):
        rec.evaluate(5, xs)
