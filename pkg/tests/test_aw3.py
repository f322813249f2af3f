import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import infinite_params
from daha_opuc import aw3
from daha_opuc import askey_wilson as aw
from daha_opuc.errors import DomainError, StructureError, WindowError
from daha_opuc.params import free_parameters


def test_diagonalizer_orthogonal(generic):
    S = aw3.build_diagonalizer(32, generic).S
    assert np.abs(S @ S - np.eye(32)).max() < 1e-15


def test_xy_structure(generic):
    xy = aw3.build_xy(64, generic)
    st_ = aw3.x_structure(xy)
    scale = np.abs(xy.X.interior()).max()
    assert st_["x_first_off"] < 1e-12 * scale
    assert st_["x_beyond_band"] < 1e-12 * scale
    # R2~ is diagonal +-1
    R = xy.R2[: xy.window, : xy.window]
    assert np.abs(R - np.diag(np.diag(R))).max() < 1e-14
    assert np.allclose(np.abs(np.diag(R)), 1)


def test_x_closed_form(generic):
    xy = aw3.build_xy(64, generic)
    A, B = aw3.x_entries(generic, xy.window)
    X = xy.X.entries.real
    w = xy.window
    assert np.allclose(np.diag(X)[:w], B[:w], atol=1e-12)
    assert np.allclose(np.diag(X, 2)[: w - 2], A[2:w], atol=1e-12)


@given(infinite_params(q=st.floats(0.4, 0.9)))
@settings(max_examples=10)
def test_y_spectrum(P):
    xy = aw3.build_xy(48, P)
    y = aw.aw_spectrum_array(xy.window, P)
    assert np.max(np.abs(xy.y[: xy.window] - y) / np.maximum(1, np.abs(y))) < 1e-11


@given(infinite_params(q=st.floats(0.4, 0.9)))
@settings(max_examples=10)
def test_fits(P):
    xy = aw3.build_xy(64, P)
    fe = aw3.fit_structure_constants("even", xy)
    fo = aw3.fit_structure_constants("odd", xy)
    assert max(fe.residual, fo.residual, fe.consistency, fo.consistency) < 1e-8
    assert max(aw3.central_extension_residual(xy, fe, fo).values()) < 1e-8


@pytest.mark.parametrize("q", [0.3, 0.64, 0.9])
def test_free_constants(q):
    xy = aw3.build_xy(64, free_parameters(q))
    target = -(q - 1 / q) ** 2
    for sector in ("even", "odd"):
        c = aw3.fit_structure_constants(sector, xy).c
        assert c[3] == pytest.approx(target, rel=1e-9)
        assert c[5] == pytest.approx(target, rel=1e-9)
        assert np.abs(c[[0, 1, 2, 4, 6]]).max() < 1e-9


@pytest.mark.parametrize("q", [0.3, 0.64, 0.9])
def test_free_casimir(q):
    rpt = aw3.casimir_free(64, q)
    assert rpt.is_scalar
    assert rpt.scalar == pytest.approx(2 * (q ** 2 - q ** -2) * (q - 1 / q), rel=1e-9)


def test_casimir_mix():
    # the square of (q + 1/q) as the mixing coefficient leaves a non-scalar operator
    q = 0.64
    assert not aw3.casimir_free(64, q, mix=(q + 1 / q) ** 2 / 2).is_scalar


def test_errors(generic):
    with pytest.raises(WindowError):
        aw3.build_xy(16, generic)
    with pytest.raises(DomainError):
        aw3.require_free(generic)
    xy = aw3.build_xy(64, generic)
    with pytest.raises(DomainError):
        aw3.fit_structure_constants("middle", xy)
    # weight on the first off-diagonal couples the parity sectors
    xy.X.entries[3, 4] += 1e-3
    with pytest.raises(StructureError):
        aw3.split_sectors(xy)
