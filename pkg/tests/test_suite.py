import pytest

from daha_opuc import suite


@pytest.mark.parametrize("preset, q", [("free", 0.64), ("free", 0.3), ("generic", None), ("truncation", None)])
def test_presets_pass(preset, q):
    rpt = suite.run_suite(preset, q=q)
    bad = [c["name"] for c in rpt["checks"] if not c["passed"]]
    assert rpt["passed"], bad


def test_unknown_preset():
    with pytest.raises(ValueError):
        suite.run_suite("everything")


def test_draws_reproducible():
    a = [P.beta for P in suite.random_draws(5, 3)]
    b = [P.beta for P in suite.random_draws(5, 3)]
    assert a == b
    assert a != [P.beta for P in suite.random_draws(5, 4)]
    for P in suite.random_draws(20, 1):
        assert 0.8 <= P.q <= 0.95 and P.mode == "infinite"


def test_check_nan_fails():
    assert not suite.Check("x", float("nan"), 1.0).passed
    assert suite.Check("x", 0.5, 1.0).as_dict()["passed"]
