import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from daha_opuc.errors import DahaError
from daha_opuc.params import derive_parameters

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("default")

GENERIC_BETA = (0.6, 0.5, -0.5, -0.4)
GENERIC_Q = 0.7

unit = st.floats(0.05, 0.95)
qs = st.floats(0.3, 0.95)


@st.composite
def infinite_params(draw, q=qs, depth=64):
    b = (draw(unit), draw(unit), -draw(unit), -draw(unit))
    qq = draw(q)
    try:
        return derive_parameters(b, qq, depth=depth)
    except DahaError:
        from hypothesis import reject
        reject()


@pytest.fixture
def generic():
    return derive_parameters(GENERIC_BETA, GENERIC_Q)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])


@pytest.fixture
def rng():
    return np.random.default_rng(0)
