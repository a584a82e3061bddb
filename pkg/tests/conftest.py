import numpy as np
import pytest
from hypothesis import settings, strategies as st

from qdiff.gaussian import random_state

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
modes = st.integers(min_value=1, max_value=3)


@st.composite
def gaussian_states(draw, centered=False, n=None, nu_min=0.5 + 1e-3, nu_max=10.0, max_squeeze=1.0):
    n = draw(modes) if n is None else n
    rng = np.random.default_rng(draw(seeds))
    return random_state(n, rng, (nu_min, nu_max), max_squeeze, centered)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
