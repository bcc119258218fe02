import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def small_values(min_size=1, max_size=5, high=8):
    """Small positive rationals; the narrow range makes ties frequent."""
    return st.lists(
        st.builds(Fraction, st.integers(1, high * 2), st.sampled_from([1, 2])),
        min_size=min_size,
        max_size=max_size,
    )


def concave_caps(n):
    """Concave nondecreasing caps with c(1) = 1."""
    return st.lists(st.integers(0, 4), min_size=n - 1, max_size=n - 1).map(
        lambda incs: _caps_from(sorted(incs, reverse=True))
    )


def _caps_from(incs):
    cap, total = [Fraction(1)], Fraction(1)
    for d in incs:
        total += Fraction(d, 4)
        cap.append(total)
    return cap


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
