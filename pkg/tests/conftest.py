import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from permlab.matrix import make_matrix

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(denom: int = 8, lo: int = 0, hi: int | None = None):
    hi = denom if hi is None else hi
    from fractions import Fraction

    return st.integers(lo, hi).map(lambda k: Fraction(k, denom))


@st.composite
def nonnegative_matrices(draw, max_n: int = 5, denom: int = 8, hi: int = 8):
    n = draw(st.integers(1, max_n))
    cells = draw(st.lists(rationals(denom, 0, hi), min_size=n * n, max_size=n * n))
    return make_matrix(n, [cells[i * n:(i + 1) * n] for i in range(n)])


generators = st.integers(0, 2**32 - 1).map(np.random.default_rng)


# -- acceptance summary: one line per criterion ----------------------------------

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        num, _, label = name.removeprefix("test_criterion_").partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d} {label.replace('_', ' '):<40} {_criteria[name]}")


@pytest.fixture
def rng():
    return np.random.default_rng(20160901)
