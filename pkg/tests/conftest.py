import numpy as np
import pytest

from polyint import make_ball, make_ellipsoid, make_superellipsoid
from polyint.spherical import random_rotation


@pytest.fixture
def ball3():
    return make_ball(3)


@pytest.fixture
def ellipsoid123():
    R = random_rotation(3, np.random.default_rng(7))
    return make_ellipsoid([1.0, 2.0, 3.0], [0.2, -0.1, 0.3], R)


@pytest.fixture
def superball4():
    return make_superellipsoid([1.0, 1.0, 1.0], 4.0)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one summary line per acceptance criterion; printed at the end of the run."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
