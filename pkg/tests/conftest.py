import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from modspace.ratmap import DegenerateMapError, QuadMap  # noqa: E402

import oracles  # noqa: E402


@pytest.fixture(scope="session")
def frozen():
    return oracles.load()


coeff = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def quad_maps(draw):
    """Well-conditioned random maps: resultant bounded away from zero."""
    c = [draw(coeff) for _ in range(6)]
    try:
        m = QuadMap(*c)
    except DegenerateMapError:
        m = None
    if m is None or abs(m.resultant()) < 1e-2:
        m = QuadMap(1.0, c[1], 0.5, 0.0, 1.0, c[5] + 2.5)
    return m


@st.composite
def mobius(draw):
    a, b, c, d = (draw(st.floats(-2.0, 2.0)) for _ in range(4))
    if abs(a * d - b * c) < 0.2:
        a, d = a + 1.0, d + 1.0
        if abs(a * d - b * c) < 0.2:
            a, b, c, d = 1.0, 0.3, -0.2, 1.0
    return ((a, b), (c, d))


def random_maps(n, seed):
    """Deterministic batch of random maps with bounded conditioning."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        c = rng.normal(size=6)
        try:
            m = QuadMap(*c)
        except DegenerateMapError:
            continue
        if abs(m.resultant()) > 1e-2:
            out.append(m)
    return out


def random_mobius(rng):
    while True:
        a, b, c, d = rng.normal(size=4)
        if abs(a * d - b * c) > 0.2:
            return ((a, b), (c, d))


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
