import cmath
import math
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modspace.moduli import (
    BarrierCurve,
    IdealPoint,
    build_barrier,
    choose_numerator,
    ideal_point_from_multipliers,
    per1_line,
    real_multiplier_roots,
    representative_form,
    side_of_barrier,
)
from modspace.pcf import find_center
from modspace.ratmap import DegenerateMapError, ToleranceError, moduli_point, multiplier_cubic


@pytest.fixture(scope="module")
def barrier():
    return build_barrier(find_center(3, 1))


def test_ideal_point_examples():
    assert ideal_point_from_multipliers((0.5, 2.0, 1e6)) == IdealPoint("RealSegment", 0.5)
    u = cmath.exp(2j * math.pi / 5)
    ip = ideal_point_from_multipliers((u, u.conjugate(), 1e6))
    assert ip.variant == "UnitArc" and ip.value == pytest.approx(2 * math.pi / 5)
    assert ideal_point_from_multipliers((0.9, 1.2, 3.0), 1e3) is None


def test_ideal_point_validation():
    with pytest.raises(ValueError):
        IdealPoint("RealSegment", 1.5)
    with pytest.raises(ValueError):
        IdealPoint("Elsewhere", 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50).filter(lambda x: abs(x) > 1e-3))
def test_ideal_point_folding(mu):
    a = ideal_point_from_multipliers((mu, 1e7, 2.0))
    b = ideal_point_from_multipliers((1 / mu, 1e7, 2.0))
    if abs(mu) < 2 and abs(1 / mu) < 2:
        assert a.value == pytest.approx(b.value, abs=1e-12)


def test_per1_examples(frozen):
    for mu, (slope, icpt) in frozen["per1_lines"].items():
        line = per1_line(float(mu))
        assert line.slope == pytest.approx(slope, abs=1e-12)
        assert line.intercept == pytest.approx(icpt, abs=1e-12)


def test_per1_lines_carry_the_multiplier():
    grid = np.concatenate([-np.geomspace(0.1, 10, 40), np.geomspace(0.1, 10, 40)])
    for mu in grid:
        line = per1_line(float(mu))
        for s1 in (-20.0, -6.0, 0.0, 3.5, 40.0):
            c = multiplier_cubic(s1, line.sigma2_at(s1))
            val = ((c[0] * mu + c[1]) * mu + c[2]) * mu + c[3]
            assert abs(val) < 1e-9 * max(1.0, abs(s1) * mu * mu, abs(line.sigma2_at(s1) * mu))


def test_choose_numerator():
    assert choose_numerator(13) == 6
    assert choose_numerator(14) == 5
    assert choose_numerator(16) == 7
    for q in range(13, 501):
        p = choose_numerator(q)
        assert gcd(p, q) == 1 and q < 3 * p and 2 * p < q
    with pytest.raises(ValueError):
        choose_numerator(12)


def test_inversion_round_trip():
    rng = np.random.default_rng(4)
    done = 0
    for s1, s2 in rng.uniform(-40, 40, size=(1000, 2)):
        try:
            m = representative_form(float(s1), float(s2)).to_map()
            got = moduli_point(m)
        except (DegenerateMapError, ToleranceError):
            continue
        scale = max(1.0, abs(s1), abs(s2))
        assert math.hypot(got.sigma1 - s1, got.sigma2 - s2) < 1e-8 * scale
        done += 1
    assert done > 900


def test_inversion_uses_largest_real_multiplier():
    roots = real_multiplier_roots(-6.0, 8.0)
    nf = representative_form(-6.0, 8.0)
    assert abs(nf.mu) == pytest.approx(max(abs(r) for r in roots))


# ---------------------------------------------------------------- barrier

def test_barrier_shape(barrier):
    assert barrier.start == pytest.approx((-6.0, 8.0), abs=1e-9)
    assert len(barrier.vertices) > 20
    assert barrier.is_simple()
    assert barrier.end_ideal_angle == pytest.approx(2 * math.pi / 3, abs=0.1)


def test_barrier_examples(barrier):
    eps = 1e-3
    above = 40.0
    left = side_of_barrier((-6 - eps, above), barrier)
    right = side_of_barrier((-6 + eps, above), barrier)
    assert {left, right} == {"Left", "Right"}
    assert side_of_barrier(barrier.start, barrier) == "OnBarrier"
    lo, hi = find_center(13, 1), find_center(13, 6)
    assert side_of_barrier(lo.moduli, barrier) != side_of_barrier(hi.moduli, barrier)


def test_side_constant_along_segments(barrier):
    rng = np.random.default_rng(9)
    checked = 0
    for _ in range(60):
        a = rng.uniform([-200, -50], [50, 400])
        b = a + rng.normal(scale=5.0, size=2)
        pts = [a + (b - a) * s for s in np.linspace(0, 1, 200)]
        spacing = float(np.hypot(*(b - a))) / 199
        if min(barrier.distance(tuple(p)) for p in pts) < spacing:
            continue
        sides = {side_of_barrier(tuple(p), barrier) for p in pts}
        assert len(sides) == 1
        checked += 1
    assert checked > 30


def test_barrier_csv_round_trip(barrier):
    again = BarrierCurve.from_csv(barrier.to_csv())
    assert again.vertices == barrier.vertices


def test_barrier_validation():
    with pytest.raises(ValueError):
        BarrierCurve((0.0, 0.0), ((0.0, 0.0),))
    with pytest.raises(ValueError):
        BarrierCurve((0.0, 0.0), ((1.0, 0.0), (2.0, 0.0)))
    with pytest.raises(ValueError):
        BarrierCurve((0.0, 0.0), ((0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)))
