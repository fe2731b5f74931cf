import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minlab.core.exceptions import DepthError, InvalidPointError, PreconditionError
from minlab.models.circle import CantorPoint, CirclePoint, GapPoint, Side, denjoy_build
from minlab.models.suspension import (
    DenjoyCantor,
    Odometer,
    OdometerWord,
    SuspensionPoint,
    certify_minimal_time,
    flow,
    odometer_cylinder_census,
    suspend,
    time_t_map,
)
from minlab.schemas.reports import VERDICT_DENSE


def test_odometer_adds_one_with_carry():
    odometer = Odometer(4)
    word = OdometerWord((1, 1, 0, 0))
    assert odometer.step(word, 1).digits == (0, 0, 1, 0)
    assert odometer.step(OdometerWord((1, 1, 1, 1)), 1).digits == (0, 0, 0, 0)


def test_odometer_distance_is_first_differing_digit():
    odometer = Odometer(4)
    a = OdometerWord((0, 0, 0, 0))
    assert odometer.distance(a, OdometerWord((1, 0, 0, 0))) == 1.0
    assert odometer.distance(a, OdometerWord((0, 0, 1, 0))) == 0.25
    assert odometer.distance(a, a) == 0.0


def test_cylinder_census_visits_every_cylinder_once():
    counts = odometer_cylinder_census(8)
    assert counts.size == 256
    assert np.all(counts == 1)


def test_flow_then_reverse_flow_returns(golden):
    system = suspend(Odometer(12))
    p = system.point(OdometerWord.from_value(17, 12), 0.3)
    back = flow(system, flow(system, p, 7.25), -7.25)
    assert back.base == p.base
    assert back.s == pytest.approx(p.s, abs=1e-12)


def test_flow_wraps_into_next_base_point():
    system = suspend(Odometer(8))
    p = flow(system, SuspensionPoint(OdometerWord.from_value(3, 8), 0.5), 1.75)
    assert p.base.value == 5
    assert p.s == pytest.approx(0.25)


def test_flow_beyond_headroom_names_a_depth():
    system = suspend(Odometer(4))
    with pytest.raises(DepthError) as excinfo:
        flow(system, SuspensionPoint(system.h.origin(), 0.0), 10.0)
    assert excinfo.value.suggested_depth == 6


def test_time_t_map_needs_positive_time():
    system = suspend(Odometer(8))
    with pytest.raises(PreconditionError):
        time_t_map(system, 0.0)
    assert time_t_map(system, 0.5).t == 0.5


def test_suspension_height_must_be_below_one():
    with pytest.raises(InvalidPointError):
        SuspensionPoint(OdometerWord.from_value(0, 4), 1.0)


def test_golden_time_map_is_dense_on_depth_eight(golden):
    report = certify_minimal_time(suspend(Odometer(8)), golden, 1.0 / 32.0, 1_000_000)
    assert report.dense
    assert report.verdict == VERDICT_DENSE
    assert report.cells_total == 256 * 32
    assert report.covering_radius <= 1.0 / 32.0


def test_short_horizon_is_not_dense(golden):
    report = certify_minimal_time(suspend(Odometer(8)), golden, 1.0 / 32.0, 100)
    assert not report.dense
    assert report.cells_missed > 0


def test_denjoy_cantor_maps_gap_endpoints_to_cantor_points(denjoy):
    h = DenjoyCantor(denjoy)
    point = h.validate(GapPoint(1, 2, 1.0))
    assert point.side is Side.RIGHT
    assert point.base == denjoy.orbit_point(1, 2)
    with pytest.raises(InvalidPointError):
        h.validate(GapPoint(1, 2, 0.5))


def test_denjoy_suspension_distance_is_symmetric(denjoy, rng):
    system = suspend(DenjoyCantor(denjoy))
    a = system.point(CantorPoint(CirclePoint(0.2)), 0.1)
    b = system.point(CantorPoint(CirclePoint(0.7)), 0.9)
    assert system.distance(a, b) == pytest.approx(system.distance(b, a))
    assert system.distance(a, a) == 0.0


ODOMETER_FLOW = suspend(Odometer(10))
DENJOY_FLOW = suspend(DenjoyCantor(denjoy_build(math.pi - 3.0, [0.0, 0.3], depth=64)))

heights = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)


def _denjoy_point(angle, s):
    base = CirclePoint(angle)
    side = Side.LEFT if DENJOY_FLOW.h.system.locate(base) else None
    return DENJOY_FLOW.point(CantorPoint(base, side), s)


def _odometer_point(value, s):
    return ODOMETER_FLOW.point(OdometerWord.from_value(value, 10), s)


odometer_points = st.builds(_odometer_point, st.integers(0, 1023), heights)
denjoy_points = st.builds(
    _denjoy_point, st.floats(min_value=0.0, max_value=1.0, exclude_max=True), heights
)


@settings(max_examples=300, deadline=None)
@given(odometer_points, odometer_points, odometer_points)
def test_odometer_suspension_distance_is_a_metric(a, b, c):
    d = ODOMETER_FLOW.distance
    assert d(a, b) == pytest.approx(d(b, a), abs=1e-15)
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-12


@settings(max_examples=300, deadline=None)
@given(denjoy_points, denjoy_points, denjoy_points)
def test_denjoy_suspension_distance_is_a_metric(a, b, c):
    d = DENJOY_FLOW.distance
    assert d(a, b) == pytest.approx(d(b, a), abs=1e-15)
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-12


def test_denjoy_suspension_triangle_across_the_seam():
    a = _denjoy_point(0.2804, 0.2430)
    b = _denjoy_point(0.9511, 0.9064)
    c = _denjoy_point(0.6598, 0.9064)
    d = DENJOY_FLOW.distance
    assert d(a, c) <= d(a, b) + d(b, c)


def test_odometer_suspension_distance_at_height_zero_is_the_base_metric():
    a = _odometer_point(0, 0.0)
    b = _odometer_point(4, 0.0)
    assert ODOMETER_FLOW.distance(a, b) == ODOMETER_FLOW.h.distance(a.base, b.base) == 0.25


def test_suspension_distance_is_continuous_across_the_seam():
    h = ODOMETER_FLOW.h
    x = OdometerWord.from_value(5, 10)
    below = SuspensionPoint(x, 1.0 - 1e-9)
    above = SuspensionPoint(h.step(x, 1), 0.0)
    assert ODOMETER_FLOW.distance(below, above) < 1e-8
    assert ODOMETER_FLOW.distance(below, SuspensionPoint(x, 0.0)) > 0.5
