import math

import pytest

from minlab.core.exceptions import (
    AperiodicityError,
    ChartSingularityError,
    EquivarianceError,
    InvalidPointError,
    ModeError,
    UndefinedDirectionError,
)
from minlab.models.blowup import (
    BlownIndexSet,
    Fiber,
    FiberKind,
    IntervalU,
    KleinBase,
    Regular,
    SkewBase,
    SuspensionBase,
    TowerT,
    almost_one_to_one_report,
    build_stage,
    coarsen,
    cone_coordinate,
    direction_coordinate,
    fiber_diameter,
    fiber_extremes,
    fiber_orbit_diameters,
    klein_lift_defect,
    noninvertibility_witness,
    sample_stage_points,
    stage_map,
    stage_metric,
    stage_project,
    stage_refine,
    validate_point,
)
from minlab.models.skew import (
    Direction,
    RoofFunction,
    SkewSystem,
    TorusPoint,
    klein_involution,
    klein_project,
    slope_transport,
)
from minlab.models.suspension import Odometer, suspend


def test_index_sets():
    assert len(BlownIndexSet.two_sided(8)) == 17
    assert BlownIndexSet.backward_only(4).indices == (-4, -3, -2, -1)
    assert BlownIndexSet.two_sided(3).outermost == (-3, 3)


def test_stage_has_one_fiber_per_index(two_sided_stage, backward_stage):
    assert two_sided_stage.fiber_count == 17
    assert backward_stage.fiber_count == 4
    assert coarsen(two_sided_stage).fiber_count == 15


def test_last_backward_fiber_collapses_onto_the_seed(backward_stage):
    image = stage_map(backward_stage, Fiber(-1, IntervalU(0.3)))
    assert image == Regular(backward_stage.z(0))


def test_noninvertibility_witness(backward_stage):
    witness = noninvertibility_witness(backward_stage)
    assert witness.separation == pytest.approx(0.5, abs=1e-15)
    assert witness.image_distance == 0.0
    assert witness.images_equal


def test_two_sided_stage_has_no_witness(two_sided_stage):
    with pytest.raises(ModeError):
        noninvertibility_witness(two_sided_stage)


def test_fiber_diameters(two_sided_stage):
    assert fiber_diameter(two_sided_stage, 3) == 0.25
    assert fiber_diameter(two_sided_stage, -3) == 0.25
    expected = [2 * 0.5**6, 2 * 0.5**7, 2 * 0.5**8, 0.0]
    assert fiber_orbit_diameters(two_sided_stage, 6, 3) == expected
    a, b = fiber_extremes(two_sided_stage, 2)
    assert stage_metric(two_sided_stage, a, b) == fiber_diameter(two_sided_stage, 2)


def test_fiber_transport_follows_roof_derivative(two_sided_stage):
    image = stage_map(two_sided_stage, Fiber(0, IntervalU(0.0)))
    expected = Direction.from_slope(0.05 * 2.0 * math.pi).u
    assert isinstance(image, Fiber) and image.index == 1
    assert image.coord.u == pytest.approx(expected, abs=1e-12)


def test_projection_intertwines_stage_map(two_sided_stage, rng):
    X = two_sided_stage
    for p in sample_stage_points(X, rng, 300):
        lhs = stage_project(X, stage_map(X, p))
        rhs = X.base.step(stage_project(X, p))
        assert X.base.distance(lhs, rhs) < 1e-9


def test_refinement_collapses_outermost_fibers(backward_stage):
    p = Fiber(-4, IntervalU(0.2))
    assert stage_refine(backward_stage, p) == Regular(backward_stage.z(-4))
    q = Fiber(-2, IntervalU(0.2))
    assert stage_refine(backward_stage, q) == q


def test_cone_coordinate():
    assert cone_coordinate((3.0, 4.0)) == pytest.approx(0.6)
    with pytest.raises(UndefinedDirectionError):
        cone_coordinate((0.0, 0.0))


def test_direction_seen_from_blown_point(two_sided_stage):
    z = two_sided_stage.z(0)
    q = TorusPoint(z.x + 1e-3, z.y + 0.5e-3)
    assert direction_coordinate(two_sided_stage, 0, q) == pytest.approx(
        Direction.from_slope(0.5).u
    )
    far = TorusPoint(z.x + 0.3, z.y)
    assert direction_coordinate(two_sided_stage, 0, far) == 0.0
    with pytest.raises(UndefinedDirectionError):
        direction_coordinate(two_sided_stage, 0, z)


def test_regular_point_on_blown_orbit_is_rejected(two_sided_stage):
    with pytest.raises(ChartSingularityError) as excinfo:
        stage_map(two_sided_stage, Regular(two_sided_stage.z(2)))
    assert excinfo.value.index == 2


def test_fiber_outside_the_blown_range_is_rejected(backward_stage):
    with pytest.raises(InvalidPointError):
        stage_map(backward_stage, Fiber(0, IntervalU(0.0)))


def test_rational_rotation_number_is_periodic(roof):
    with pytest.raises(AperiodicityError):
        build_stage(SkewBase(SkewSystem(0.5, roof)), BlownIndexSet.two_sided(2))


def test_small_fiber_counts_match_closed_form(two_sided_stage, rng):
    census = almost_one_to_one_report(two_sided_stage, 2000, range(1, 11), rng)
    for n, measured, expected in census.thresholds:
        assert measured == expected
    assert census.thresholds[0] == (1, 14, 14)
    assert census.singleton_fraction == 1.0


def test_tower_fibers_over_an_odometer_suspension(golden):
    base = SuspensionBase(suspend(Odometer(12)), golden)
    X = build_stage(base, BlownIndexSet.two_sided(4), FiberKind.TOWER, tower_depth=2)
    a, b = fiber_extremes(X, 1)
    assert isinstance(a.coord, TowerT) and len(a.coord.tower) == 3
    assert stage_metric(X, a, b) == pytest.approx(fiber_diameter(X, 1))
    assert stage_map(X, a) == Fiber(2, a.coord)


@pytest.fixture
def klein_seed():
    return TorusPoint(0.2, 0.7)


def test_klein_stage_blows_up_both_lifts(skew, klein_seed):
    X = build_stage(KleinBase(skew, klein_project(klein_seed)), BlownIndexSet.backward_only(3))
    partner = klein_project(X.z(-1).partner)
    with pytest.raises(ChartSingularityError) as info:
        validate_point(X, Regular(partner))
    assert info.value.index == -1

    torus = build_stage(SkewBase(skew, klein_seed), BlownIndexSet.backward_only(3))
    validate_point(torus, Regular(klein_involution(torus.z(-1))))


def test_klein_fibers_agree_with_both_torus_lifts(skew, klein_seed, rng):
    X = build_stage(KleinBase(skew, klein_project(klein_seed)), BlownIndexSet.two_sided(4))
    assert any(X.base.lift_flips(X.z(i)) for i in range(-4, 4))
    assert klein_lift_defect(X, rng, 30) < 1e-9


def test_klein_transport_negates_on_a_flipped_lift(skew):
    base = KleinBase(skew)
    z = klein_project(TorusPoint(0.1, 0.4))
    moved = slope_transport(skew, z.x, Direction(0.3)).u
    assert base.lift_flips(z)
    assert base.transport(z, 0.3) == -moved
    w = klein_project(TorusPoint(0.45, 0.4))
    assert not base.lift_flips(w)
    assert base.transport(w, 0.3) == slope_transport(skew, w.x, Direction(0.3)).u


def test_klein_base_needs_an_odd_roof(golden):
    even = SkewSystem(golden, RoofFunction.from_pairs([(2, 0.05)], odd_only=False))
    with pytest.raises(EquivarianceError):
        KleinBase(even)


def test_klein_backward_blowup_is_noninvertible(skew, klein_seed):
    X = build_stage(KleinBase(skew, klein_project(klein_seed)), BlownIndexSet.backward_only(4))
    witness = noninvertibility_witness(X)
    assert witness.separation == pytest.approx(0.5)
    assert witness.image_distance == 0.0
    assert witness.image == Regular(X.z(0))
