import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minlab.core.exceptions import (
    EmptyRequestError,
    InvalidPointError,
    RotationNumberError,
    ScheduleError,
    SeedError,
    TruncationError,
)
from minlab.models.circle import (
    CantorPoint,
    CirclePoint,
    GapPoint,
    GeometricGapSchedule,
    RotationSystem,
    Side,
    circle_distance,
    convergent_denominators,
    denjoy_build,
    denjoy_embed,
    denjoy_inverse_map,
    denjoy_iterate,
    denjoy_map,
    denjoy_semiconjugacy,
    density_at_convergents,
    eps_density,
    gap_spectrum,
    orbit,
    orbit_angles,
    rotate,
    rotate_inverse,
    sample_denjoy_points,
)


def test_golden_orbit_is_dense_at_ten_thousand_points(golden):
    angles = orbit_angles(golden, 0.0, 10_000)
    assert eps_density(angles) < 3e-4


def test_orbit_has_at_most_three_gap_lengths(golden):
    for n in (10, 100, 1000, 4181):
        assert len(gap_spectrum(orbit_angles(golden, 0.0, n))) <= 3


def test_orbit_returns_exactly_n_points(golden):
    points = orbit(RotationSystem(golden), CirclePoint(0.25), 7)
    assert len(points) == 7
    assert points[1] == CirclePoint(0.25 + golden)


def test_empty_orbit_is_rejected(golden):
    with pytest.raises(EmptyRequestError):
        orbit(RotationSystem(golden), CirclePoint(0.0), 0)
    with pytest.raises(EmptyRequestError):
        eps_density(np.array([]))


@settings(max_examples=50)
@given(st.floats(min_value=0.0, max_value=1.0, exclude_max=True))
def test_rotation_inverse_undoes_rotation(angle):
    system = RotationSystem(0.6180339887498949)
    assert rotate_inverse(rotate(CirclePoint(angle), system), system) == CirclePoint(angle)


def test_convergent_denominators_are_fibonacci(golden):
    assert convergent_denominators(golden, 100) == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_covering_radius_shrinks_along_convergent_denominators(golden):
    rows = density_at_convergents(golden, 0.0, 10_000)
    assert [q for q, _ in rows][-3:] == [2584, 4181, 6765]
    radii = [r for _, r in rows]
    assert all(b < a for a, b in zip(radii, radii[1:]))
    assert radii[-1] < 1e-3


def test_rational_rotation_number_is_rejected():
    with pytest.raises(RotationNumberError):
        denjoy_build(0.5, [0.0])


@pytest.mark.parametrize(
    "alpha",
    [(math.sqrt(5.0) - 1.0) / 2.0, math.sqrt(2.0) - 1.0, math.pi - 3.0],
    ids=["golden", "silver", "pi"],
)
def test_irrational_rotation_numbers_are_not_rational(alpha):
    assert RotationSystem(alpha).rational is None
    assert denjoy_build(alpha, [0.0, 0.3], depth=16).alpha == alpha


@pytest.mark.parametrize(
    "alpha, expected",
    [(1.0 / 3.0, Fraction(1, 3)), (0.5, Fraction(1, 2)), (0.7, Fraction(7, 10))],
)
def test_rational_rotation_numbers_are_detected(alpha, expected):
    assert RotationSystem(alpha).rational == expected


def test_seeds_on_one_orbit_are_rejected(golden):
    with pytest.raises(SeedError):
        denjoy_build(golden, [0.0, golden])


def test_oversized_schedule_is_rejected(golden):
    with pytest.raises(ScheduleError):
        denjoy_build(golden, [0.0], gap_schedule=GeometricGapSchedule(scale=0.4))


def test_default_schedule_uses_half_the_circle(denjoy):
    assert denjoy.total_gap + denjoy.tail_bound == pytest.approx(0.5, abs=1e-12)
    assert len(denjoy.gaps) == 2 * 65


def _semiconjugacy_defect(denjoy, rng, count):
    rotation = denjoy.rotation
    samples = [
        p
        for p in sample_denjoy_points(denjoy, rng, count)
        if not isinstance(p, GapPoint) or abs(p.index) < denjoy.depth
    ]
    worst = 0.0
    for p in samples:
        lhs = denjoy_semiconjugacy(denjoy, denjoy_map(denjoy, p))
        rhs = rotate(denjoy_semiconjugacy(denjoy, p), rotation)
        worst = max(worst, circle_distance(lhs.angle, rhs.angle))
    return worst


def test_semiconjugacy_intertwines_with_rotation(denjoy, rng):
    assert _semiconjugacy_defect(denjoy, rng, 1000) < 1e-9


@pytest.mark.slow
def test_semiconjugacy_holds_on_a_hundred_thousand_samples(denjoy, rng):
    assert _semiconjugacy_defect(denjoy, rng, 100_000) < 1e-9


def test_inverse_map_undoes_map(denjoy):
    p = GapPoint(1, 5, 0.25)
    assert denjoy_inverse_map(denjoy, denjoy_map(denjoy, p)) == p
    q = CantorPoint(CirclePoint(0.123))
    assert denjoy_inverse_map(denjoy, denjoy_map(denjoy, q)) == q


def test_iterating_past_the_stored_depth_fails(denjoy):
    with pytest.raises(TruncationError):
        denjoy_iterate(denjoy, GapPoint(0, denjoy.depth, 0.5), 1)


def test_seed_is_the_origin_of_the_embedding(denjoy):
    assert denjoy_embed(denjoy, GapPoint(0, 0, 0.0)).angle == pytest.approx(0.0, abs=1e-12)
    left = denjoy_embed(denjoy, CantorPoint(CirclePoint(0.0), Side.LEFT))
    right = denjoy_embed(denjoy, CantorPoint(CirclePoint(0.0), Side.RIGHT))
    assert right.angle - left.angle == pytest.approx(denjoy.gaps[(0, 0)])


def test_embedding_preserves_cyclic_order(denjoy):
    bases = [0.05, 0.11, 0.42, 0.77, 0.93]
    embedded = [denjoy_embed(denjoy, CantorPoint(CirclePoint(b))).angle for b in bases]
    start = embedded[0]
    unwrapped = [(a - start) % 1.0 for a in embedded]
    assert unwrapped == sorted(unwrapped)


def test_blown_point_needs_side_marker(denjoy):
    with pytest.raises(InvalidPointError):
        denjoy_embed(denjoy, CantorPoint(CirclePoint(0.3)))
    with pytest.raises(InvalidPointError):
        denjoy_embed(denjoy, CantorPoint(CirclePoint(0.123), Side.LEFT))


def test_locate_finds_blown_orbit_points(denjoy, golden):
    assert denjoy.locate(CirclePoint(0.3 + 3 * golden)) == (1, 3)
    assert denjoy.locate(CirclePoint(0.123)) is None


def test_rotation_wraps_mod_one():
    assert rotate(CirclePoint(0.25), RotationSystem(0.5)) == CirclePoint(0.75)
    assert rotate(CirclePoint(0.9), RotationSystem(0.2)) == CirclePoint(0.1)


def test_rational_rotation_orbit_is_periodic():
    points = orbit(RotationSystem(0.5), CirclePoint(0.0), 4)
    assert [p.angle for p in points] == [0.0, 0.5, 0.0, 0.5]


def test_equispaced_points_have_gap_one_third():
    points = [CirclePoint(0.0), CirclePoint(1 / 3), CirclePoint(2 / 3)]
    assert eps_density(points) == pytest.approx(1 / 3)
