import numpy as np
import pytest

from minlab.core.exceptions import (
    BranchError,
    DomainError,
    PreconditionError,
    TowerDepthError,
)
from minlab.models.pseudoarc import (
    BondingMap,
    bonding_eval,
    compose,
    crooked_map,
    crookedness,
    enumerate_towers,
    is_delta_crooked,
    level_schedule,
    power,
    preimages,
    tower_check,
    tower_extend,
    tower_from_point,
    tower_metric,
)

IDENTITY = BondingMap(np.array([0.0, 1.0]), np.array([0.0, 1.0]))


@pytest.mark.parametrize(
    "level, count", [(1, 3), (2, 13), (3, 71), (4, 409), (5, 2379)]
)
def test_breakpoint_counts(level, count):
    assert crooked_map(level).breakpoint_count == count


def test_crooked_map_fixes_endpoints():
    g = crooked_map(3)
    assert bonding_eval(g, 0.0) == 0.0
    assert bonding_eval(g, 1.0) == 1.0
    assert g.is_surjective


@pytest.mark.parametrize("level", [2, 3, 4])
def test_crooked_map_is_crooked_at_its_level(level):
    assert is_delta_crooked(crooked_map(level), 1.0 / level)


@pytest.mark.parametrize("delta", [0.1, 0.5, 0.99])
def test_identity_is_not_crooked(delta):
    assert not is_delta_crooked(IDENTITY, delta)


def test_powers_stay_crooked():
    g = crooked_map(2)
    for m in (2, 3):
        assert is_delta_crooked(power(g, m), 0.5)
    assert crookedness(power(g, 2)) <= 0.5 + 1e-8


def test_composition_with_identity_is_unchanged():
    g = crooked_map(2)
    composed = compose(IDENTITY, g)
    grid = np.linspace(0.0, 1.0, 101)
    assert np.allclose(bonding_eval(composed, grid), bonding_eval(g, grid))


def test_delta_outside_unit_interval_is_rejected():
    with pytest.raises(PreconditionError):
        is_delta_crooked(crooked_map(2), 0.0)


def test_evaluation_outside_domain_fails():
    with pytest.raises(DomainError):
        bonding_eval(crooked_map(2), 1.5)
    assert bonding_eval(crooked_map(2).extend(), 1.5) == 1.5


def test_every_preimage_maps_back():
    g = crooked_map(2)
    found = preimages(g, 0.3)
    assert found == sorted(found)
    assert np.allclose(bonding_eval(g, np.array(found)), 0.3)


def test_towers_are_consistent():
    g = crooked_map(2)
    towers = enumerate_towers(g, 0.5, 2)
    assert towers
    assert all(tower_check(g, t) and len(t) == 3 for t in towers)
    assert len(enumerate_towers(g, 0.5, 1)) == len(preimages(g, 0.5))


def test_missing_branch_is_reported():
    g = crooked_map(2)
    with pytest.raises(BranchError):
        tower_extend(g, (0.5,), 99)


def test_tower_metric_has_diameter_two():
    g = crooked_map(2)
    t = tower_from_point(g, 0.5, [0, 0])
    assert tower_metric(t, t) == 0.0
    assert tower_metric((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)) == pytest.approx(2.0)
    with pytest.raises(TowerDepthError):
        tower_metric((0.0,), (0.0, 0.0))


def test_level_schedule_doubles():
    assert level_schedule(4) == [2, 4, 8, 16]


def test_linear_interpolation_between_breakpoints():
    g = BondingMap(np.array([0.0, 0.2, 0.4, 1.0]), np.array([0.0, 0.4, 0.1, 1.0]))
    assert bonding_eval(g, 0.3) == pytest.approx(0.25)
    assert bonding_eval(g.extend(), -0.5) == -0.5
    assert not tower_check(g, (0.5, 0.1))
    assert is_delta_crooked(g, 1.0)


def test_endpoints_carry_fixed_towers():
    g = crooked_map(2)
    assert tower_extend(g, (0.0,), 0) == (0.0, 0.0)
    assert tower_extend(g, (1.0,), len(preimages(g, 1.0)) - 1)[-1] == 1.0
    assert tower_check(g, (0.0, 0.0, 0.0))
    assert tower_check(g, (0.7,))
