import math

import pytest

from minlab.core.exceptions import (
    DegenerateTargetError,
    PreconditionError,
    ResourceError,
    RigidityFailure,
)
from minlab.models.rigidity import (
    AffineForm,
    LatticeMap,
    TilingWindow,
    affine_label,
    classify_product_structure,
    decompose,
    enumerate_automorphisms,
    independent_rotation_minima,
    invariant_of,
    product_nonminimality_report,
    product_rotation_invariant,
)
from minlab.models.skew import TorusPoint


def test_window_automorphisms_are_even_translations():
    maps = enumerate_automorphisms(TilingWindow(2))
    assert len(maps) == 25
    structure = classify_product_structure(maps)
    assert structure.group == "Z"
    assert structure.swap_count == 0
    assert structure.translation_rank == 2
    assert AffineForm(False, 0, 0) in structure.forms
    assert AffineForm(False, 2, 0) in structure.forms
    assert AffineForm(False, 1, 0) not in structure.forms


def test_swaps_double_the_automorphisms():
    maps = enumerate_automorphisms(TilingWindow(2), allow_swap=True)
    assert len(maps) == 50
    structure = classify_product_structure(maps)
    assert structure.group == "Z_x_Z2"
    assert structure.swap_count == 25
    assert structure.squares_are_translations


def test_decompose_rejects_odd_translation():
    window = TilingWindow(1)
    shifted = LatticeMap(window, tuple((i + 1, j) for i, j in window.cells))
    with pytest.raises(RigidityFailure):
        decompose(shifted)


def test_decompose_reads_the_translation():
    window = TilingWindow(1)
    shifted = LatticeMap(window, tuple((i + 2, j - 2) for i, j in window.cells))
    form = decompose(shifted)
    assert form == AffineForm(False, 2, -2)
    assert affine_label(form) == "shift+(2,-2)"


def test_swapped_forms_compose_to_translations():
    swap = AffineForm(True, 2, 4)
    assert swap.compose(swap) == AffineForm(False, 6, 6)


def test_large_window_is_refused():
    with pytest.raises(ResourceError):
        enumerate_automorphisms(TilingWindow(5))


def test_invariant_survives_a_million_steps(golden):
    check = product_rotation_invariant(1, 2, golden, TorusPoint(0.0, 0.0), 1_000_000)
    assert check.invariant == 0.0
    assert check.drift < 1e-9


def test_exact_iteration_has_no_drift(golden):
    check = product_rotation_invariant(1, 2, golden, TorusPoint(0.1, 0.2), 500, exact=True)
    assert check.drift == 0.0
    assert check.invariant == pytest.approx(invariant_of(1, 2, 0.1, 0.2))


def test_zero_powers_have_no_invariant(golden):
    with pytest.raises(PreconditionError):
        product_rotation_invariant(0, 0, golden, TorusPoint(0.0, 0.0))


def test_product_orbit_stays_away_from_target(golden):
    margin = product_nonminimality_report(
        1, 2, golden, TorusPoint(0.0, 0.0), TorusPoint(0.0, 0.25), 1_000_000
    )
    assert margin.bound == pytest.approx(0.25 / math.sqrt(5.0))
    assert margin.min_distance >= 0.1118
    assert margin.respects_bound


def test_target_on_the_invariant_subtorus_is_degenerate(golden):
    with pytest.raises(DegenerateTargetError):
        product_nonminimality_report(
            1, 2, golden, TorusPoint(0.0, 0.0), TorusPoint(0.1, 0.2), 1000
        )


def test_independent_rotations_approach_any_target(golden):
    silver = math.sqrt(2.0) - 1.0
    minima = independent_rotation_minima(
        golden, silver, TorusPoint(0.0, 0.0), TorusPoint(0.0, 0.25), [1_000, 100_000, 1_000_000]
    )
    assert minima == sorted(minima, reverse=True)
    assert minima[-1] < 1e-3
