import math

import numpy as np
import pytest

from minlab.core.exceptions import EquivarianceError, PreconditionError, RoofError
from minlab.models.skew import (
    Direction,
    KleinPoint,
    RoofFunction,
    SkewSystem,
    TorusPoint,
    klein_distance,
    klein_induced,
    klein_involution,
    klein_project,
    klein_project_array,
    radial_secant_slope,
    roof_derivative,
    roof_eval,
    skew_apply,
    skew_inverse,
    skew_iterate,
    slope_transport,
    torus_distance,
    transport_along_orbit,
)


def test_slope_moves_by_roof_derivative(skew):
    image = slope_transport(skew, 0.0, Direction.from_slope(0.0))
    assert image.slope == pytest.approx(0.3141592653, abs=1e-9)


def test_vertical_direction_is_fixed(skew):
    for x in (0.0, 0.2, 0.7):
        assert slope_transport(skew, x, Direction(1.0)).is_vertical
        assert slope_transport(skew, x, Direction(-1.0)).u == -1.0


def test_transport_telescopes_along_the_orbit(skew):
    steps = 100
    d = transport_along_orbit(skew, 0.1, Direction.from_slope(0.5), steps)
    xs = np.mod(0.1 + skew.alpha * np.arange(steps), 1.0)
    expected = 0.5 + float(np.sum(roof_derivative(skew.roof, xs)))
    assert d.slope == pytest.approx(expected, abs=1e-9)


def test_secant_slope_converges_to_transported_slope(skew):
    p = TorusPoint(0.1, 0.4)
    target = 0.5 + roof_derivative(skew.roof, 0.1)
    errors = [abs(radial_secant_slope(skew, p, 0.5, r) - target) for r in (1e-2, 1e-3, 1e-4)]
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] < 1e-4


def test_inverse_undoes_skew_product(skew, rng):
    for x, y in rng.random((50, 2)):
        p = TorusPoint(x, y)
        assert torus_distance(skew_inverse(skew, skew_apply(skew, p)), p) < 1e-12
    assert torus_distance(skew_iterate(skew, skew_iterate(skew, p, 7), -7), p) < 1e-12


def test_even_frequency_is_rejected_by_default():
    with pytest.raises(RoofError):
        RoofFunction.from_pairs([(2, 0.05)])
    with pytest.raises(RoofError):
        RoofFunction.from_pairs([(1, 0.05), (1, 0.01)])


def test_alpha_outside_unit_interval_is_rejected(roof):
    with pytest.raises(PreconditionError):
        SkewSystem(1.2, roof)


def test_from_slope_and_back():
    assert Direction.from_slope(1.0).u == pytest.approx(0.5)
    assert Direction.from_displacement(0.0, 0.3).is_vertical
    assert Direction.from_slope(-2.5).slope == pytest.approx(-2.5)
    assert math.isinf(Direction(1.0).slope)


def test_klein_projection_identifies_involution_pairs(rng):
    for x, y in rng.random((50, 2)):
        p = TorusPoint(x, y)
        assert klein_distance(klein_project(p), klein_project(klein_involution(p))) < 1e-12
        assert 0.0 <= klein_project(p).x < 0.5


def test_klein_projection_array_matches_scalar(rng):
    xs, ys = rng.random(200), rng.random(200)
    px, py = klein_project_array(xs, ys)
    for i in range(200):
        q = klein_project(TorusPoint(xs[i], ys[i]))
        assert klein_distance(q, KleinPoint(px[i], py[i])) < 1e-12


def test_induced_map_is_equivariant(rng):
    F = SkewSystem(0.6180339887498949, RoofFunction.from_pairs([(1, 0.05), (3, 0.01)]))
    for x, y in rng.random((100, 2)):
        p = TorusPoint(x, y)
        lhs = klein_project(skew_apply(F, p))
        rhs = klein_induced(F, klein_project(p))
        assert klein_distance(lhs, rhs) < 1e-12


def test_even_harmonic_breaks_klein_symmetry():
    roof = RoofFunction.from_pairs([(1, 0.05), (2, 0.01)], odd_only=False)
    F = SkewSystem(0.6180339887498949, roof)
    with pytest.raises(EquivarianceError) as excinfo:
        klein_induced(F, KleinPoint(0.1, 0.2))
    assert "odd harmonics" in excinfo.value.detail


def test_roof_eval_scalar_and_array_agree():
    roof = RoofFunction.from_pairs([(1, 0.05), (3, 0.01)])
    assert roof_eval(roof, 0.25) == pytest.approx(0.05 - 0.01)
    xs = np.array([0.0, 0.25, 0.75])
    assert np.allclose(roof_eval(roof, xs), [0.0, 0.04, -0.04])
    assert roof_eval(RoofFunction(), 0.3) == 0.0
