"""Slope-transport and Klein-equivariance probes for skew products."""

import logging

import numpy as np

from minlab.core.exceptions import EquivarianceError
from minlab.models.skew import (
    Direction,
    RoofFunction,
    SkewSystem,
    TorusPoint,
    klein_distance,
    klein_distance_array,
    klein_induced,
    klein_project,
    klein_project_array,
    radial_secant_slope,
    roof_derivative,
    skew_apply,
    skew_apply_array,
    slope_transport,
    transport_along_orbit,
)
from minlab.probes.base import Outcome, ProbeRouter
from minlab.schemas.reports import EquivarianceReport, SlopeReport
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)
router = ProbeRouter()

TRANSPORT_STEPS = 100
CROSS_CHECKS = 16


@router.probe(
    "slope",
    "Secant slopes of radial segments converge to beta + r'(x)",
    requires="skew or klein",
)
def slope_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    params = bench.config.probes
    skew = bench.skew
    x, beta = params.slope_x, params.slope_beta
    expected = beta + roof_derivative(skew.roof, x)
    point = TorusPoint(x, bench.torus_start.y)

    radii = sorted(params.slope_radii, reverse=True)
    errors = [abs(radial_secant_slope(skew, point, beta, r) - expected) for r in radii]
    monotone = all(b <= a for a, b in zip(errors, errors[1:]))
    outcome.check(monotone, f"secant errors do not shrink with the radius: {errors}")
    outcome.check(
        errors[-1] < params.slope_tolerance,
        f"secant error {errors[-1]:.3e} at radius {radii[-1]} exceeds {params.slope_tolerance}",
    )

    transported = slope_transport(skew, x, Direction.from_slope(beta))
    outcome.check(
        abs(transported.slope - expected) < 1e-9,
        f"slope transport gives {transported.slope!r}, expected {expected!r}",
    )
    outcome.check(
        slope_transport(skew, x, Direction(1.0)).is_vertical, "vertical direction moved"
    )

    # n-fold transport telescopes to beta + sum of r' along the base orbit
    steps = np.arange(TRANSPORT_STEPS)
    telescoped = beta + float(
        np.sum(roof_derivative(skew.roof, np.mod(x + steps * skew.alpha, 1.0)))
    )
    along = transport_along_orbit(skew, x, Direction.from_slope(beta), TRANSPORT_STEPS)
    drift = abs(along.slope - telescoped)
    outcome.check(drift < 1e-9, f"{TRANSPORT_STEPS}-step transport off by {drift:.3e}")

    passed = not outcome.failures
    report = SlopeReport(
        x=x,
        beta=beta,
        expected_slope=expected,
        radii=radii,
        errors=errors,
        monotone=monotone,
        passed=passed,
    )
    outcome.record(expected_slope=expected, final_error=errors[-1], transport_drift=drift)

    def draw(ax) -> None:
        ax.loglog(radii, [max(e, 1e-17) for e in errors], "o-")
        ax.axhline(params.slope_tolerance, linestyle="--")
        ax.set_xlabel("segment radius")
        ax.set_ylabel("|secant slope - (beta + r'(x))|")

    outcome.keep(outcome.writer.json("slope.json", report))
    outcome.keep(
        outcome.writer.csv("slope.csv", ["radius", "error"], list(zip(radii, errors)))
    )
    outcome.keep(outcome.writer.svg("slope.svg", draw, title="slope transport"))


def _even_frequency(roof: RoofFunction) -> int:
    used = {m for m, _ in roof.harmonics}
    frequency = 2
    while frequency in used:
        frequency += 2
    return frequency


@router.probe(
    "equivariance",
    "Projection to the Klein bottle intertwines F and the induced map",
    requires="skew or klein with odd harmonics",
)
def equivariance_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    skew = bench.skew
    count = bench.config.probes.equivariance_samples
    xs, ys = rng.random(count), rng.random(count)

    # p o F
    fx, fy = skew_apply_array(skew, xs, ys)
    lx, ly = klein_project_array(fx, fy)
    # G o p
    px, py = klein_project_array(xs, ys)
    rx, ry = klein_project_array(*skew_apply_array(skew, px, py))
    distances = klein_distance_array(lx, ly, rx, ry)
    worst = float(np.max(distances))
    residual = skew.roof.symmetry_residual
    outcome.check(worst < 1e-12, f"p o F and G o p differ by {worst:.3e}")
    outcome.check(residual < 1e-12, f"roof symmetry residual {residual:.3e}")

    for x, y in zip(xs[:CROSS_CHECKS], ys[:CROSS_CHECKS]):
        p = TorusPoint(x, y)
        induced = klein_induced(skew, klein_project(p))
        gap = klein_distance(induced, klein_project(skew_apply(skew, p)))
        outcome.check(gap < 1e-12, f"induced map disagrees at ({x!r}, {y!r}) by {gap:.3e}")

    frequency = _even_frequency(skew.roof)
    spoiled = SkewSystem(
        skew.alpha,
        RoofFunction.from_pairs([*skew.roof.harmonics, (frequency, 0.01)], odd_only=False),
    )
    try:
        klein_induced(spoiled, klein_project(TorusPoint(0.125, 0.0)))
        rejected = False
    except EquivarianceError:
        rejected = True
    outcome.check(rejected, f"even harmonic {frequency} was not rejected")

    report = EquivarianceReport(
        samples=count,
        max_distance=worst,
        symmetry_residual=residual,
        passed=not outcome.failures,
    )
    outcome.record(max_distance=worst, symmetry_residual=residual, even_rejected=rejected)
    outcome.keep(outcome.writer.json("equivariance.json", report))
