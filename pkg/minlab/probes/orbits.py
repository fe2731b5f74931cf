"""Orbit and density probes."""

import logging
from typing import List, Optional

import numpy as np

from minlab.models.circle import (
    CantorPoint,
    CirclePoint,
    DenjoySystem,
    Side,
    circle_distance,
    denjoy_embed,
    denjoy_map,
    density_at_convergents,
    denjoy_semiconjugacy,
    eps_density,
    gap_spectrum,
    orbit,
    orbit_angles,
    rotate,
)
from minlab.models.skew import klein_project, skew_apply, skew_inverse, torus_distance
from minlab.models.suspension import (
    Odometer,
    certify_minimal_time,
    flow,
    odometer_cylinder_census,
    time_t_map,
)
from minlab.probes.base import Outcome, ProbeRouter
from minlab.schemas.experiment import SUSPENSION_KINDS, TORUS_KINDS
from minlab.schemas.reports import CircleDensityReport
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)
router = ProbeRouter()


def _checkpoints(total: int, count: int) -> List[int]:
    """Roughly geometric orbit lengths ending at total."""
    points = np.unique(np.geomspace(1, total, num=count).round().astype(int))
    return [int(n) for n in points if n >= 1]


def _cantor_start(
    system: DenjoySystem, angle: Optional[float], rng: np.random.Generator
) -> CantorPoint:
    """Configured start, or a random point off the blown orbits."""
    base = CirclePoint(angle if angle is not None else float(rng.random()))
    return CantorPoint(base, Side.LEFT if system.locate(base) else None)


def _configured_angle(bench: Workbench) -> Optional[float]:
    start = bench.system_config.start
    return start[0] if start else None


def _rotation_orbit(bench: Workbench, outcome: Outcome, n: int) -> None:
    angles = orbit_angles(bench.rotation.alpha, bench.start_angle.angle, n)
    distinct = len(gap_spectrum(angles))
    outcome.check(distinct <= 3, f"rotation orbit has {distinct} distinct gaps (> 3)")
    outcome.record(points=n, distinct_gaps=distinct)
    outcome.keep(outcome.writer.csv("orbit.csv", ["step", "angle"], enumerate(angles.tolist())))
    outcome.keep(
        outcome.writer.svg(
            "orbit.svg",
            lambda ax: ax.plot(np.arange(n), angles, ".", markersize=2),
            title="rotation orbit",
        )
    )


def _denjoy_orbit(bench: Workbench, outcome: Outcome, n: int, rng: np.random.Generator) -> None:
    system = bench.denjoy
    points = orbit(system, _cantor_start(system, _configured_angle(bench), rng), n)
    embedded = [denjoy_embed(system, p).angle for p in points]
    factor = [denjoy_semiconjugacy(system, p).angle for p in points]
    worst = 0.0
    for p in points[:-1]:
        lhs = denjoy_semiconjugacy(system, denjoy_map(system, p))
        rhs = rotate(denjoy_semiconjugacy(system, p), system.rotation)
        worst = max(worst, circle_distance(lhs.angle, rhs.angle))
    outcome.check(worst < 1e-9, f"semiconjugacy defect {worst:.3e} along the orbit")
    outcome.record(points=n, semiconjugacy_defect=worst)
    rows = [(i, e, f) for i, (e, f) in enumerate(zip(embedded, factor))]
    outcome.keep(outcome.writer.csv("orbit.csv", ["step", "embedded", "factor"], rows))
    outcome.keep(
        outcome.writer.svg(
            "orbit.svg",
            lambda ax: ax.plot(factor, embedded, ".", markersize=2),
            title="Denjoy orbit against its rotation factor",
        )
    )


def _suspension_orbit(
    bench: Workbench, outcome: Outcome, n: int, rng: np.random.Generator
) -> None:
    system = bench.suspension
    step = time_t_map(system, bench.system_config.time)
    # the Denjoy origin is a blown orbit point, which the truncation cannot follow far
    if bench.kind == "denjoy-suspension":
        point = system.random_point(rng)
    else:
        point = bench.suspension_start
    rows = []
    worst = 0.0
    for i in range(n):
        rows.append([i, *system.coordinates(point)])
        image = step(point)
        worst = max(worst, system.distance(flow(system, image, -step.t), point))
        point = image
    outcome.check(worst < 1e-9, f"flow inverse defect {worst:.3e}")
    outcome.record(points=n, inverse_defect=worst)
    outcome.keep(outcome.writer.csv("orbit.csv", ["step", "base", "height"], rows))
    outcome.keep(
        outcome.writer.svg(
            "orbit.svg",
            lambda ax: ax.plot([r[1] for r in rows], [r[2] for r in rows], ".", markersize=2),
            title="time-t orbit (base, height)",
        )
    )


def _torus_orbit(bench: Workbench, outcome: Outcome, n: int) -> None:
    skew = bench.skew
    points = [bench.torus_start]
    for _ in range(n - 1):
        points.append(skew_apply(skew, points[-1]))
    defect = max(
        (torus_distance(skew_inverse(skew, b), a) for a, b in zip(points, points[1:])),
        default=0.0,
    )
    outcome.check(defect < 1e-9, f"skew inverse defect {defect:.3e}")
    outcome.record(points=n, inverse_defect=defect)
    header = ["step", "x", "y"]
    rows = [[i, p.x, p.y] for i, p in enumerate(points)]
    if bench.kind == "klein":
        header += ["klein_x", "klein_y"]
        for row, p in zip(rows, points):
            q = klein_project(p)
            row += [q.x, q.y]
    outcome.keep(outcome.writer.csv("orbit.csv", header, rows))
    outcome.keep(
        outcome.writer.svg(
            "orbit.svg",
            lambda ax: ax.plot([p.x for p in points], [p.y for p in points], ".", markersize=2),
            title="skew orbit",
        )
    )


@router.probe("orbit", "Forward orbit table of the configured system")
def orbit_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    n = bench.config.probes.orbit_length
    if bench.kind == "rotation":
        _rotation_orbit(bench, outcome, n)
    elif bench.kind == "denjoy":
        _denjoy_orbit(bench, outcome, n, rng)
    elif bench.kind in SUSPENSION_KINDS:
        _suspension_orbit(bench, outcome, n, rng)
    else:
        _torus_orbit(bench, outcome, n)


def _flow_density(bench: Workbench, outcome: Outcome) -> None:
    params = bench.config.probes
    report = certify_minimal_time(
        bench.suspension,
        bench.system_config.time,
        params.flow_eps,
        params.flow_steps,
        start=bench.suspension_start,
    )
    outcome.check(report.dense, f"{report.cells_missed} grid cells never visited")
    outcome.record(
        verdict=report.verdict,
        coveringRadius=report.covering_radius,
        cellsMissed=report.cells_missed,
    )
    if isinstance(bench.cantor, Odometer) and bench.cantor.depth <= 16:
        census = odometer_cylinder_census(bench.cantor.depth)
        outcome.check(bool(np.all(census == 1)), "odometer base orbit misses a cylinder")
        outcome.record(cylinders=int(census.size))
    outcome.keep(outcome.writer.json("density.json", report))


@router.probe(
    "density",
    "Covering radius of an orbit, or grid certificate of a time-t map",
    requires="rotation, denjoy or a suspension kind",
)
def density_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    if bench.kind in SUSPENSION_KINDS:
        _flow_density(bench, outcome)
        return
    if bench.kind in TORUS_KINDS:
        outcome.check(False, f"density probe does not apply to {bench.kind}")
        return

    params = bench.config.probes
    alpha = bench.system_config.alpha
    # a Denjoy orbit is measured on its rotation factor
    angles = orbit_angles(alpha, bench.start_angle.angle, params.density_steps)
    lengths = _checkpoints(params.density_steps, params.density_checkpoints)
    rows = [(n, eps_density(angles[:n])) for n in lengths]
    radii = [r for _, r in rows]
    final = radii[-1]
    distinct = len(gap_spectrum(angles))
    outcome.check(
        all(b <= a for a, b in zip(radii, radii[1:])), "covering radius grew with the orbit"
    )
    outcome.check(
        final < params.density_eps, f"covering radius {final:.3e} >= eps {params.density_eps}"
    )
    outcome.check(distinct <= 3, f"{distinct} distinct gaps in a rotation orbit")
    outcome.record(coveringRadius=final, distinct_gaps=distinct)

    convergents = density_at_convergents(alpha, bench.start_angle.angle, params.density_steps)
    at_convergents = [r for _, r in convergents]
    outcome.check(
        all(b <= a for a, b in zip(at_convergents, at_convergents[1:])),
        "covering radius grew between convergent denominators",
    )
    outcome.record(convergent_denominators=[q for q, _ in convergents])

    if bench.kind == "denjoy":
        system = bench.denjoy
        sample = orbit_angles(alpha, float(rng.random()), min(2000, params.density_steps))
        embedded = np.array(
            [denjoy_embed(system, _cantor_start(system, a, rng)).angle for a in sample]
        )
        widest = max(system.gaps.values())
        gap = eps_density(embedded)
        outcome.check(gap >= widest, "embedded orbit enters a wandering gap")
        outcome.record(embedded_largest_gap=gap, widest_wandering_gap=widest)

    report = CircleDensityReport(
        n=params.density_steps,
        eps=params.density_eps,
        largest_gap=final,
        distinct_gaps=distinct,
        dense=final < params.density_eps,
    )

    def draw(ax) -> None:
        ax.loglog([n for n, _ in rows], radii, "o-")
        ax.axhline(params.density_eps, linestyle="--")
        ax.set_xlabel("orbit length")
        ax.set_ylabel("covering radius")

    outcome.keep(outcome.writer.csv("density.csv", ["n", "coveringRadius"], rows))
    outcome.keep(
        outcome.writer.csv("density_convergents.csv", ["q", "coveringRadius"], convergents)
    )
    outcome.keep(outcome.writer.json("density.json", report))
    outcome.keep(outcome.writer.svg("density.svg", draw, title="largest gap of the orbit"))
