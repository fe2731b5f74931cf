"""Fiber, noninvertibility and almost 1-1 probes of a blow-up stage."""

import logging
from typing import Any, List, Optional

import numpy as np

from minlab.models.blowup import (
    Fiber,
    FiberKind,
    IntervalU,
    KleinBase,
    Regular,
    SkewBase,
    StagePoint,
    StageSpace,
    SuspensionBase,
    TowerT,
    almost_one_to_one_report,
    coarsen,
    diameter_rows,
    direction_coordinate,
    fiber_extremes,
    fiber_orbit_diameters,
    klein_lift_defect,
    noninvertibility_witness,
    sample_stage_points,
    stage_map,
    stage_metric,
    stage_project,
    stage_refine,
)
from minlab.models.pseudoarc import tower_from_point
from minlab.models.skew import Direction, TorusPoint, klein_project
from minlab.probes.base import Outcome, ProbeRouter
from minlab.schemas.reports import (
    AlmostOneToOneReport,
    StagePointRecord,
    ThresholdCount,
    WitnessReport,
)
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)
router = ProbeRouter()

SEMICONJUGACY_SAMPLES = 1000
GRID_POINTS = 21
KLEIN_LIFT_SAMPLES = 50


def describe(X: StageSpace, p: StagePoint) -> StagePointRecord:
    """Report form of a stage point."""
    if isinstance(p, Regular):
        return StagePointRecord(kind="regular", base=X.base.coordinates(p.base))
    coordinate = list(p.coord.tower) if isinstance(p.coord, TowerT) else [p.coord.u]
    return StagePointRecord(
        kind="fiber",
        index=p.index,
        coordinate=coordinate,
        base=X.base.coordinates(X.orbit[p.index]),
    )


def _first_forward_index(X: StageSpace) -> int:
    indices = X.indices.indices
    return 0 if 0 in X.indices else indices[0]


def _measured_diameters(X: StageSpace, i0: int, k: int) -> List[float]:
    """Stage distance of the two extreme fiber points along k stage-map steps."""
    a, b = fiber_extremes(X, i0)
    measured = []
    for _ in range(k + 1):
        measured.append(stage_metric(X, a, b))
        a, b = stage_map(X, a), stage_map(X, b)
    return measured


def _check_semiconjugacy(X: StageSpace, outcome: Outcome, samples: List[StagePoint]) -> float:
    worst = 0.0
    for p in samples:
        lhs = stage_project(X, stage_map(X, p))
        rhs = X.base.step(stage_project(X, p))
        worst = max(worst, X.base.distance(lhs, rhs))
    outcome.check(worst < 1e-9, f"projection does not intertwine the maps ({worst:.3e})")
    return worst


def _check_refinement(X: StageSpace, outcome: Outcome, samples: List[StagePoint]) -> int:
    """stage_refine o stage_map = stage_map o stage_refine away from the oldest fiber."""
    if X.indices.n < 2:
        return 0
    Y = coarsen(X)
    oldest = X.indices.indices[0]
    checked = 0
    for p in samples:
        if isinstance(p, Fiber) and p.index == oldest:
            continue
        lhs = stage_refine(X, stage_map(X, p))
        rhs = stage_map(Y, stage_refine(X, p))
        gap = stage_metric(Y, lhs, rhs)
        outcome.check(gap < 1e-9, f"refinement square fails at {p!r} by {gap:.3e}")
        checked += 1
    return checked


def _nudge(X: StageSpace, z: Any, dx: float, dy: float) -> Any:
    """Base point at chart offset (dx, dy) from z."""
    if isinstance(X.base, KleinBase):
        return klein_project(TorusPoint(z.x + dx, z.y + dy))
    return TorusPoint(z.x + dx, z.y + dy)


def _continuity_error(X: StageSpace, i: int, beta: float, radius: float) -> float:
    """Stage distance between the image of a point near z_i and the transported fiber point."""
    z = X.orbit[i]
    q = _nudge(X, z, radius, beta * radius)
    expected = Fiber(i + 1, IntervalU(X.base.transport(z, Direction.from_slope(beta).u)))
    return stage_metric(X, stage_map(X, Regular(q)), expected)


def _check_continuity(bench: Workbench, X: StageSpace, outcome: Outcome) -> Optional[List[float]]:
    if not isinstance(X.base, (SkewBase, KleinBase)) or X.fiber_kind is not FiberKind.INTERVAL:
        return None
    pairs = [i for i in X.indices.indices if i + 1 in X.indices]
    if not pairs:
        return None
    i = 0 if 0 in pairs else pairs[-1]
    params = bench.config.probes
    beta = params.slope_beta
    radii = sorted(params.slope_radii, reverse=True)
    arc = Direction.from_slope(beta).u
    z = X.orbit[i]
    for r in radii:
        seen = direction_coordinate(X, i, _nudge(X, z, r, beta * r))
        outcome.check(
            abs(seen - arc) < 1e-9, f"direction {seen!r} at radius {r}, expected {arc!r}"
        )
    errors = [_continuity_error(X, i, beta, r) for r in radii]
    outcome.check(
        all(b < a for a, b in zip(errors, errors[1:])),
        f"stage-map images do not approach the transported fiber point: {errors}",
    )
    return errors


@router.probe(
    "fibers",
    "Fiber diameters, their decay along the orbit and the factor square",
    requires="[blowup] section",
)
def fibers_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    X = bench.stage
    k = bench.config.probes.fiber_steps
    ratio = bench.config.blowup.weight_ratio

    rows = diameter_rows(X, k)
    for index, _, diameter, _ in rows:
        closed = 2.0 * ratio ** abs(index)
        outcome.check(
            diameter == closed, f"fiber {index} has diameter {diameter!r}, not {closed!r}"
        )

    i0 = _first_forward_index(X)
    closed_form = fiber_orbit_diameters(X, i0, k)
    measured = _measured_diameters(X, i0, k)
    mismatch = max(abs(a - b) for a, b in zip(measured, closed_form))
    outcome.check(mismatch <= 1e-15, f"iterated fiber diameters off by {mismatch:.3e}")
    if i0 >= 0:
        outcome.check(
            all(b <= a for a, b in zip(measured, measured[1:])),
            "fiber diameters grew along the forward orbit",
        )

    samples = sample_stage_points(X, rng, SEMICONJUGACY_SAMPLES)
    worst = _check_semiconjugacy(X, outcome, samples)
    squares = _check_refinement(X, outcome, samples)

    if isinstance(X.base, SuspensionBase) and X.fiber_kind is FiberKind.INTERVAL:
        grid = np.linspace(-1.0, 1.0, GRID_POINTS)
        moved = max(abs(X.base.transport(X.orbit[i0], u) - u) for u in grid)
        outcome.check(moved == 0.0, "suspension fiber transition is not the identity")

    continuity = _check_continuity(bench, X, outcome)
    lift_defect = None
    if isinstance(X.base, KleinBase) and X.fiber_kind is FiberKind.INTERVAL:
        lift_defect = klein_lift_defect(X, rng, KLEIN_LIFT_SAMPLES)
        outcome.check(
            lift_defect < 1e-9, f"Klein fibers disagree with the torus lifts ({lift_defect:.3e})"
        )
    outcome.record(
        fibers=X.fiber_count,
        start_index=i0,
        diameter_mismatch=mismatch,
        semiconjugacy_defect=worst,
        refinement_squares=squares,
    )
    if continuity is not None:
        outcome.record(continuity_errors=continuity)
    if lift_defect is not None:
        outcome.record(klein_lift_defect=lift_defect)

    def draw(ax) -> None:
        steps = np.arange(k + 1)
        ax.step(steps, closed_form, where="post", label="closed form")
        ax.plot(steps, measured, "o", markersize=3, label="measured")
        ax.set_xlabel("stage-map steps")
        ax.set_ylabel(f"diameter of fiber {i0}")
        ax.legend()

    outcome.keep(
        outcome.writer.csv(
            "fibers.csv", ["index", "weight", "diameter", "diameterAfterK"], rows
        )
    )
    outcome.keep(
        outcome.writer.csv(
            "fiber_orbit.csv",
            ["step", "closed_form", "measured"],
            [(j, c, m) for j, (c, m) in enumerate(zip(closed_form, measured))],
        )
    )
    outcome.keep(outcome.writer.svg("fibers.svg", draw, title="fiber diameter decay"))


def _grid_coords(X: StageSpace) -> list:
    if X.fiber_kind is FiberKind.INTERVAL:
        return [IntervalU(float(u)) for u in np.linspace(-1.0, 1.0, GRID_POINTS)]
    branches = [0] * X.tower_depth
    return [
        TowerT(tower_from_point(X.bonding, float(x), branches))
        for x in np.linspace(0.0, 1.0, GRID_POINTS)
    ]


def _grid_collisions(X: StageSpace) -> List[tuple]:
    """Pairs of distinct fiber grid points with equal images."""
    coords = _grid_coords(X)
    points = [Fiber(i, c) for i in X.indices.indices for c in coords]
    images = [stage_map(X, p) for p in points]
    collisions = []
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if images[a] == images[b]:
                collisions.append((points[a], points[b]))
    return collisions


@router.probe(
    "witness",
    "Two fiber points with one common image under the stage map",
    requires="[blowup] mode = backward-only",
)
def witness_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    X = bench.stage
    witness = noninvertibility_witness(X)
    outcome.check(witness.separation > 0.0, "witness points coincide")
    outcome.check(witness.image_distance == 0.0, f"images {witness.image_distance!r} apart")
    outcome.check(witness.images_equal, "witness images are not equal stage points")
    if X.fiber_kind is FiberKind.INTERVAL:
        outcome.check(
            abs(witness.separation - X.weights[-1]) < 1e-15,
            f"separation {witness.separation!r} differs from w_-1 = {X.weights[-1]!r}",
        )

    collisions = _grid_collisions(X)
    strays = [pair for pair in collisions if pair[0].index != -1 or pair[1].index != -1]
    outcome.check(bool(collisions), "no collisions on the fiber grid")
    outcome.check(not strays, f"{len(strays)} collisions outside fiber -1")

    report = WitnessReport(
        first=describe(X, witness.first),
        second=describe(X, witness.second),
        image=describe(X, witness.image),
        separation=witness.separation,
        image_distance=witness.image_distance,
        images_equal=witness.images_equal,
    )
    outcome.record(
        separation=witness.separation,
        image_distance=witness.image_distance,
        grid_collisions=len(collisions),
    )
    outcome.keep(outcome.writer.json("witness.json", report))


@router.probe(
    "almost11",
    "Singleton fibers over sampled base points and small-fiber counts",
    requires="[blowup] section",
)
def almost_one_to_one_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    X = bench.stage
    params = bench.config.probes
    census = almost_one_to_one_report(X, params.almost11_samples, params.almost11_thresholds, rng)

    for n, measured, expected in census.thresholds:
        outcome.check(
            measured == expected, f"{measured} fibers below 1/{n}, closed form gives {expected}"
        )
    outcome.check(
        census.blown_hits <= X.fiber_count,
        f"{census.blown_hits} samples on the blown orbit, more than {X.fiber_count} fibers",
    )

    report = AlmostOneToOneReport(
        sample_count=census.sample_count,
        singleton_fraction=census.singleton_fraction,
        blown_hits=census.blown_hits,
        fiber_count=X.fiber_count,
        thresholds=[
            ThresholdCount(n=n, fibers_below=measured, expected=expected)
            for n, measured, expected in census.thresholds
        ],
        diameter_histogram={repr(d): count for d, count in census.histogram.items()},
    )
    outcome.record(singleton_fraction=census.singleton_fraction, blown_hits=census.blown_hits)
    outcome.keep(outcome.writer.json("almost11.json", report))
    outcome.keep(
        outcome.writer.csv("almost11.csv", ["n", "fibers_below", "expected"], census.thresholds)
    )
