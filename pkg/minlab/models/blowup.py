"""Finite-stage blow-up extensions of skew-product and suspension bases.

A stage replaces the orbit points z_i = F^i(z) of a seed, for i in a finite
index set, by fibers: intervals of line directions or pseudo-arc towers. The
stage map moves fiber i to fiber i + 1 and collapses a fiber to a point when
i + 1 leaves the index set. Fiber i contributes a weighted direction term to
the metric, so fibers shrink along the orbit.
"""

from __future__ import annotations

import abc
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from minlab.core.config import settings
from minlab.core.exceptions import (
    AperiodicityError,
    ChartSingularityError,
    EmptyRequestError,
    InvalidPointError,
    ModeError,
    PreconditionError,
    UndefinedDirectionError,
)
from minlab.models.pseudoarc import (
    BondingMap,
    Tower,
    crooked_map,
    preimages,
    tower_check,
    tower_metric,
)
from minlab.models.skew import (
    Direction,
    KleinPoint,
    SkewSystem,
    TorusPoint,
    klein_distance,
    klein_induced,
    klein_involution,
    klein_project,
    skew_apply,
    skew_inverse,
    slope_transport,
    torus_distance,
    torus_offset,
)
from minlab.models.suspension import SuspensionPoint, SuspensionSystem, flow

logger = logging.getLogger(__name__)

SINGULARITY_TOLERANCE = 1e-12
APERIODICITY_TOLERANCE = 1e-9


def cone_coordinate(y: Sequence[float]) -> float:
    """c(y) = y_1 / |y| for a raw chart vector.

    Raises:
        UndefinedDirectionError: If y is the zero vector
    """
    norm = math.sqrt(math.fsum(v * v for v in y))
    if norm == 0.0:
        raise UndefinedDirectionError()
    return y[0] / norm


# Base systems


class BaseSystem(abc.ABC):
    """Invertible base map F with a seed and flow-box charts around points."""

    kind: str
    seed: Any

    @abc.abstractmethod
    def step(self, p: Any) -> Any:
        """F(p)."""

    @abc.abstractmethod
    def step_back(self, p: Any) -> Any:
        """F^-1(p)."""

    @abc.abstractmethod
    def distance(self, a: Any, b: Any) -> float:
        """Base metric."""

    @abc.abstractmethod
    def displacement(self, q: Any, z: Any) -> Tuple[float, float]:
        """Chart vector of q around z."""

    @abc.abstractmethod
    def direction(self, y: Tuple[float, float]) -> float:
        """Scalar direction coordinate in [-1, 1] of a non-zero chart vector."""

    @abc.abstractmethod
    def transport(self, z: Any, u: float) -> float:
        """Fiber transition from the fiber over z to the fiber over F(z)."""

    @abc.abstractmethod
    def random_point(self, rng: np.random.Generator) -> Any:
        """Random base point."""

    @abc.abstractmethod
    def coordinates(self, p: Any) -> List[float]:
        """Numeric description used in reports."""


@dataclass(frozen=True, eq=False)
class SkewBase(BaseSystem):
    """Skew product base; fibers are line directions transported by the derivative."""

    skew: SkewSystem
    seed: TorusPoint = field(default_factory=lambda: TorusPoint(0.0, 0.0))
    kind: str = "skew"

    def step(self, p: TorusPoint) -> TorusPoint:
        return skew_apply(self.skew, p)

    def step_back(self, p: TorusPoint) -> TorusPoint:
        return skew_inverse(self.skew, p)

    def distance(self, a: TorusPoint, b: TorusPoint) -> float:
        return torus_distance(a, b)

    def displacement(self, q: TorusPoint, z: TorusPoint) -> Tuple[float, float]:
        return torus_offset(q, z)

    def direction(self, y: Tuple[float, float]) -> float:
        return Direction.from_displacement(*y).u

    def transport(self, z: TorusPoint, u: float) -> float:
        return slope_transport(self.skew, z.x, Direction(u)).u

    def random_point(self, rng: np.random.Generator) -> TorusPoint:
        return TorusPoint(float(rng.random()), float(rng.random()))

    def coordinates(self, p: TorusPoint) -> List[float]:
        return [p.x, p.y]


@dataclass(frozen=True, eq=False)
class KleinBase(BaseSystem):
    """Skew product descended to the Klein bottle.

    A blown point [z] stands for both lifts z and iota(z). Charts are read
    through the canonical lift; iota reverses the vertical axis, so a fiber
    transition that lands on a flipped lift negates the direction.
    """

    skew: SkewSystem
    seed: KleinPoint = field(default_factory=lambda: KleinPoint(0.0, 0.0))
    kind: str = "klein"

    def __post_init__(self) -> None:
        # raises EquivarianceError for a roof without the odd symmetry
        klein_induced(self.skew, self.seed)

    def step(self, p: KleinPoint) -> KleinPoint:
        return klein_induced(self.skew, p)

    def step_back(self, p: KleinPoint) -> KleinPoint:
        return klein_project(skew_inverse(self.skew, p.representative))

    def distance(self, a: KleinPoint, b: KleinPoint) -> float:
        return klein_distance(a, b)

    def displacement(self, q: KleinPoint, z: KleinPoint) -> Tuple[float, float]:
        center = z.representative
        direct = torus_offset(q.representative, center)
        partner = torus_offset(q.partner, center)
        return direct if math.hypot(*direct) <= math.hypot(*partner) else partner

    def direction(self, y: Tuple[float, float]) -> float:
        return Direction.from_displacement(*y).u

    def lift_flips(self, z: KleinPoint) -> bool:
        """Whether F of the canonical lift of z is the flipped lift of G(z)."""
        image = skew_apply(self.skew, z.representative)
        # the two lifts of a class sit half a turn apart in x
        return torus_distance(image, self.step(z).representative) > 0.25

    def transport(self, z: KleinPoint, u: float) -> float:
        moved = slope_transport(self.skew, z.x, Direction(u)).u
        return -moved if self.lift_flips(z) else moved

    def random_point(self, rng: np.random.Generator) -> KleinPoint:
        return klein_project(TorusPoint(float(rng.random()), float(rng.random())))

    def coordinates(self, p: KleinPoint) -> List[float]:
        return [p.x, p.y]


@dataclass(frozen=True, eq=False)
class SuspensionBase(BaseSystem):
    """Time-t map of a suspension flow; the first chart coordinate is flow time."""

    system: SuspensionSystem
    t: float
    seed: Optional[SuspensionPoint] = None
    kind: str = "suspension"

    def __post_init__(self) -> None:
        if self.t <= 0.0:
            raise PreconditionError(f"Flow time {self.t!r} must be positive")
        if self.seed is None:
            object.__setattr__(self, "seed", SuspensionPoint(self.system.h.origin(), 0.0))

    def step(self, p: SuspensionPoint) -> SuspensionPoint:
        return flow(self.system, p, self.t)

    def step_back(self, p: SuspensionPoint) -> SuspensionPoint:
        return flow(self.system, p, -self.t)

    def distance(self, a: SuspensionPoint, b: SuspensionPoint) -> float:
        return self.system.distance(a, b)

    def displacement(self, q: SuspensionPoint, z: SuspensionPoint) -> Tuple[float, float]:
        return self.system.chart_displacement(q, z)

    def direction(self, y: Tuple[float, float]) -> float:
        return cone_coordinate(y)

    def transport(self, z: SuspensionPoint, u: float) -> float:
        return u

    def random_point(self, rng: np.random.Generator) -> SuspensionPoint:
        return self.system.random_point(rng)

    def coordinates(self, p: SuspensionPoint) -> List[float]:
        return list(self.system.coordinates(p))


# Index sets, fiber coordinates and stage points


class BlowupMode(str, Enum):
    TWO_SIDED = "two-sided"
    BACKWARD_ONLY = "backward-only"


class FiberKind(str, Enum):
    INTERVAL = "interval"
    TOWER = "tower"


@dataclass(frozen=True)
class BlownIndexSet:
    """TwoSided(n) = {-n, ..., n} or BackwardOnly(n) = {-n, ..., -1}."""

    mode: BlowupMode
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PreconditionError(f"Blow-up depth {self.n} must be at least 1")

    @classmethod
    def two_sided(cls, n: int) -> "BlownIndexSet":
        return cls(BlowupMode.TWO_SIDED, n)

    @classmethod
    def backward_only(cls, n: int) -> "BlownIndexSet":
        return cls(BlowupMode.BACKWARD_ONLY, n)

    @property
    def indices(self) -> Tuple[int, ...]:
        upper = self.n if self.mode is BlowupMode.TWO_SIDED else -1
        return tuple(range(-self.n, upper + 1))

    @property
    def outermost(self) -> Tuple[int, ...]:
        if self.mode is BlowupMode.TWO_SIDED:
            return (-self.n, self.n)
        return (-self.n,)

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and index in self.indices

    def __len__(self) -> int:
        return len(self.indices)

    def coarsen(self) -> "BlownIndexSet":
        return BlownIndexSet(self.mode, self.n - 1)


@dataclass(frozen=True)
class IntervalU:
    """Direction coordinate u in [-1, 1]."""

    u: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.u <= 1.0:
            raise InvalidPointError(f"Interval coordinate {self.u!r} must lie in [-1, 1]")

    @property
    def scalar(self) -> float:
        return self.u


@dataclass(frozen=True)
class TowerT:
    """Pseudo-arc fiber coordinate given by a finite tower."""

    tower: Tower

    @property
    def scalar(self) -> float:
        return 2.0 * self.tower[0] - 1.0


FiberCoord = Union[IntervalU, TowerT]


@dataclass(frozen=True)
class Regular:
    """Base point off the blown orbit."""

    base: Any


@dataclass(frozen=True)
class Fiber:
    """Point of the fiber over the blown orbit point z_index."""

    index: int
    coord: FiberCoord


StagePoint = Union[Regular, Fiber]


def geometric_weights(indices: Sequence[int], ratio: float = 0.5) -> Dict[int, float]:
    """w_i = ratio^|i|."""
    if not 0.0 < ratio < 1.0:
        raise PreconditionError(f"Weight ratio {ratio!r} must lie in (0, 1)")
    return {i: ratio ** abs(i) for i in indices}


def _check_weights(weights: Mapping[int, float], indices: Sequence[int]) -> Dict[int, float]:
    missing = [i for i in indices if i not in weights]
    if missing:
        raise PreconditionError(f"No weight for blown indices {missing}")
    chosen = {i: float(weights[i]) for i in indices}
    if any(w <= 0.0 for w in chosen.values()):
        raise PreconditionError("Fiber weights must be positive")
    by_size = sorted(chosen.items(), key=lambda item: abs(item[0]))
    for (i, w), (j, v) in zip(by_size, by_size[1:]):
        if abs(j) > abs(i) and v > w:
            raise PreconditionError(f"Fiber weights must not grow with |i| (w[{i}] < w[{j}])")
    return chosen


@dataclass(frozen=True, eq=False)
class StageSpace:
    """Finite stage X_n of the blow-up.

    Attributes:
        base: Base system with its seed
        indices: Blown index set
        fiber_kind: Interval or tower fibers
        weights: Metric weight w_i of every blown index
        orbit: Cached z_i for the blown indices and the exit point
        chart_radius: Radius beyond which direction terms fade to 0
        bonding: Bonding map of tower fibers
        tower_depth: Number of coordinates of tower fibers minus one
    """

    base: BaseSystem
    indices: BlownIndexSet
    fiber_kind: FiberKind
    weights: Dict[int, float]
    orbit: Dict[int, Any]
    chart_radius: float
    bonding: Optional[BondingMap] = None
    tower_depth: int = 0

    @property
    def fiber_count(self) -> int:
        return len(self.indices)

    def z(self, index: int) -> Any:
        return self.orbit[index]


def build_stage(
    base: BaseSystem,
    indices: BlownIndexSet,
    fiber_kind: FiberKind = FiberKind.INTERVAL,
    weights: Optional[Mapping[int, float]] = None,
    weight_ratio: float = 0.5,
    chart_radius: Optional[float] = None,
    bonding: Optional[BondingMap] = None,
    tower_depth: int = 3,
) -> StageSpace:
    """Blow up the seed orbit of ``base`` at ``indices``.

    Args:
        base: Skew or suspension base with its seed
        indices: Blown index set
        fiber_kind: Interval fibers, or tower fibers (suspension bases only)
        weights: Explicit weights; default ratio^|i|
        weight_ratio: Ratio of the default weights
        chart_radius: Direction fade-out radius (defaults to settings)
        bonding: Bonding map for tower fibers (default crooked_map(2))
        tower_depth: Extensions per tower

    Returns:
        StageSpace with cached orbit points

    Raises:
        AperiodicityError: If two cached orbit points collide
    """
    if fiber_kind is FiberKind.TOWER and not isinstance(base, SuspensionBase):
        raise PreconditionError("Tower fibers are only supported over suspension bases")
    if tower_depth < 0:
        raise PreconditionError(f"Tower depth {tower_depth} must be non-negative")
    chosen = _check_weights(
        weights if weights is not None else geometric_weights(indices.indices, weight_ratio),
        indices.indices,
    )

    lowest, highest = indices.indices[0], indices.indices[-1]
    orbit: Dict[int, Any] = {0: base.seed}
    for i in range(1, highest + 2):
        orbit[i] = base.step(orbit[i - 1])
    for i in range(-1, lowest - 1, -1):
        orbit[i] = base.step_back(orbit[i + 1])
    cached = {i: orbit[i] for i in range(lowest, highest + 2)}

    for first, second in itertools.combinations(sorted(cached), 2):
        gap = base.distance(cached[first], cached[second])
        if gap <= APERIODICITY_TOLERANCE:
            raise AperiodicityError(first, second, gap)

    if fiber_kind is FiberKind.TOWER and bonding is None:
        bonding = crooked_map(2)
    radius = settings.CHART_RADIUS if chart_radius is None else chart_radius
    if radius <= 0.0:
        raise PreconditionError(f"Chart radius {radius!r} must be positive")

    logger.debug(
        "Built blow-up stage",
        extra={"base": base.kind, "mode": indices.mode.value, "n": indices.n},
    )
    return StageSpace(
        base=base,
        indices=indices,
        fiber_kind=fiber_kind,
        weights=chosen,
        orbit=cached,
        chart_radius=radius,
        bonding=bonding if fiber_kind is FiberKind.TOWER else None,
        tower_depth=tower_depth if fiber_kind is FiberKind.TOWER else 0,
    )


def coarsen(X: StageSpace) -> StageSpace:
    """The stage one level down, with the outermost fibers removed."""
    smaller = X.indices.coarsen()
    keep = smaller.indices
    orbit = {i: X.orbit[i] for i in range(keep[0], keep[-1] + 2)}
    return StageSpace(
        base=X.base,
        indices=smaller,
        fiber_kind=X.fiber_kind,
        weights={i: X.weights[i] for i in keep},
        orbit=orbit,
        chart_radius=X.chart_radius,
        bonding=X.bonding,
        tower_depth=X.tower_depth,
    )


def _blown_index(X: StageSpace, q: Any) -> Optional[int]:
    for i in X.indices.indices:
        if X.base.distance(q, X.orbit[i]) <= SINGULARITY_TOLERANCE:
            return i
    return None


def validate_point(X: StageSpace, p: StagePoint) -> None:
    """Check that p is a point of X.

    Raises:
        ChartSingularityError: If a regular point sits on a blown orbit point
        InvalidPointError: If a fiber index or coordinate is not valid for X
    """
    if isinstance(p, Regular):
        hit = _blown_index(X, p.base)
        if hit is not None:
            raise ChartSingularityError(hit)
        return
    if p.index not in X.indices:
        raise InvalidPointError(f"Fiber index {p.index} is not blown in this stage")
    if X.fiber_kind is FiberKind.INTERVAL and not isinstance(p.coord, IntervalU):
        raise InvalidPointError("Interval fibers need an interval coordinate")
    if X.fiber_kind is FiberKind.TOWER:
        if not isinstance(p.coord, TowerT):
            raise InvalidPointError("Tower fibers need a tower coordinate")
        if len(p.coord.tower) != X.tower_depth + 1 or not tower_check(X.bonding, p.coord.tower):
            raise InvalidPointError(f"Tower {p.coord.tower!r} is not consistent for this stage")


def stage_project(X: StageSpace, p: StagePoint) -> Any:
    """Collapse every fiber to its blown orbit point."""
    if isinstance(p, Regular):
        return p.base
    return X.orbit[p.index]


def stage_map(X: StageSpace, p: StagePoint) -> StagePoint:
    """The stage map H_n.

    Raises:
        ChartSingularityError: If a regular point is, or maps onto, a blown point
    """
    validate_point(X, p)
    if isinstance(p, Regular):
        image = X.base.step(p.base)
        hit = _blown_index(X, image)
        if hit is not None:
            raise ChartSingularityError(hit)
        return Regular(image)
    following = p.index + 1
    if following not in X.indices:
        return Regular(X.orbit[following])
    if isinstance(p.coord, TowerT):
        return Fiber(following, p.coord)
    return Fiber(following, IntervalU(X.base.transport(X.orbit[p.index], p.coord.u)))


def stage_refine(X: StageSpace, p: StagePoint) -> StagePoint:
    """Image of p under the bonding map from X onto coarsen(X)."""
    if isinstance(p, Fiber) and p.index in X.indices.outermost:
        return Regular(X.orbit[p.index])
    return p


def direction_coordinate(X: StageSpace, i: int, q: Any) -> float:
    """Direction of q seen from z_i, faded to 0 between one and two chart radii.

    Raises:
        UndefinedDirectionError: If q is z_i
    """
    z = X.orbit[i]
    if X.base.distance(q, z) <= SINGULARITY_TOLERANCE:
        raise UndefinedDirectionError(i)
    y = X.base.displacement(q, z)
    norm = math.hypot(*y)
    if norm == 0.0:
        raise UndefinedDirectionError(i)
    fade = min(1.0, max(0.0, 2.0 - norm / X.chart_radius))
    if fade == 0.0:
        return 0.0
    return fade * X.base.direction(y)


def _chi(X: StageSpace, i: int, p: StagePoint) -> float:
    if isinstance(p, Fiber) and p.index == i:
        return p.coord.scalar
    return direction_coordinate(X, i, stage_project(X, p))


def stage_metric(X: StageSpace, a: StagePoint, b: StagePoint) -> float:
    """Base distance of the projections plus weighted direction differences."""
    total = X.base.distance(stage_project(X, a), stage_project(X, b))
    for i in X.indices.indices:
        w = X.weights[i]
        if (
            isinstance(a, Fiber)
            and isinstance(b, Fiber)
            and a.index == b.index == i
            and isinstance(a.coord, TowerT)
            and isinstance(b.coord, TowerT)
        ):
            total += w * tower_metric(a.coord.tower, b.coord.tower)
            continue
        total += w * abs(_chi(X, i, a) - _chi(X, i, b))
    return total


def fiber_extremes(X: StageSpace, i: int) -> Tuple[Fiber, Fiber]:
    """Two points of fiber i realising its diameter."""
    if X.fiber_kind is FiberKind.TOWER:
        depth = X.tower_depth + 1
        return Fiber(i, TowerT((0.0,) * depth)), Fiber(i, TowerT((1.0,) * depth))
    return Fiber(i, IntervalU(-1.0)), Fiber(i, IntervalU(1.0))


def fiber_diameter(X: StageSpace, i: int) -> float:
    """Diameter of fiber i under the stage metric (2 w_i)."""
    if i not in X.indices:
        raise InvalidPointError(f"Fiber index {i} is not blown in this stage")
    return 2.0 * X.weights[i]


def fiber_orbit_diameters(X: StageSpace, i0: int, k: int) -> List[float]:
    """Diameters of the images of fiber i0 after 0..k stage-map steps (0 once collapsed)."""
    if i0 not in X.indices:
        raise InvalidPointError(f"Fiber index {i0} is not blown in this stage")
    if k < 0:
        raise PreconditionError(f"Step count {k} must be non-negative")
    diameters: List[float] = []
    for j in range(k + 1):
        index = i0 + j
        diameters.append(fiber_diameter(X, index) if index in X.indices else 0.0)
    return diameters


def diameter_rows(X: StageSpace, k: int) -> List[Tuple[int, float, float, float]]:
    """(index, weight, diameter, diameterAfterK) for every blown index."""
    return [
        (i, X.weights[i], fiber_diameter(X, i), fiber_orbit_diameters(X, i, k)[-1])
        for i in X.indices.indices
    ]


@dataclass(frozen=True)
class Witness:
    """Two distinct stage points with a common image."""

    first: Fiber
    second: Fiber
    image: StagePoint
    separation: float
    image_distance: float
    images_equal: bool


def noninvertibility_witness(X: StageSpace) -> Witness:
    """Two points of fiber -1 that the stage map sends to the seed.

    Raises:
        ModeError: If X is two-sided (the finite stage map is invertible there)
    """
    if X.indices.mode is not BlowupMode.BACKWARD_ONLY:
        raise ModeError("A noninvertibility witness needs a backward-only blow-up")
    if X.fiber_kind is FiberKind.TOWER:
        first, second = fiber_extremes(X, -1)
    else:
        first, second = Fiber(-1, IntervalU(-0.5)), Fiber(-1, IntervalU(0.5))
    image_first = stage_map(X, first)
    image_second = stage_map(X, second)
    return Witness(
        first=first,
        second=second,
        image=image_first,
        separation=stage_metric(X, first, second),
        image_distance=stage_metric(X, image_first, image_second),
        images_equal=image_first == image_second,
    )


def klein_lift_defect(X: StageSpace, rng: np.random.Generator, per_fiber: int) -> float:
    """Compare a Klein stage with the torus stages blown at both lifts of its seed.

    Near the lift c_i of a blown class the Klein direction equals the torus
    direction seen from c_i, negated when c_i is the flipped lift; iota
    carries the torus direction at c_i to its negative at iota(c_i).

    Returns:
        Largest disagreement over ``per_fiber`` sampled points near every fiber

    Raises:
        PreconditionError: If X is not a stage over a Klein base
    """
    if not isinstance(X.base, KleinBase) or X.fiber_kind is not FiberKind.INTERVAL:
        raise PreconditionError("Lift comparison needs interval fibers over a Klein base")
    lift = X.base.seed.representative
    stages = [
        build_stage(
            SkewBase(X.base.skew, seed),
            X.indices,
            weights=X.weights,
            chart_radius=X.chart_radius,
        )
        for seed in (lift, klein_involution(lift))
    ]
    worst = 0.0
    for i in X.indices.indices:
        center = stages[0].orbit[i]
        sign = 1.0 if torus_distance(center, X.orbit[i].representative) < 0.25 else -1.0
        offsets = rng.uniform(-X.chart_radius, X.chart_radius, size=(per_fiber, 2))
        for dx, dy in offsets:
            q = TorusPoint(center.x + dx, center.y + dy)
            direct = direction_coordinate(stages[0], i, q)
            seen = direction_coordinate(X, i, klein_project(q))
            partner = direction_coordinate(stages[1], i, klein_involution(q))
            worst = max(worst, abs(seen - sign * direct), abs(partner + direct))
    return worst


def sample_stage_points(
    X: StageSpace, rng: np.random.Generator, count: int
) -> List[StagePoint]:
    """Random valid stage points, roughly half of them on fibers."""
    if count < 1:
        raise EmptyRequestError("sample count")
    points: List[StagePoint] = []
    indices = X.indices.indices
    while len(points) < count:
        if rng.random() < 0.5:
            i = indices[int(rng.integers(len(indices)))]
            points.append(Fiber(i, _random_coord(X, rng)))
            continue
        q = X.base.random_point(rng)
        if _blown_index(X, q) is None and _blown_index(X, X.base.step(q)) is None:
            points.append(Regular(q))
    return points


def _random_coord(X: StageSpace, rng: np.random.Generator) -> FiberCoord:
    if X.fiber_kind is FiberKind.INTERVAL:
        return IntervalU(float(rng.uniform(-1.0, 1.0)))
    tower: Tower = (float(rng.random()),)
    for _ in range(X.tower_depth):
        options = preimages(X.bonding, tower[-1])
        tower = tower + (options[int(rng.integers(len(options)))],)
    return TowerT(tower)


@dataclass(frozen=True)
class FiberCensus:
    """Sampled fiber structure of the projection onto the base."""

    sample_count: int
    singletons: int
    blown_hits: int
    histogram: Dict[float, int]
    thresholds: List[Tuple[int, int, int]]

    @property
    def singleton_fraction(self) -> float:
        return self.singletons / self.sample_count


def almost_one_to_one_report(
    X: StageSpace,
    sample_count: int,
    thresholds: Sequence[int],
    rng: np.random.Generator,
) -> FiberCensus:
    """Sample base points and count singleton fibers and small fibers.

    Every threshold n is reported as (n, measured, expected), where measured
    counts blown indices whose fiber diameter, measured with the stage metric
    between extreme fiber points, is below 1/n, and expected is the closed
    form count of 2 w_i < 1/n.
    """
    if sample_count < 1:
        raise EmptyRequestError("sample count")
    histogram: Dict[float, int] = {}
    hits = 0
    for _ in range(sample_count):
        hit = _blown_index(X, X.base.random_point(rng))
        diameter = 0.0 if hit is None else fiber_diameter(X, hit)
        hits += hit is not None
        histogram[diameter] = histogram.get(diameter, 0) + 1

    measured = {i: stage_metric(X, *fiber_extremes(X, i)) for i in X.indices.indices}
    rows = []
    for n in thresholds:
        if n < 1:
            raise PreconditionError(f"Threshold {n} must be at least 1")
        below = sum(1 for d in measured.values() if d < 1.0 / n)
        expected = sum(1 for w in X.weights.values() if 2.0 * w < 1.0 / n)
        rows.append((n, below, expected))
    return FiberCensus(
        sample_count=sample_count,
        singletons=sample_count - hits,
        blown_hits=hits,
        histogram=dict(sorted(histogram.items())),
        thresholds=rows,
    )
