"""Circle rotations, orbit density and Denjoy blow-ups of rotation orbits.

Points of S^1 = R/Z are stored as angles in [0, 1). A Denjoy system replaces
every point of finitely many rotation orbits by a gap of positive length; the
resulting circle map collapses back onto the rotation through the
semiconjugacy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from minlab.core.config import settings
from minlab.core.exceptions import (
    EmptyRequestError,
    InvalidPointError,
    PreconditionError,
    RotationNumberError,
    ScheduleError,
    SeedError,
    TruncationError,
)

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def wrap(value: float) -> float:
    """Reduce a real number into [0, 1)."""
    reduced = value % 1.0
    # tiny negatives round up to exactly 1.0
    return 0.0 if reduced >= 1.0 else reduced


def wrap_array(values: np.ndarray) -> np.ndarray:
    """Vectorised :func:`wrap`."""
    reduced = np.mod(values, 1.0)
    reduced[reduced >= 1.0] = 0.0
    return reduced


def circle_distance(a: float, b: float) -> float:
    """Distance on R/Z: min(|a - b|, 1 - |a - b|) after reduction."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def signed_offset(a: float, b: float) -> float:
    """Offset from b to a, reduced into [-1/2, 1/2)."""
    return wrap(a - b + 0.5) - 0.5


@dataclass(frozen=True, eq=False)
class CirclePoint:
    """A point of the circle R/Z."""

    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", wrap(float(self.angle)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return circle_distance(self.angle, other.angle) < TOLERANCE

    __hash__ = None  # equality is tolerant

    def __float__(self) -> float:
        return self.angle

    def __repr__(self) -> str:
        return f"CirclePoint({self.angle!r})"


def rational_approximation(
    alpha: float,
    max_denominator: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> Optional[Fraction]:
    """Detect numerically rational numbers.

    The continued-fraction expansion of ``alpha`` is cut at the largest
    denominator allowed. The resulting convergent p/q counts as alpha when
    |alpha - p/q| is within a few ulps of alpha or below tolerance / q^2.

    Args:
        alpha: Real number to inspect
        max_denominator: Largest denominator considered
        tolerance: Agreement required, scaled by 1/q^2

    Returns:
        The fraction p/q when alpha is numerically rational, otherwise None
    """
    max_denominator = max_denominator or settings.RATIONAL_MAX_DENOMINATOR
    tolerance = settings.RATIONAL_TOLERANCE if tolerance is None else tolerance
    candidate = Fraction(alpha).limit_denominator(max_denominator)
    error = abs(alpha - float(candidate))
    q = candidate.denominator
    if error <= settings.RATIONAL_ULPS * math.ulp(alpha) or error < tolerance / (q * q):
        return candidate
    return None


def continued_fraction(alpha: float, terms: int = 32) -> List[int]:
    """Partial quotients of the exact binary value of ``alpha``."""
    exact = Fraction(alpha)
    p, q = exact.numerator, exact.denominator
    quotients: List[int] = []
    while q and len(quotients) < terms:
        a = p // q
        quotients.append(a)
        p, q = q, p - a * q
    return quotients


def convergent_denominators(alpha: float, limit: int) -> List[int]:
    """Distinct denominators of the continued-fraction convergents up to ``limit``."""
    denominators: List[int] = []
    q_prev, q = 0, 1
    for a in continued_fraction(alpha, terms=64)[1:]:
        q_prev, q = q, a * q + q_prev
        if q > limit:
            break
        if not denominators or denominators[-1] != q:
            denominators.append(q)
    if not denominators or denominators[0] != 1:
        denominators.insert(0, 1)
    return denominators


@dataclass(frozen=True)
class RotationSystem:
    """Rotation of the circle by ``alpha``."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise PreconditionError(f"Rotation number {self.alpha!r} must lie in (0, 1)")

    @cached_property
    def rational(self) -> Optional[Fraction]:
        """p/q with q <= 10^6 matching alpha to float precision, computed once."""
        return rational_approximation(self.alpha)

    @property
    def is_rational(self) -> bool:
        return self.rational is not None


def rotate(x: CirclePoint, sys: RotationSystem) -> CirclePoint:
    """Apply the rotation once."""
    return CirclePoint(x.angle + sys.alpha)


def rotate_inverse(x: CirclePoint, sys: RotationSystem) -> CirclePoint:
    """Apply the inverse rotation once."""
    return CirclePoint(x.angle - sys.alpha)


def orbit_angles(alpha: float, start: float, n: int) -> np.ndarray:
    """Angles start + k*alpha mod 1 for k < n."""
    if n < 1:
        raise EmptyRequestError("orbit length")
    return wrap_array(start + alpha * np.arange(n, dtype=float))


def _as_angles(points: Union[Sequence[CirclePoint], np.ndarray]) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return wrap_array(points.astype(float).ravel())
    return np.fromiter((p.angle for p in points), dtype=float)


def eps_density(points: Union[Sequence[CirclePoint], np.ndarray]) -> float:
    """Largest circular gap of a point set.

    A set is eps-dense exactly when the returned value is below eps.

    Args:
        points: Circle points, or raw angles

    Returns:
        Length of the largest gap between cyclically consecutive points

    Raises:
        EmptyRequestError: If the point set is empty
    """
    angles = _as_angles(points)
    if angles.size == 0:
        raise EmptyRequestError("point set")
    ordered = np.sort(angles)
    wrap_gap = 1.0 - ordered[-1] + ordered[0]
    inner = float(np.diff(ordered).max()) if ordered.size > 1 else 0.0
    return max(inner, float(wrap_gap))


def density_at_convergents(alpha: float, start: float, limit: int) -> List[Tuple[int, float]]:
    """(q, largest gap of the first q orbit points) for every convergent denominator q <= limit."""
    angles = orbit_angles(alpha, start, limit)
    return [(q, eps_density(angles[:q])) for q in convergent_denominators(alpha, limit)]


def gap_spectrum(
    points: Union[Sequence[CirclePoint], np.ndarray], tolerance: float = 1e-9
) -> List[float]:
    """Distinct consecutive gap lengths of a point set (three-distance check)."""
    angles = _as_angles(points)
    if angles.size == 0:
        raise EmptyRequestError("point set")
    ordered = np.sort(angles)
    gaps = np.append(np.diff(ordered), 1.0 - ordered[-1] + ordered[0])
    distinct: List[float] = []
    for gap in np.sort(gaps):
        if not distinct or gap - distinct[-1] > tolerance:
            distinct.append(float(gap))
    return distinct


# Denjoy systems


class Side(str, Enum):
    """Which endpoint of a gap a Cantor point on a blown orbit stands for."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class CantorPoint:
    """Point of the invariant Cantor set, addressed by its rotation image."""

    base: CirclePoint
    side: Optional[Side] = None


@dataclass(frozen=True)
class GapPoint:
    """Point inside gap (seed, index) at affine position s in [0, 1]."""

    seed: int
    index: int
    s: float


DenjoyPoint = Union[CantorPoint, GapPoint]


@dataclass(frozen=True)
class GeometricGapSchedule:
    """Gap lengths scale * ratio^|k|, identical for every seed."""

    scale: float
    ratio: float = 0.5

    def __post_init__(self) -> None:
        if self.scale <= 0.0 or not 0.0 < self.ratio < 1.0:
            raise PreconditionError("Geometric gap schedule needs scale > 0 and 0 < ratio < 1")

    def length(self, seed: int, index: int) -> float:
        return self.scale * self.ratio ** abs(index)

    def tail(self, seed_count: int, depth: int) -> float:
        """Gap mass of all indices |k| > depth, summed over seeds."""
        one_side = self.scale * self.ratio ** (depth + 1) / (1.0 - self.ratio)
        return seed_count * 2.0 * one_side

    @classmethod
    def half_circle(cls, seed_count: int) -> "GeometricGapSchedule":
        """Schedule whose full (untruncated) gap mass is exactly 1/2."""
        return cls(scale=1.0 / (6.0 * seed_count), ratio=0.5)


@dataclass(frozen=True)
class _Layout:
    keys: List[Tuple[int, int]]
    positions: np.ndarray
    lengths: np.ndarray
    cumulative: np.ndarray
    rank: Dict[Tuple[int, int], int]


@dataclass(frozen=True, eq=False)
class DenjoySystem:
    """Denjoy blow-up of finitely many orbits of an irrational rotation.

    Attributes:
        alpha: Rotation number
        seeds: Orbit representatives; seed 0 is the origin of the embedding
        gaps: Length of gap (seed j, orbit index k) for |k| <= depth
        depth: Orbit-depth truncation K
        total_gap: Sum of all stored gap lengths
        tail_bound: Gap mass of the untracked indices |k| > depth
    """

    alpha: float
    seeds: Tuple[CirclePoint, ...]
    gaps: Dict[Tuple[int, int], float]
    depth: int
    total_gap: float
    tail_bound: float

    @property
    def rotation(self) -> RotationSystem:
        return RotationSystem(self.alpha)

    def orbit_point(self, seed: int, index: int) -> CirclePoint:
        """Rotation-orbit point seed_j + k*alpha collapsed from gap (j, k)."""
        return CirclePoint(self.seeds[seed].angle + index * self.alpha)

    @cached_property
    def _layout(self) -> _Layout:
        origin = self.seeds[0].angle
        keys = list(self.gaps)
        relative = np.array(
            [wrap(self.orbit_point(j, k).angle - origin) for j, k in keys], dtype=float
        )
        order = np.argsort(relative, kind="stable")
        sorted_keys = [keys[i] for i in order]
        lengths = np.array([self.gaps[key] for key in sorted_keys], dtype=float)
        return _Layout(
            keys=sorted_keys,
            positions=relative[order],
            lengths=lengths,
            cumulative=np.concatenate([[0.0], np.cumsum(lengths)]),
            rank={key: i for i, key in enumerate(sorted_keys)},
        )

    def locate(self, x: CirclePoint) -> Optional[Tuple[int, int]]:
        """Return the gap key whose orbit point is x, if x is a blown point."""
        layout = self._layout
        relative = wrap(x.angle - self.seeds[0].angle)
        i = int(np.searchsorted(layout.positions, relative))
        size = layout.positions.size
        for candidate in (i - 1, i, i + 1):
            j = candidate % size
            if circle_distance(layout.positions[j], relative) < TOLERANCE:
                return layout.keys[j]
        return None

    def validate(self, p: DenjoyPoint) -> None:
        """Check that a point belongs to this system.

        Raises:
            InvalidPointError: If the point is malformed for this system
        """
        if isinstance(p, GapPoint):
            if (p.seed, p.index) not in self.gaps:
                raise InvalidPointError(
                    f"Gap ({p.seed}, {p.index}) is not in the stored schedule"
                )
            if not 0.0 <= p.s <= 1.0:
                raise InvalidPointError(f"Gap position {p.s!r} must lie in [0, 1]")
            return
        located = self.locate(p.base)
        if located is not None and p.side is None:
            raise InvalidPointError(
                f"{p.base!r} is blown orbit point {located}; a side marker is required"
            )
        if located is None and p.side is not None:
            raise InvalidPointError(f"{p.base!r} is not on a blown orbit; drop the side marker")


def denjoy_build(
    alpha: float,
    seeds: Sequence[Union[float, CirclePoint]],
    gap_schedule: Optional[GeometricGapSchedule] = None,
    depth: Optional[int] = None,
) -> DenjoySystem:
    """Blow up the orbits of ``seeds`` under rotation by ``alpha``.

    Args:
        alpha: Irrational rotation number in (0, 1)
        seeds: Orbit representatives on pairwise distinct orbits
        gap_schedule: Gap lengths; defaults to total mass 1/2
        depth: Orbit-depth truncation K (defaults to settings)

    Returns:
        Validated DenjoySystem

    Raises:
        RotationNumberError: If alpha is numerically rational
        ScheduleError: If the gaps do not fit on the circle
        SeedError: If two seeds share an orbit within depth 2K
    """
    rotation = RotationSystem(alpha)
    if rotation.rational is not None:
        raise RotationNumberError(
            alpha, rotation.rational.numerator, rotation.rational.denominator
        )
    points = tuple(s if isinstance(s, CirclePoint) else CirclePoint(s) for s in seeds)
    if not points:
        raise EmptyRequestError("seed list")
    depth = settings.DENJOY_DEPTH if depth is None else depth
    if depth < 1:
        raise PreconditionError(f"Orbit depth {depth} must be at least 1")
    schedule = gap_schedule or GeometricGapSchedule.half_circle(len(points))

    shifts = np.arange(-2 * depth, 2 * depth + 1)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            offsets = wrap_array(points[j].angle - points[i].angle - shifts * alpha)
            distances = np.minimum(offsets, 1.0 - offsets)
            hit = int(np.argmin(distances))
            if distances[hit] < TOLERANCE:
                raise SeedError(i, j, int(shifts[hit]))

    gaps: Dict[Tuple[int, int], float] = {}
    for j in range(len(points)):
        for k in range(-depth, depth + 1):
            length = schedule.length(j, k)
            if length <= 0.0:
                raise PreconditionError(f"Gap ({j}, {k}) has non-positive length {length!r}")
            gaps[(j, k)] = length
    total = math.fsum(gaps.values())
    tail = schedule.tail(len(points), depth)
    if total + tail >= 1.0:
        raise ScheduleError(total + tail)
    if tail > 1e-9 * total:
        raise PreconditionError(
            f"Untracked gap mass {tail:.3e} exceeds 1e-9 of the total; increase the depth"
        )

    logger.debug(
        "Built Denjoy system",
        extra={"alpha": alpha, "seeds": len(points), "depth": depth, "total_gap": total},
    )
    return DenjoySystem(
        alpha=alpha,
        seeds=points,
        gaps=gaps,
        depth=depth,
        total_gap=total,
        tail_bound=tail,
    )


def _shift_orbit_index(sys: DenjoySystem, seed: int, index: int) -> int:
    if abs(index) > sys.depth:
        raise TruncationError(seed, index, sys.depth, sys.tail_bound)
    return index


def denjoy_iterate(sys: DenjoySystem, p: DenjoyPoint, steps: int) -> DenjoyPoint:
    """Apply h^steps (negative steps apply the inverse).

    Raises:
        TruncationError: If a blown orbit index leaves the stored range
    """
    sys.validate(p)
    if isinstance(p, GapPoint):
        index = _shift_orbit_index(sys, p.seed, p.index + steps)
        return GapPoint(p.seed, index, p.s)
    located = sys.locate(p.base)
    if located is not None:
        seed, index = located
        index = _shift_orbit_index(sys, seed, index + steps)
        return CantorPoint(sys.orbit_point(seed, index), p.side)
    return CantorPoint(CirclePoint(p.base.angle + steps * sys.alpha))


def denjoy_map(sys: DenjoySystem, p: DenjoyPoint) -> DenjoyPoint:
    """The Denjoy homeomorphism h: gaps shift along the orbit, Cantor points rotate."""
    return denjoy_iterate(sys, p, 1)


def denjoy_inverse_map(sys: DenjoySystem, p: DenjoyPoint) -> DenjoyPoint:
    """The inverse h^-1."""
    return denjoy_iterate(sys, p, -1)


def denjoy_embed(sys: DenjoySystem, p: DenjoyPoint) -> CirclePoint:
    """Position of a point on the blown circle of circumference 1.

    The Cantor part is scaled by (1 - totalGap); every gap lying strictly
    before the point contributes its full length. Seed 0 sits at the origin.
    """
    sys.validate(p)
    layout = sys._layout
    scale = 1.0 - sys.total_gap
    if isinstance(p, CantorPoint):
        located = sys.locate(p.base)
        if located is None:
            relative = wrap(p.base.angle - sys.seeds[0].angle)
            before = int(np.searchsorted(layout.positions, relative, side="left"))
            return CirclePoint(scale * relative + layout.cumulative[before])
        s = 0.0 if p.side is Side.LEFT else 1.0
        p = GapPoint(located[0], located[1], s)
    i = layout.rank[(p.seed, p.index)]
    return CirclePoint(
        scale * layout.positions[i] + layout.cumulative[i] + p.s * layout.lengths[i]
    )


def denjoy_semiconjugacy(sys: DenjoySystem, p: DenjoyPoint) -> CirclePoint:
    """Collapse every gap to its rotation-orbit point (pi o h = R o pi)."""
    if isinstance(p, GapPoint):
        return sys.orbit_point(p.seed, p.index)
    return p.base


def sample_denjoy_points(
    sys: DenjoySystem, rng: np.random.Generator, count: int
) -> List[DenjoyPoint]:
    """Random valid points: roughly half inside gaps, half on the Cantor part."""
    keys = list(sys.gaps)
    points: List[DenjoyPoint] = []
    for _ in range(count):
        if rng.random() < 0.5:
            seed, index = keys[int(rng.integers(len(keys)))]
            points.append(GapPoint(seed, index, float(rng.random())))
            continue
        base = CirclePoint(float(rng.random()))
        located = sys.locate(base)
        side = Side.LEFT if located is not None else None
        points.append(CantorPoint(base, side))
    return points


def orbit(
    sys: Union[RotationSystem, DenjoySystem],
    x: Union[CirclePoint, DenjoyPoint],
    n: int,
) -> list:
    """Forward orbit [x, f(x), ..., f^(n-1)(x)].

    Args:
        sys: Rotation or Denjoy system
        x: Starting point of the matching kind
        n: Number of points

    Returns:
        List of exactly n points

    Raises:
        EmptyRequestError: If n < 1
    """
    if n < 1:
        raise EmptyRequestError("orbit length")
    if isinstance(sys, RotationSystem):
        return [CirclePoint(a) for a in orbit_angles(sys.alpha, x.angle, n)]
    points = [x]
    for _ in range(n - 1):
        points.append(denjoy_map(sys, points[-1]))
    return points
