"""Suspension flows over Cantor minimal systems.

The phase space is C x [0, 1) with (x, 1) identified with (h(x), 0); the flow
moves at unit speed in the second coordinate and applies h on every wrap.
Two Cantor systems are supported: a depth-L binary odometer and the Cantor
part of a Denjoy system.
"""

from __future__ import annotations

import abc
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from minlab.core.exceptions import DepthError, InvalidPointError, PreconditionError
from minlab.models.circle import (
    CantorPoint,
    CirclePoint,
    DenjoySystem,
    GapPoint,
    Side,
    circle_distance,
    denjoy_embed,
    denjoy_iterate,
    denjoy_semiconjugacy,
    signed_offset,
    wrap_array,
)
from minlab.schemas.reports import VERDICT_DENSE, VERDICT_SPARSE, DensityReport

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class CantorSystem(abc.ABC):
    """Minimal homeomorphism of a Cantor set, as seen by the suspension."""

    name: str

    @abc.abstractmethod
    def validate(self, point: Any) -> Any:
        """Return the canonical form of a point, or raise InvalidPointError."""

    @abc.abstractmethod
    def step(self, point: Any, k: int) -> Any:
        """Apply h^k."""

    @abc.abstractmethod
    def distance(self, a: Any, b: Any) -> float:
        """Metric on the Cantor set, bounded by 1."""

    @abc.abstractmethod
    def embed(self, point: Any) -> np.ndarray:
        """Injective continuous embedding into R^d; sup-norm gaps track ``distance``."""

    @abc.abstractmethod
    def transverse(self, a: Any, b: Any) -> float:
        """Transverse chart coordinate of a relative to b."""

    @abc.abstractmethod
    def origin(self) -> Any:
        """Default starting point."""

    @abc.abstractmethod
    def random_point(self, rng: np.random.Generator) -> Any:
        """Random point of the Cantor set."""

    @abc.abstractmethod
    def cell_count(self, eps: float) -> int:
        """Number of base cells used by the density grid."""

    @abc.abstractmethod
    def cells_along(self, start: Any, counts: np.ndarray, eps: float) -> np.ndarray:
        """Base cell index of h^k(start) for every k in ``counts``."""

    def coordinates(self, point: Any) -> Tuple[float, ...]:
        """Numeric description used in reports."""
        return ()


@dataclass(frozen=True)
class OdometerWord:
    """Binary word of an odometer, least significant digit first."""

    digits: Tuple[int, ...]

    @property
    def value(self) -> int:
        return sum(d << i for i, d in enumerate(self.digits))

    @classmethod
    def from_value(cls, value: int, depth: int) -> "OdometerWord":
        return cls(tuple((value >> i) & 1 for i in range(depth)))


class Odometer(CantorSystem):
    """Adding machine on {0,1}^L: add one at the first digit and carry."""

    name = "odometer"

    def __init__(self, depth: int) -> None:
        if depth < 2:
            raise PreconditionError(f"Odometer depth {depth} must be at least 2")
        self.depth = depth
        self.modulus = 1 << depth

    def validate(self, point: Any) -> OdometerWord:
        if not isinstance(point, OdometerWord) or len(point.digits) != self.depth:
            raise InvalidPointError(f"Expected an odometer word of length {self.depth}")
        if any(d not in (0, 1) for d in point.digits):
            raise InvalidPointError("Odometer digits must be 0 or 1")
        return point

    def step(self, point: OdometerWord, k: int) -> OdometerWord:
        return OdometerWord.from_value((point.value + k) % self.modulus, self.depth)

    def distance(self, a: OdometerWord, b: OdometerWord) -> float:
        diff = a.value ^ b.value
        if diff == 0:
            return 0.0
        first = (diff & -diff).bit_length() - 1
        return 2.0 ** (-first)

    def embed(self, point: OdometerWord) -> np.ndarray:
        return np.array(point.digits, dtype=float) * self.scales

    @property
    def scales(self) -> np.ndarray:
        return 0.5 ** np.arange(self.depth, dtype=float)

    def transverse(self, a: OdometerWord, b: OdometerWord) -> float:
        return self.distance(a, b)

    def origin(self) -> OdometerWord:
        return OdometerWord.from_value(0, self.depth)

    def random_point(self, rng: np.random.Generator) -> OdometerWord:
        return OdometerWord.from_value(int(rng.integers(self.modulus)), self.depth)

    def cell_count(self, eps: float) -> int:
        return self.modulus

    def cells_along(self, start: OdometerWord, counts: np.ndarray, eps: float) -> np.ndarray:
        return np.mod(start.value + counts, self.modulus)

    def coordinates(self, point: OdometerWord) -> Tuple[float, ...]:
        return (float(point.value),)

    def check_headroom(self, t: float) -> None:
        if abs(t) > 2.0 ** (self.depth - 2):
            raise DepthError(t, self.depth)


def odometer_cylinder_census(depth: int) -> np.ndarray:
    """Visit counts of every length-L cylinder along the orbit of 0 of length 2^L."""
    if depth > 16:
        raise PreconditionError("Exact cylinder census is limited to depth 16")
    odometer = Odometer(depth)
    counts = np.zeros(odometer.modulus, dtype=int)
    word = odometer.origin()
    for _ in range(odometer.modulus):
        counts[word.value] += 1
        word = odometer.step(word, 1)
    return counts


class DenjoyCantor(CantorSystem):
    """The invariant Cantor set of a Denjoy system with h restricted to it."""

    name = "denjoy"

    def __init__(self, system: DenjoySystem) -> None:
        self.system = system

    def validate(self, point: Any) -> CantorPoint:
        if isinstance(point, GapPoint):
            if point.s not in (0.0, 1.0):
                raise InvalidPointError(
                    f"Gap interior point {point!r} is not on the Denjoy Cantor set"
                )
            self.system.validate(point)
            side = Side.LEFT if point.s == 0.0 else Side.RIGHT
            return CantorPoint(self.system.orbit_point(point.seed, point.index), side)
        if not isinstance(point, CantorPoint):
            raise InvalidPointError(f"Expected a Cantor point, got {point!r}")
        self.system.validate(point)
        return point

    def step(self, point: CantorPoint, k: int) -> CantorPoint:
        return denjoy_iterate(self.system, point, k)

    def distance(self, a: CantorPoint, b: CantorPoint) -> float:
        return circle_distance(
            denjoy_embed(self.system, a).angle, denjoy_embed(self.system, b).angle
        )

    def embed(self, point: CantorPoint) -> np.ndarray:
        turn = TWO_PI * denjoy_embed(self.system, point).angle
        return np.array([math.cos(turn), math.sin(turn)]) / TWO_PI

    def transverse(self, a: CantorPoint, b: CantorPoint) -> float:
        return signed_offset(
            denjoy_embed(self.system, a).angle, denjoy_embed(self.system, b).angle
        )

    def origin(self) -> CantorPoint:
        return CantorPoint(self.system.seeds[0], Side.LEFT)

    def random_point(self, rng: np.random.Generator) -> CantorPoint:
        base = CirclePoint(float(rng.random()))
        return CantorPoint(base, Side.LEFT if self.system.locate(base) else None)

    def cell_count(self, eps: float) -> int:
        return _bins(eps)

    def cells_along(self, start: CantorPoint, counts: np.ndarray, eps: float) -> np.ndarray:
        # cells live on the rotation factor; the Cantor set itself has empty interior
        base = denjoy_semiconjugacy(self.system, start).angle
        bins = _bins(eps)
        angles = wrap_array(base + counts * self.system.alpha)
        return np.minimum((angles * bins).astype(np.int64), bins - 1)

    def coordinates(self, point: CantorPoint) -> Tuple[float, ...]:
        return (denjoy_embed(self.system, point).angle,)


def _bins(eps: float) -> int:
    return max(1, int(math.ceil(1.0 / eps - 1e-9)))


@dataclass(frozen=True)
class SuspensionPoint:
    """Point (base, s) of the suspension, with 0 <= s < 1."""

    base: Any
    s: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.s < 1.0:
            raise InvalidPointError(f"Suspension height {self.s!r} must lie in [0, 1)")


@dataclass(frozen=True, eq=False)
class SuspensionSystem:
    """Suspension flow of a Cantor system under the unit roof."""

    h: CantorSystem

    def point(self, base: Any, s: float = 0.0) -> SuspensionPoint:
        """Build a point, applying the identification (x, s) ~ (h(x), s - 1) eagerly."""
        canonical = self.h.validate(base)
        k = math.floor(s)
        return SuspensionPoint(self.h.step(canonical, k) if k else canonical, s - k)

    def lift(self, p: SuspensionPoint) -> Tuple[np.ndarray, np.ndarray]:
        """Seam-compatible vectors of (x, s).

        The first blends E(x) into E(h(x)) as s runs to 1, the second is
        sin(pi s) E(x). Both agree on (x, 1) and (h(x), 0), and the second
        recovers x whenever s > 0.
        """
        here = self.h.embed(p.base)
        there = self.h.embed(self.h.step(p.base, 1))
        return (1.0 - p.s) * here + p.s * there, math.sin(math.pi * p.s) * here

    def distance(self, a: SuspensionPoint, b: SuspensionPoint) -> float:
        """Height distance on the circle plus sup-norm gaps of the lifts, capped at 1.

        Between two points at height 0 it is the sup-norm gap of the base
        embeddings, which is the 2^-i metric for the odometer. The map
        (x, s) -> (s, lift) is injective on the quotient.
        """
        blend_a, bump_a = self.lift(a)
        blend_b, bump_b = self.lift(b)
        total = (
            circle_distance(a.s, b.s)
            + float(np.max(np.abs(blend_a - blend_b)))
            + float(np.max(np.abs(bump_a - bump_b)))
        )
        return min(1.0, total)

    def chart_displacement(self, q: SuspensionPoint, z: SuspensionPoint) -> Tuple[float, float]:
        """Flow-box coordinates (flow time, transverse) of q around z."""
        best: Optional[Tuple[float, float]] = None
        for k in (0, -1, 1):
            tau = q.s - (z.s - k)
            if abs(tau) > 1.0:
                continue
            transverse = self.h.transverse(q.base, self.h.step(z.base, k))
            if best is None or math.hypot(tau, transverse) < math.hypot(*best):
                best = (tau, transverse)
        assert best is not None
        return best

    def random_point(self, rng: np.random.Generator) -> SuspensionPoint:
        return SuspensionPoint(self.h.random_point(rng), float(rng.random()))

    def coordinates(self, p: SuspensionPoint) -> Tuple[float, ...]:
        return self.h.coordinates(p.base) + (p.s,)


def suspend(h: CantorSystem) -> SuspensionSystem:
    """Suspension flow of h with unit roof."""
    if not isinstance(h, CantorSystem):
        raise PreconditionError(f"Cannot suspend {h!r}: not a Cantor system")
    return SuspensionSystem(h)


def flow(sys: SuspensionSystem, p: SuspensionPoint, t: float) -> SuspensionPoint:
    """phi_t(x, s) = (x, s + t) reduced by the identification.

    Raises:
        DepthError: If an odometer base lacks carry headroom for t
    """
    if isinstance(sys.h, Odometer):
        sys.h.check_headroom(t)
    total = p.s + t
    k = math.floor(total)
    s = total - k
    if s >= 1.0:
        s -= 1.0
        k += 1
    return SuspensionPoint(sys.h.step(p.base, k) if k else p.base, s)


@dataclass(frozen=True, eq=False)
class TimeTMap:
    """Handle for the time-t map F_t of a suspension flow."""

    system: SuspensionSystem
    t: float

    def __call__(self, p: SuspensionPoint) -> SuspensionPoint:
        return flow(self.system, p, self.t)


def time_t_map(sys: SuspensionSystem, t: float) -> TimeTMap:
    """F_t = phi(t, .) for t > 0."""
    if t <= 0.0:
        raise PreconditionError(f"Flow time {t!r} must be positive")
    return TimeTMap(sys, t)


def _longest_unvisited_run(row: np.ndarray) -> int:
    visited = np.flatnonzero(row)
    if visited.size == 0:
        return row.size
    gaps = np.diff(np.append(visited, visited[0] + row.size)) - 1
    return int(gaps.max())


def certify_minimal_time(
    sys: SuspensionSystem,
    t: float,
    eps: float,
    N: int,
    start: Optional[SuspensionPoint] = None,
) -> DensityReport:
    """Empirical eps-density of N iterates of F_t on a base-cell x height grid.

    The report never claims minimality, only that every cell was or was not
    visited within the horizon.

    Args:
        sys: Suspension system
        t: Flow time
        eps: Height resolution (1/eps cells per base cell)
        N: Number of iterates
        start: Starting point, default (origin, 0)

    Returns:
        Density report
    """
    if eps <= 0.0:
        raise PreconditionError(f"Resolution {eps!r} must be positive")
    if N < 1:
        raise PreconditionError(f"Horizon {N!r} must be at least 1")
    start = start or SuspensionPoint(sys.h.origin(), 0.0)
    bins = _bins(eps)
    heights = start.s + t * np.arange(N, dtype=float)
    wraps = np.floor(heights)
    fractional = heights - wraps
    base_cells = sys.h.cells_along(start.base, wraps.astype(np.int64), eps)
    height_cells = np.minimum((fractional * bins).astype(np.int64), bins - 1)

    visited = np.zeros((sys.h.cell_count(eps), bins), dtype=bool)
    visited[base_cells, height_cells] = True
    missed = int(visited.size - np.count_nonzero(visited))
    longest = max(_longest_unvisited_run(row) for row in visited)
    covering = 1.0 if longest >= bins else (longest + 1) / bins

    logger.info(
        "Certified time-t map",
        extra={"t": t, "eps": eps, "N": N, "cells_missed": missed},
    )
    return DensityReport(
        t=t,
        eps=eps,
        N=N,
        coveringRadius=covering,
        verdict=VERDICT_DENSE if missed == 0 else VERDICT_SPARSE,
        cellsMissed=missed,
        cellsTotal=int(visited.size),
    )
