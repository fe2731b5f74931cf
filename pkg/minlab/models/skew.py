"""Skew products on the torus, slope transport and the Klein-bottle quotient.

F(x, y) = (x + alpha, y + r(x)) with a finite odd-harmonic sine roof r. The
odd frequencies give r(x + 1/2) = -r(x), so F commutes with the involution
(x, y) -> (x + 1/2, 1 - y) and descends to the Klein bottle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple, Union

import numpy as np

from minlab.core.exceptions import EquivarianceError, PreconditionError, RoofError
from minlab.models.circle import TOLERANCE, circle_distance, signed_offset, wrap

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SYMMETRY_SAMPLES = 128
SYMMETRY_TOLERANCE = 1e-12

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^2 = S^1 x S^1, both coordinates reduced mod 1."""

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", wrap(float(self.x)))
        object.__setattr__(self, "y", wrap(float(self.y)))


def torus_distance(a: TorusPoint, b: TorusPoint) -> float:
    """Flat distance on the torus."""
    return math.hypot(circle_distance(a.x, b.x), circle_distance(a.y, b.y))


def torus_offset(a: TorusPoint, b: TorusPoint) -> Tuple[float, float]:
    """Displacement from b to a, each coordinate in [-1/2, 1/2)."""
    return signed_offset(a.x, b.x), signed_offset(a.y, b.y)


@dataclass(frozen=True)
class RoofFunction:
    """Finite sine series r(x) = sum a_k sin(2 pi m_k x).

    Attributes:
        harmonics: (frequency, amplitude) pairs with distinct frequencies
        odd_only: Reject even frequencies at construction
    """

    harmonics: Tuple[Tuple[int, float], ...] = ()
    odd_only: bool = True

    def __post_init__(self) -> None:
        pairs = tuple((int(m), float(a)) for m, a in self.harmonics)
        frequencies = [m for m, _ in pairs]
        if len(set(frequencies)) != len(frequencies):
            raise RoofError(f"Roof frequencies must be distinct, got {frequencies}")
        if any(m < 1 for m in frequencies):
            raise RoofError(f"Roof frequencies must be positive, got {frequencies}")
        if self.odd_only and any(m % 2 == 0 for m in frequencies):
            raise RoofError(f"Roof frequencies must be odd, got {frequencies}")
        object.__setattr__(self, "harmonics", pairs)

    @classmethod
    def from_pairs(
        cls, pairs: Sequence[Tuple[int, float]], odd_only: bool = True
    ) -> "RoofFunction":
        return cls(tuple(pairs), odd_only=odd_only)

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.array([m for m, _ in self.harmonics], dtype=float)

    @cached_property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for _, a in self.harmonics], dtype=float)

    @cached_property
    def derivative_bound(self) -> float:
        """Sum |a_k| 2 pi m_k, an upper bound for |r'|."""
        return float(np.sum(np.abs(self.amplitudes) * TWO_PI * self.frequencies))

    @cached_property
    def symmetry_residual(self) -> float:
        """Largest circle distance of r(x + 1/2) + r(x) from 0 on a sample grid."""
        xs = np.arange(SYMMETRY_SAMPLES, dtype=float) / SYMMETRY_SAMPLES
        total = roof_eval(self, xs + 0.5) + roof_eval(self, xs)
        reduced = np.mod(total, 1.0)
        return float(np.max(np.minimum(reduced, 1.0 - reduced)))


def roof_eval(r: RoofFunction, x: ArrayOrFloat) -> ArrayOrFloat:
    """r(x) = sum a_k sin(2 pi m_k x); accepts scalars or arrays."""
    if not r.harmonics:
        return np.zeros_like(x, dtype=float) if isinstance(x, np.ndarray) else 0.0
    phases = TWO_PI * np.multiply.outer(np.asarray(x, dtype=float), r.frequencies)
    value = np.sin(phases) @ r.amplitudes
    return value if isinstance(x, np.ndarray) else float(value)


def roof_derivative(r: RoofFunction, x: ArrayOrFloat) -> ArrayOrFloat:
    """r'(x) = sum a_k 2 pi m_k cos(2 pi m_k x)."""
    if not r.harmonics:
        return np.zeros_like(x, dtype=float) if isinstance(x, np.ndarray) else 0.0
    phases = TWO_PI * np.multiply.outer(np.asarray(x, dtype=float), r.frequencies)
    value = np.cos(phases) @ (r.amplitudes * TWO_PI * r.frequencies)
    return value if isinstance(x, np.ndarray) else float(value)


@dataclass(frozen=True)
class SkewSystem:
    """Skew product F(x, y) = (x + alpha, y + r(x))."""

    alpha: float
    roof: RoofFunction

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise PreconditionError(f"Rotation number {self.alpha!r} must lie in (0, 1)")


def skew_apply(F: SkewSystem, p: TorusPoint) -> TorusPoint:
    """One step of the skew product."""
    return TorusPoint(p.x + F.alpha, p.y + roof_eval(F.roof, p.x))


def skew_inverse(F: SkewSystem, p: TorusPoint) -> TorusPoint:
    """Explicit inverse (x - alpha, y - r(x - alpha))."""
    x = p.x - F.alpha
    return TorusPoint(x, p.y - roof_eval(F.roof, x))


def skew_iterate(F: SkewSystem, p: TorusPoint, steps: int) -> TorusPoint:
    """F^steps, negative steps using the inverse."""
    step = skew_apply if steps >= 0 else skew_inverse
    for _ in range(abs(steps)):
        p = step(F, p)
    return p


def skew_apply_array(
    F: SkewSystem, xs: np.ndarray, ys: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised skew product on coordinate arrays."""
    return np.mod(xs + F.alpha, 1.0), np.mod(ys + roof_eval(F.roof, xs), 1.0)


def skew_inverse_array(
    F: SkewSystem, xs: np.ndarray, ys: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised inverse skew product."""
    back = xs - F.alpha
    return np.mod(back, 1.0), np.mod(ys - roof_eval(F.roof, back), 1.0)


# Directions of lines through a point, compactified to the arc [-1, 1]


@dataclass(frozen=True)
class Direction:
    """Line direction in arc coordinate u = (2/pi) arctan(slope); u = +-1 is vertical."""

    u: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.u <= 1.0:
            raise PreconditionError(f"Arc coordinate {self.u!r} must lie in [-1, 1]")

    @property
    def is_vertical(self) -> bool:
        return abs(self.u) == 1.0

    @property
    def slope(self) -> float:
        if self.is_vertical:
            return math.copysign(math.inf, self.u)
        return math.tan(0.5 * math.pi * self.u)

    @classmethod
    def from_slope(cls, beta: float) -> "Direction":
        return cls(2.0 / math.pi * math.atan(beta))

    @classmethod
    def from_displacement(cls, dx: float, dy: float) -> "Direction":
        """Direction of the line through the origin and (dx, dy)."""
        if dx == 0.0:
            if dy == 0.0:
                raise PreconditionError("Zero displacement has no direction")
            return cls(1.0)
        return cls.from_slope(dy / dx)


def slope_transport(F: SkewSystem, x: float, d: Direction) -> Direction:
    """Asymptotic direction at F(z) of the image of a line through z = (x, y).

    Vertical lines stay vertical; a line of slope beta goes to slope
    beta + r'(x).
    """
    if d.is_vertical:
        return d
    return Direction.from_slope(d.slope + roof_derivative(F.roof, x))


def transport_along_orbit(F: SkewSystem, x: float, d: Direction, steps: int) -> Direction:
    """Slope transport along ``steps`` consecutive orbit points."""
    for i in range(steps):
        d = slope_transport(F, wrap(x + i * F.alpha), d)
    return d


def radial_secant_slope(
    F: SkewSystem, p: TorusPoint, beta: float, radius: float, samples: int = 9
) -> float:
    """Least-squares slope of the F-image of a radial segment through p.

    The segment {p + t (1, beta) : |t| <= radius} is pushed forward in lifted
    coordinates and a line is fitted through the image, relative to F(p).
    """
    ts = np.linspace(-radius, radius, samples)
    dx = ts
    dy = beta * ts + roof_eval(F.roof, p.x + ts) - roof_eval(F.roof, p.x)
    return float(np.polyfit(dx, dy, 1)[0])


# Klein bottle quotient (x, y) ~ (x + 1/2, 1 - y)


@dataclass(frozen=True)
class KleinPoint:
    """Canonical representative with x in [0, 1/2)."""

    x: float
    y: float

    @property
    def representative(self) -> TorusPoint:
        return TorusPoint(self.x, self.y)

    @property
    def partner(self) -> TorusPoint:
        return klein_involution(self.representative)


def klein_involution(p: TorusPoint) -> TorusPoint:
    """(x, y) -> (x + 1/2, 1 - y)."""
    return TorusPoint(p.x + 0.5, 1.0 - p.y)


def klein_project(p: TorusPoint) -> KleinPoint:
    """Canonical representative of the class of p, half-open convention x in [0, 1/2)."""
    if p.x < 0.5 - TOLERANCE:
        return KleinPoint(p.x, p.y)
    image = klein_involution(p)
    x = image.x
    if x >= 1.0 - TOLERANCE:
        x = 0.0
    return KleinPoint(x, image.y)


def klein_distance(a: KleinPoint, b: KleinPoint) -> float:
    """Quotient distance: torus distance minimised over both representatives."""
    target = b.representative
    return min(torus_distance(a.representative, target), torus_distance(a.partner, target))


def klein_induced(F: SkewSystem, q: KleinPoint) -> KleinPoint:
    """The homeomorphism G of the Klein bottle with p o F = G o p.

    Raises:
        EquivarianceError: If the roof is not odd-symmetric on the sample grid
    """
    residual = F.roof.symmetry_residual
    if residual > SYMMETRY_TOLERANCE:
        raise EquivarianceError(residual)
    return klein_project(skew_apply(F, q.representative))


def klein_project_array(xs: np.ndarray, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised klein_project on coordinate arrays."""
    flip = xs >= 0.5 - TOLERANCE
    px = np.where(flip, np.mod(xs + 0.5, 1.0), xs)
    py = np.where(flip, np.mod(1.0 - ys, 1.0), ys)
    px = np.where(px >= 1.0 - TOLERANCE, 0.0, px)
    return px, py


def klein_distance_array(
    ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray
) -> np.ndarray:
    """Vectorised klein_distance between canonical representatives."""

    def flat(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
        dx = np.abs(np.mod(dx, 1.0))
        dy = np.abs(np.mod(dy, 1.0))
        return np.hypot(np.minimum(dx, 1.0 - dx), np.minimum(dy, 1.0 - dy))

    direct = flat(ax - bx, ay - by)
    partner = flat(ax + 0.5 - bx, 1.0 - ay - by)
    return np.minimum(direct, partner)
