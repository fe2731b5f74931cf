"""Lattice model of the composant tiling and product-rotation invariants.

A composant of the product space is modelled by the square lattice Z^2 whose
cell (i, j) has type (t(i), t(j)) with t = p on even and a on odd indices.
Type-preserving adjacency-preserving injections of a finite window are
enumerated exhaustively and checked to be coordinatewise even translations,
possibly composed with the coordinate swap.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from minlab.core.config import settings
from minlab.core.exceptions import (
    DegenerateTargetError,
    EmptyRequestError,
    PreconditionError,
    ResourceError,
    RigidityFailure,
)
from minlab.models.circle import circle_distance
from minlab.models.skew import TorusPoint

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]

UNIT_STEPS: Tuple[Cell, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))
MONOTONE_STEPS = frozenset({(1, 0), (0, 1)})
CHUNK = 1 << 18


def letter(index: int) -> str:
    """Tile letter of a lattice index: p on even, a on odd."""
    return "p" if index % 2 == 0 else "a"


def tile_type(cell: Cell) -> str:
    return letter(cell[0]) + letter(cell[1])


def allowed_image_types(source: str) -> Tuple[str, ...]:
    """pp -> pp, aa -> aa, and the mixed types may trade places."""
    if source in ("ap", "pa"):
        return ("ap", "pa")
    return (source,)


@dataclass(frozen=True)
class TilingWindow:
    """Cells {-R, ..., R}^2 with edge adjacency."""

    radius: int

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise PreconditionError(f"Window radius {self.radius} must be at least 1")

    @cached_property
    def cells(self) -> Tuple[Cell, ...]:
        """Cells in breadth-first order from the centre."""
        order: List[Cell] = []
        seen = {(0, 0)}
        queue = deque([(0, 0)])
        while queue:
            cell = queue.popleft()
            order.append(cell)
            for neighbour in self.neighbours(cell):
                if neighbour not in seen:
                    seen.add(neighbour)
                    queue.append(neighbour)
        return tuple(order)

    def __contains__(self, cell: object) -> bool:
        return (
            isinstance(cell, tuple)
            and len(cell) == 2
            and all(isinstance(c, int) and abs(c) <= self.radius for c in cell)
        )

    def neighbours(self, cell: Cell) -> List[Cell]:
        candidates = [(cell[0] + dx, cell[1] + dy) for dx, dy in UNIT_STEPS]
        return [c for c in candidates if c in self]


@dataclass(frozen=True)
class LatticeMap:
    """Injective map from the window cells into Z^2."""

    window: TilingWindow
    images: Tuple[Cell, ...]

    @cached_property
    def mapping(self) -> Dict[Cell, Cell]:
        return dict(zip(self.window.cells, self.images))

    def __call__(self, cell: Cell) -> Cell:
        return self.mapping[cell]

    @property
    def is_swap(self) -> bool:
        """True when the first axis is sent to the second."""
        start, step = self((0, 0)), self((1, 0))
        return step[0] == start[0]


def _step(a: Cell, b: Cell) -> Cell:
    return (b[0] - a[0], b[1] - a[1])


def enumerate_automorphisms(
    window: TilingWindow, allow_swap: bool = False, monotone: bool = True
) -> List[LatticeMap]:
    """Every type- and adjacency-preserving injection of the window.

    The centre goes to a cell of [-2R, 2R]^2. With ``monotone`` every unit
    step must go to (1, 0) or (0, 1); without ``allow_swap`` the first axis
    must stay horizontal.

    Raises:
        ResourceError: If the radius exceeds the enumeration limit
    """
    limit = settings.WINDOW_RADIUS_LIMIT
    if window.radius > limit:
        raise ResourceError(f"Window radius {window.radius} exceeds the limit {limit}")
    cells = window.cells
    span = 2 * window.radius
    found: List[LatticeMap] = []

    def accepts(cell: Cell, image: Cell, assigned: Dict[Cell, Cell], used: set) -> bool:
        if image in used or tile_type(image) not in allowed_image_types(tile_type(cell)):
            return False
        for neighbour in window.neighbours(cell):
            other = assigned.get(neighbour)
            if other is None:
                continue
            step = _step(other, image)
            if abs(step[0]) + abs(step[1]) != 1:
                return False
            if neighbour[0] != cell[0]:
                forward = step if cell[0] > neighbour[0] else (-step[0], -step[1])
                if monotone and forward not in MONOTONE_STEPS:
                    return False
                if not allow_swap and forward[0] == 0:
                    return False
            elif monotone:
                forward = step if cell[1] > neighbour[1] else (-step[0], -step[1])
                if forward not in MONOTONE_STEPS:
                    return False
        return True

    def extend(position: int, assigned: Dict[Cell, Cell], used: set) -> Iterator[Dict[Cell, Cell]]:
        if position == len(cells):
            yield dict(assigned)
            return
        cell = cells[position]
        anchor = next(n for n in window.neighbours(cell) if n in assigned)
        base = assigned[anchor]
        for dx, dy in UNIT_STEPS:
            image = (base[0] + dx, base[1] + dy)
            if accepts(cell, image, assigned, used):
                assigned[cell] = image
                used.add(image)
                yield from extend(position + 1, assigned, used)
                used.discard(image)
                del assigned[cell]

    for cx in range(-span, span + 1):
        for cy in range(-span, span + 1):
            centre = (cx, cy)
            if tile_type(centre) not in allowed_image_types(tile_type((0, 0))):
                continue
            for assignment in extend(1, {(0, 0): centre}, {centre}):
                found.append(LatticeMap(window, tuple(assignment[c] for c in cells)))

    logger.info(
        "Enumerated tiling automorphisms",
        extra={"radius": window.radius, "count": len(found), "swap": allow_swap},
    )
    return found


@dataclass(frozen=True)
class AffineForm:
    """(i, j) -> (i + a, j + b), or (j + a, i + b) when swapped."""

    swap: bool
    a: int
    b: int

    def compose(self, other: "AffineForm") -> "AffineForm":
        """self o other."""
        a, b = (other.b, other.a) if self.swap else (other.a, other.b)
        return AffineForm(self.swap != other.swap, a + self.a, b + self.b)

    @property
    def is_translation(self) -> bool:
        return not self.swap


def decompose(m: LatticeMap) -> AffineForm:
    """Product form of a lattice map.

    Raises:
        RigidityFailure: If m is not a coordinatewise even translation, possibly swapped
    """
    centre = m((0, 0))
    swap = m.is_swap
    for cell in m.window.cells:
        i, j = cell
        image = m(cell)
        # the first factor acts on i, the second on j
        first, second = (image[1], image[0]) if swap else image
        shift_first = centre[1] if swap else centre[0]
        shift_second = centre[0] if swap else centre[1]
        if first - i != shift_first or second - j != shift_second:
            raise RigidityFailure(
                f"Cell {cell} goes to {image}: not a coordinatewise translation"
            )
    if centre[0] % 2 or centre[1] % 2:
        raise RigidityFailure(f"Translation {centre} is odd and breaks tile types")
    return AffineForm(swap, centre[0], centre[1])


@dataclass(frozen=True)
class ProductStructure:
    """Decomposition summary of an enumerated automorphism set."""

    forms: Tuple[AffineForm, ...]
    group: str
    swap_count: int
    translation_rank: int
    squares_are_translations: bool


def classify_product_structure(maps: Sequence[LatticeMap]) -> ProductStructure:
    """Decompose every map and name the generated group.

    Raises:
        RigidityFailure: If any map is not a product map
    """
    if not maps:
        raise EmptyRequestError("automorphism list")
    forms = tuple(decompose(m) for m in maps)
    swaps = sum(1 for f in forms if f.swap)
    vectors = np.array([[f.a, f.b] for f in forms if f.is_translation], dtype=float)
    rank = int(np.linalg.matrix_rank(vectors)) if vectors.size else 0
    squares = all(f.compose(f).is_translation for f in forms)
    return ProductStructure(
        forms=forms,
        group="Z_x_Z2" if swaps else "Z",
        swap_count=swaps,
        translation_rank=rank,
        squares_are_translations=squares,
    )


# Products of rotation powers


def invariant_of(k1: int, k2: int, x: float, y: float) -> float:
    """I(x, y) = (k2 x - k1 y) mod 1."""
    value = (k2 * x - k1 * y) % 1.0
    return 0.0 if value >= 1.0 else value


@dataclass(frozen=True)
class InvariantCheck:
    invariant: float
    drift: float
    steps: int


def product_rotation_invariant(
    k1: int,
    k2: int,
    alpha: float,
    p0: TorusPoint,
    steps: int = 1_000_000,
    exact: bool = False,
) -> InvariantCheck:
    """Invariant of (x, y) -> (x + k1 alpha, y + k2 alpha) and its drift over an orbit.

    Args:
        k1: Power of the first rotation
        k2: Power of the second rotation
        alpha: Rotation number
        p0: Start point
        steps: Orbit length
        exact: Iterate in rational arithmetic (drift is then exactly 0)

    Raises:
        PreconditionError: If k1 = k2 = 0
    """
    if k1 == 0 and k2 == 0:
        raise PreconditionError("Product rotation powers (0, 0) have no invariant")
    if steps < 1:
        raise EmptyRequestError("orbit length")
    if exact:
        return _exact_invariant(k1, k2, alpha, p0, steps)

    start = invariant_of(k1, k2, p0.x, p0.y)
    step_x = (k1 * alpha) % 1.0
    step_y = (k2 * alpha) % 1.0
    drift = 0.0
    for first in range(0, steps, CHUNK):
        n = np.arange(first, min(steps, first + CHUNK), dtype=float)
        xs = np.mod(p0.x + n * step_x, 1.0)
        ys = np.mod(p0.y + n * step_y, 1.0)
        values = np.mod(k2 * xs - k1 * ys, 1.0)
        offsets = np.abs(values - start)
        drift = max(drift, float(np.max(np.minimum(offsets, 1.0 - offsets))))
    return InvariantCheck(invariant=start, drift=drift, steps=steps)


def _exact_invariant(k1: int, k2: int, alpha: float, p0: TorusPoint, steps: int) -> InvariantCheck:
    a = Fraction(alpha)
    x, y = Fraction(p0.x), Fraction(p0.y)
    start = (k2 * x - k1 * y) % 1
    drift = Fraction(0)
    for _ in range(steps - 1):
        x = (x + k1 * a) % 1
        y = (y + k2 * a) % 1
        offset = abs((k2 * x - k1 * y) % 1 - start)
        drift = max(drift, min(offset, 1 - offset))
    return InvariantCheck(invariant=float(start), drift=float(drift), steps=steps)


def _orbit_minima(
    step_x: float, step_y: float, p0: TorusPoint, target: TorusPoint, horizons: Sequence[int]
) -> List[float]:
    """Running minimum of the torus distance to target at each horizon."""
    ordered = sorted(horizons)
    minima: Dict[int, float] = {}
    best = math.inf
    done = 0
    for horizon in ordered:
        while done < horizon:
            upper = min(horizon, done + CHUNK)
            n = np.arange(done, upper, dtype=float)
            dx = np.abs(np.mod(p0.x + n * step_x, 1.0) - target.x)
            dy = np.abs(np.mod(p0.y + n * step_y, 1.0) - target.y)
            dx = np.minimum(dx, 1.0 - dx)
            dy = np.minimum(dy, 1.0 - dy)
            best = min(best, float(np.min(np.hypot(dx, dy))))
            done = upper
        minima[horizon] = best
    return [minima[h] for h in horizons]


@dataclass(frozen=True)
class NonMinimalityMargin:
    invariant_gap: float
    bound: float
    min_distance: float
    drift: float

    @property
    def respects_bound(self) -> bool:
        return self.min_distance >= self.bound - 1e-12


def product_nonminimality_report(
    k1: int,
    k2: int,
    alpha: float,
    p0: TorusPoint,
    target: TorusPoint,
    N: int,
) -> NonMinimalityMargin:
    """Closest approach of the product orbit to a target off its invariant subtorus.

    Raises:
        DegenerateTargetError: If the target shares the start point's invariant
    """
    check = product_rotation_invariant(k1, k2, alpha, p0, N)
    gap = circle_distance(check.invariant, invariant_of(k1, k2, target.x, target.y))
    if gap < 1e-12:
        raise DegenerateTargetError(check.invariant)
    bound = gap / math.hypot(k1, k2)
    step_x, step_y = (k1 * alpha) % 1.0, (k2 * alpha) % 1.0
    closest = _orbit_minima(step_x, step_y, p0, target, [N])[0]
    logger.info(
        "Measured product non-minimality margin",
        extra={"k1": k1, "k2": k2, "bound": bound, "min_distance": closest},
    )
    return NonMinimalityMargin(
        invariant_gap=gap, bound=bound, min_distance=closest, drift=check.drift
    )


def independent_rotation_minima(
    alpha: float,
    beta: float,
    p0: TorusPoint,
    target: TorusPoint,
    horizons: Sequence[int],
) -> List[float]:
    """Running minima of the distance to target for (x + alpha, y + beta)."""
    if not horizons or min(horizons) < 1:
        raise EmptyRequestError("horizon list")
    return _orbit_minima(alpha % 1.0, beta % 1.0, p0, target, horizons)


def affine_label(form: AffineForm) -> str:
    """Readable label such as 'swap+(2,-4)'."""
    prefix = "swap" if form.swap else "shift"
    return f"{prefix}+({form.a},{form.b})"
