"""Crooked piecewise-linear bonding maps and finite inverse-limit towers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from minlab.core.exceptions import (
    BranchError,
    DomainError,
    EmptyRequestError,
    PreconditionError,
    ResourceError,
    TowerDepthError,
)

logger = logging.getLogger(__name__)

TOWER_TOLERANCE = 1e-9
CROOKED_SLACK = 1e-12

Tower = Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class BondingMap:
    """Continuous piecewise-linear map given by its breakpoints.

    Attributes:
        xs: Strictly increasing breakpoint abscissae spanning the domain
        ys: Values at the breakpoints
        extended: Domain is [-1, 2] with g(x) = x outside (0, 1)
    """

    xs: np.ndarray
    ys: np.ndarray
    extended: bool = False

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise PreconditionError("Bonding map needs matching breakpoint arrays of size >= 2")
        if np.any(np.diff(xs) <= 0.0):
            raise PreconditionError("Bonding map breakpoints must be strictly increasing")
        lower, upper = (-1.0, 2.0) if self.extended else (0.0, 1.0)
        if xs[0] != lower or xs[-1] != upper:
            raise PreconditionError(f"Bonding map must span [{lower}, {upper}]")
        if np.interp(0.0, xs, ys) != 0.0 or np.interp(1.0, xs, ys) != 1.0:
            raise PreconditionError("Bonding map must fix 0 and 1")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def domain(self) -> Tuple[float, float]:
        return (float(self.xs[0]), float(self.xs[-1]))

    @property
    def breakpoint_count(self) -> int:
        return int(self.xs.size)

    @property
    def is_surjective(self) -> bool:
        """Whether [0, 1] maps onto [0, 1]."""
        core = (self.xs >= 0.0) & (self.xs <= 1.0)
        values = self.ys[core]
        return bool(values.min() <= 0.0 and values.max() >= 1.0)

    def core(self) -> "BondingMap":
        """Restriction to [0, 1]."""
        if not self.extended:
            return self
        keep = (self.xs >= 0.0) & (self.xs <= 1.0)
        return BondingMap(self.xs[keep], self.ys[keep])

    def extend(self) -> "BondingMap":
        """Extension to [-1, 2] by the identity outside (0, 1)."""
        if self.extended:
            return self
        xs = np.concatenate([[-1.0], self.xs, [2.0]])
        ys = np.concatenate([[-1.0], self.ys, [2.0]])
        return BondingMap(xs, ys, extended=True)

    def rows(self) -> List[Tuple[float, float]]:
        """Breakpoints as (x, g(x)) rows for CSV export."""
        return [(float(x), float(y)) for x, y in zip(self.xs, self.ys)]


def _chain_pattern(i: int, j: int) -> Tuple[int, ...]:
    if i == j:
        return (i,)
    if i > j:
        return tuple(reversed(_chain_pattern(j, i)))
    return _forward_pattern(i, j)


@lru_cache(maxsize=None)
def _forward_pattern(i: int, j: int) -> Tuple[int, ...]:
    if j - i == 1:
        return (i, j)
    # P(i,j) = P(i,j-1) P(j-1,i+1) P(i+1,j), shared junctions kept once
    first = _chain_pattern(i, j - 1)
    middle = _chain_pattern(j - 1, i + 1)
    last = _chain_pattern(i + 1, j)
    return first + middle[1:] + last[1:]


def crooked_map(level: int) -> BondingMap:
    """Piecewise-linear (1/level)-crooked map fixing 0 and 1.

    The chain pattern over the 2*level + 1 equally spaced values k/(2*level)
    is laid out on equally spaced abscissae.

    Args:
        level: Crookedness level, at least 1

    Returns:
        BondingMap with g(0) = 0 and g(1) = 1
    """
    if level < 1:
        raise PreconditionError(f"Crooked map level {level} must be at least 1")
    top = 2 * level
    pattern = np.array(_chain_pattern(0, top), dtype=float)
    xs = np.linspace(0.0, 1.0, pattern.size)
    logger.debug("Built crooked map", extra={"level": level, "breakpoints": pattern.size})
    return BondingMap(xs, pattern / top)


def bonding_eval(g: BondingMap, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Piecewise-linear interpolation, exact at breakpoints.

    Raises:
        DomainError: If x lies outside the domain of g
    """
    lower, upper = g.domain
    values = np.asarray(x, dtype=float)
    if values.size and (values.min() < lower or values.max() > upper):
        bad = values.min() if values.min() < lower else values.max()
        raise DomainError(float(bad), lower, upper)
    result = np.interp(values, g.xs, g.ys)
    return result if isinstance(x, np.ndarray) else float(result)


def _simplify(xs: np.ndarray, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Drop duplicate abscissae and interior points collinear with their neighbours."""
    keep = np.concatenate([[True], np.diff(xs) > 1e-15])
    xs, ys = xs[keep], ys[keep]
    if xs.size <= 2:
        return xs, ys
    left = (ys[1:-1] - ys[:-2]) * (xs[2:] - xs[1:-1])
    right = (ys[2:] - ys[1:-1]) * (xs[1:-1] - xs[:-2])
    turning = np.abs(left - right) > 1e-15
    mask = np.concatenate([[True], turning, [True]])
    return xs[mask], ys[mask]


def compose(f: BondingMap, g: BondingMap) -> BondingMap:
    """Exact piecewise-linear composition f o g on [0, 1]."""
    f, g = f.core(), g.core()
    points: List[np.ndarray] = [g.xs]
    for s in range(g.xs.size - 1):
        y0, y1 = g.ys[s], g.ys[s + 1]
        if y0 == y1:
            continue
        lo, hi = min(y0, y1), max(y0, y1)
        inside = f.xs[(f.xs > lo) & (f.xs < hi)]
        if inside.size:
            points.append(g.xs[s] + (inside - y0) / (y1 - y0) * (g.xs[s + 1] - g.xs[s]))
    xs = np.unique(np.concatenate(points))
    ys = np.interp(np.interp(xs, g.xs, g.ys), f.xs, f.ys)
    xs, ys = _simplify(xs, ys)
    return BondingMap(xs, ys)


def power(g: BondingMap, m: int) -> BondingMap:
    """g composed with itself m times."""
    if m < 1:
        raise EmptyRequestError("composition power")
    result = g.core()
    for _ in range(m - 1):
        result = compose(result, g)
    return result


def _last_in_band(
    xs: np.ndarray, ys: np.ndarray, lo: float, hi: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Per segment, the last abscissa whose value lies in [lo, hi] (nan if none)."""
    y0, y1 = ys[:-1], ys[1:]
    dy = y1 - y0
    flat = dy == 0.0
    safe = np.where(flat, 1.0, dy)
    ta = (lo - y0) / safe
    tb = (hi - y0) / safe
    start = np.maximum(0.0, np.minimum(ta, tb))
    stop = np.minimum(1.0, np.maximum(ta, tb))
    in_band_flat = (y0 >= lo) & (y0 <= hi)
    sloped = np.where(start <= stop, stop, np.nan)
    theta = np.where(flat, np.where(in_band_flat, 1.0, np.nan), sloped)
    x_last = xs[:-1] + theta * (xs[1:] - xs[:-1])
    y_last = y0 + theta * dy
    return x_last, y_last


def is_delta_crooked(f: BondingMap, delta: float) -> bool:
    """Decide delta-crookedness on every breakpoint pair a < b.

    A pair passes when some c <= d in [a, b] has |f(c) - f(b)| <= delta and
    |f(d) - f(a)| <= delta. With d taken as the last point of [a, b] within
    delta of f(a), this holds iff f(b) lies within delta of f([a, d]).

    Raises:
        PreconditionError: If delta is outside (0, 1] or f is not surjective
    """
    if not 0.0 < delta <= 1.0:
        raise PreconditionError(f"Crookedness bound {delta!r} must lie in (0, 1]")
    f = f.core()
    if not f.is_surjective:
        raise PreconditionError("Crookedness is only defined for surjective maps")
    xs, ys = f.xs, f.ys
    size = xs.size
    for i in range(size - 1):
        seg_x, seg_y = xs[i:], ys[i:]
        band = delta + CROOKED_SLACK
        x_last, y_last = _last_in_band(seg_x, seg_y, ys[i] - band, ys[i] + band)
        # segment index holding the last in-band point before each b = xs[i + j]
        candidate = np.where(np.isnan(x_last), -1, np.arange(x_last.size))
        holder = np.maximum.accumulate(candidate)
        prefix_min = np.minimum.accumulate(seg_y)
        prefix_max = np.maximum.accumulate(seg_y)
        fd = y_last[holder]
        low = np.minimum(prefix_min[holder], fd)
        high = np.maximum(prefix_max[holder], fd)
        fb = seg_y[1:]
        if np.any((fb < low - band) | (fb > high + band)):
            return False
    return True


def crookedness(f: BondingMap, iterations: int = 30) -> float:
    """Smallest delta (to bisection precision) for which f is delta-crooked."""
    if is_delta_crooked(f, 1e-9):
        return 0.0
    lo, hi = 1e-9, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if is_delta_crooked(f, mid):
            hi = mid
        else:
            lo = mid
    return hi


def level_schedule(stages: int, initial: int = 2) -> List[int]:
    """Heuristic crookedness levels, doubling per stage."""
    if stages < 1:
        raise EmptyRequestError("schedule stages")
    if initial < 1:
        raise PreconditionError(f"Initial level {initial} must be at least 1")
    return [initial * 2**k for k in range(stages)]


# Towers: finite backward-consistent coordinate sequences


def preimages(g: BondingMap, y: float) -> List[float]:
    """All preimages of y under g on [0, 1], left to right, shared breakpoints once."""
    g = g.core()
    xs, ys = g.xs, g.ys
    found: List[float] = []
    for s in range(xs.size - 1):
        y0, y1 = ys[s], ys[s + 1]
        if not min(y0, y1) <= y <= max(y0, y1):
            continue
        if y0 == y1:
            candidates: Iterable[float] = (xs[s], xs[s + 1])
        elif y == y0:
            candidates = (xs[s],)
        elif y == y1:
            candidates = (xs[s + 1],)
        else:
            candidates = (xs[s] + (y - y0) / (y1 - y0) * (xs[s + 1] - xs[s]),)
        for x in candidates:
            if not found or x - found[-1] > 1e-12:
                found.append(float(x))
    return found


def tower_extend(g: BondingMap, t: Tower, branch: int) -> Tower:
    """Append the branch-th preimage (left to right) of the last coordinate.

    Raises:
        BranchError: If the branch does not exist
    """
    if not t:
        raise EmptyRequestError("tower")
    options = preimages(g, t[-1])
    if not 0 <= branch < len(options):
        raise BranchError(branch, len(options))
    return t + (options[branch],)


def tower_from_point(g: BondingMap, x0: float, branches: Sequence[int]) -> Tower:
    """Tower starting at x0 built by repeated branch selection."""
    tower: Tower = (float(x0),)
    for branch in branches:
        tower = tower_extend(g, tower, branch)
    return tower


def enumerate_towers(g: BondingMap, x0: float, depth: int, limit: int = 100_000) -> List[Tower]:
    """Every tower of the given depth over x0, breadth-first over branches."""
    layer: List[Tower] = [(float(x0),)]
    for _ in range(depth):
        following: List[Tower] = []
        for tower in layer:
            following.extend(tower + (x,) for x in preimages(g, tower[-1]))
            if len(following) > limit:
                raise ResourceError(f"More than {limit} towers of depth {depth} over {x0}")
        layer = following
    return layer


def tower_check(g: BondingMap, t: Tower) -> bool:
    """True iff x_k = g(x_{k+1}) within tolerance for every k."""
    if any(not 0.0 <= x <= 1.0 for x in t):
        return False
    for upper, lower in zip(t, t[1:]):
        if abs(upper - bonding_eval(g, lower)) > TOWER_TOLERANCE:
            return False
    return True


def tower_metric(a: Tower, b: Tower) -> float:
    """Weighted coordinate distance with weights 2^-k, normalised to diameter 2.

    Raises:
        TowerDepthError: If the towers have different depth
    """
    if len(a) != len(b):
        raise TowerDepthError(len(a), len(b))
    if not a:
        return 0.0
    weights = 0.5 ** np.arange(len(a))
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return float(2.0 * np.dot(weights, diff) / weights.sum())
