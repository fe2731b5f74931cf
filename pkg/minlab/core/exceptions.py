"""Custom exception classes for the minlab harness."""

from typing import Optional

# CLI exit codes
EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2


class MinlabError(Exception):
    """Base class for every error raised by minlab."""

    exit_code: int = EXIT_ASSERTION

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class EmptyRequestError(MinlabError):
    """Raised when an operation is asked for zero items."""

    def __init__(self, what: str) -> None:
        super().__init__(f"Empty request: {what} must be at least 1")


class PreconditionError(MinlabError):
    """Raised when an operation's precondition does not hold."""


class InvalidPointError(MinlabError):
    """Raised when a point is not valid for the system it is used with."""


class ScheduleError(MinlabError):
    """Raised when a Denjoy gap schedule does not fit on the circle."""

    def __init__(self, total: float) -> None:
        super().__init__(f"Gap schedule sums to {total!r}, which is not below 1")
        self.total = total


class RotationNumberError(MinlabError):
    """Raised when a rotation number is rational where irrational is required."""

    def __init__(self, alpha: float, numerator: int, denominator: int) -> None:
        super().__init__(
            f"Rotation number {alpha!r} is numerically rational ({numerator}/{denominator})"
        )


class SeedError(MinlabError):
    """Raised when two Denjoy seeds lie on the same rotation orbit."""

    def __init__(self, first: int, second: int, shift: int) -> None:
        super().__init__(
            f"Seeds {first} and {second} lie on one orbit (offset {shift} rotation steps)"
        )


class TruncationError(MinlabError):
    """Raised when an orbit index leaves the stored gap schedule."""

    def __init__(self, seed: int, index: int, depth: int, tail_bound: float) -> None:
        super().__init__(
            f"Orbit index {index} of seed {seed} is outside the stored range |k| <= {depth}; "
            f"untracked gap mass is at most {tail_bound:.3e}"
        )
        self.tail_bound = tail_bound


class RoofError(MinlabError):
    """Raised when roof harmonics are malformed."""


class EquivarianceError(MinlabError):
    """Raised when a roof does not satisfy r(x + 1/2) = -r(x) mod 1."""

    def __init__(self, residual: float) -> None:
        super().__init__(
            f"Roof breaks the Klein symmetry (residual {residual:.3e}); "
            "equivariance requires odd harmonics"
        )
        self.residual = residual


class DepthError(MinlabError):
    """Raised when a flow time exceeds the odometer carry headroom."""

    def __init__(self, t: float, depth: int) -> None:
        suggested = depth
        while 2.0 ** (suggested - 2) < abs(t):
            suggested += 1
        super().__init__(
            f"Flow time {t!r} exceeds the headroom 2^{depth - 2} of odometer depth {depth}; "
            f"use depth >= {suggested}"
        )
        self.suggested_depth = suggested


class AperiodicityError(MinlabError):
    """Raised when a seed orbit collides with itself within the blown range."""

    def __init__(self, first: int, second: int, distance: float) -> None:
        super().__init__(
            f"Seed orbit is numerically periodic: points {first} and {second} "
            f"are {distance:.3e} apart"
        )


class ChartSingularityError(MinlabError):
    """Raised when a regular point sits on a blown orbit point."""

    def __init__(self, index: int) -> None:
        super().__init__(
            f"Point coincides with blown orbit point z[{index}]; "
            "it belongs to a fiber, give its fiber coordinate instead"
        )
        self.index = index


class UndefinedDirectionError(MinlabError):
    """Raised when a direction is requested at the chart centre itself."""

    def __init__(self, index: Optional[int] = None) -> None:
        where = "the chart centre" if index is None else f"blown orbit point z[{index}]"
        super().__init__(f"Direction is undefined at {where}")


class ModeError(MinlabError):
    """Raised when an operation needs the other blow-up mode."""


class DomainError(MinlabError):
    """Raised when a bonding map is evaluated outside its domain."""

    def __init__(self, x: float, lower: float, upper: float) -> None:
        super().__init__(f"Point {x!r} is outside the domain [{lower}, {upper}]")


class BranchError(MinlabError):
    """Raised when a preimage branch index does not exist."""

    def __init__(self, branch: int, available: int) -> None:
        super().__init__(f"Branch {branch} requested but only {available} preimages exist")


class TowerDepthError(MinlabError):
    """Raised when towers of different depth are compared."""

    def __init__(self, first: int, second: int) -> None:
        super().__init__(f"Tower depths differ: {first} != {second}")


class ResourceError(MinlabError):
    """Raised when a request would exceed the enumeration budget."""


class RigidityFailure(MinlabError):
    """Raised when an enumerated lattice map is not a product map."""


class DegenerateTargetError(MinlabError):
    """Raised when a target lies on the invariant subtorus of the start point."""

    def __init__(self, invariant: float) -> None:
        super().__init__(
            f"Target shares the invariant value {invariant!r} with the start point; "
            "it lies on the orbit-closure subtorus"
        )


class ConfigError(MinlabError):
    """Raised when an experiment config cannot be accepted."""

    exit_code = EXIT_CONFIG

    def __init__(
        self,
        detail: str,
        section: Optional[str] = None,
        key: Optional[str] = None,
        line: Optional[int] = None,
    ) -> None:
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if section is not None:
            parts.append(f"[{section}]" + (f" {key}" if key else ""))
        location = ", ".join(parts)
        super().__init__(f"{location}: {detail}" if location else detail)
        self.reason = detail
        self.section = section
        self.key = key
        self.line = line

    def at_line(self, line: Optional[int]) -> "ConfigError":
        """The same error, located at a config file line."""
        return ConfigError(self.reason, self.section, self.key, line)
