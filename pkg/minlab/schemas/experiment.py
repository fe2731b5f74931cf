"""Pydantic schemas for experiment config files."""

import math
from typing import Any, List, Literal, Optional, Tuple

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator, model_validator

from minlab.core.exceptions import ConfigError
from minlab.models.blowup import BlowupMode, FiberKind

SystemKind = Literal[
    "rotation", "denjoy", "odometer-suspension", "denjoy-suspension", "skew", "klein"
]
ProbeName = Literal[
    "orbit",
    "density",
    "fibers",
    "witness",
    "almost11",
    "slope",
    "equivariance",
    "tiling",
    "product",
    "crooked",
]
OutputFormat = Literal["csv", "json", "svg"]

NAMED_CONSTANTS = {
    "golden": (math.sqrt(5.0) - 1.0) / 2.0,
    "silver": math.sqrt(2.0) - 1.0,
}

SUSPENSION_KINDS = ("odometer-suspension", "denjoy-suspension")
TORUS_KINDS = ("skew", "klein")
BLOWUP_PROBES = ("fibers", "witness", "almost11")
CIRCLE_KINDS = ("rotation", "denjoy")


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _number(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in NAMED_CONSTANTS:
        return NAMED_CONSTANTS[value.strip().lower()]
    return value


class Section(BaseModel):
    """Config section: unknown keys are errors."""

    model_config = ConfigDict(extra="forbid")


class SystemSection(Section):
    """[system]: which dynamical system to build."""

    kind: SystemKind = Field(..., description="System family")
    alpha: float = Field(NAMED_CONSTANTS["golden"], description="Rotation number")
    seeds: List[float] = Field(default_factory=lambda: [0.0], description="Denjoy seeds")
    depth: Optional[int] = Field(None, ge=1, description="Denjoy orbit-depth truncation")
    gap_scale: Optional[float] = Field(None, gt=0.0, description="Largest Denjoy gap length")
    gap_ratio: float = Field(0.5, gt=0.0, lt=1.0, description="Geometric gap decay")
    harmonics: List[Tuple[int, float]] = Field(
        default_factory=list, description="Roof harmonics as frequency:amplitude"
    )
    odometer_depth: int = Field(8, ge=2, le=30, description="Odometer word length L")
    time: float = Field(NAMED_CONSTANTS["golden"], gt=0.0, description="Flow time t")
    start: Optional[List[float]] = Field(None, description="Seed point coordinates")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "skew", "alpha": "golden", "harmonics": "1:0.05, 3:0.01"}
        },
    )

    @field_validator("alpha", "time", mode="before")
    @classmethod
    def named_constant(cls, value: Any) -> Any:
        return _number(value)

    @field_validator("seeds", "start", mode="before")
    @classmethod
    def split_numbers(cls, value: Any) -> Any:
        return [_number(item) for item in _split(value)] if value is not None else None

    @field_validator("harmonics", mode="before")
    @classmethod
    def split_harmonics(cls, value: Any) -> Any:
        if not isinstance(value, str):
            return value
        pairs = []
        for item in _split(value):
            frequency, _, amplitude = item.partition(":")
            if not amplitude:
                raise ValueError(f"harmonic {item!r} must look like frequency:amplitude")
            pairs.append((frequency.strip(), amplitude.strip()))
        return pairs

    @property
    def even_harmonics(self) -> List[int]:
        return [m for m, _ in self.harmonics if m % 2 == 0]


class BlowupSection(Section):
    """[blowup]: finite-stage blow-up parameters."""

    mode: BlowupMode = Field(BlowupMode.TWO_SIDED, description="two-sided or backward-only")
    n: int = Field(..., ge=1, description="Blow-up depth")
    fiber: FiberKind = Field(
        FiberKind.INTERVAL,
        validation_alias=AliasChoices("fiber", "fiberKind"),
        description="interval or tower fibers",
    )
    weight_ratio: float = Field(0.5, gt=0.0, lt=1.0, description="w_i = ratio^|i|")
    chart_radius: Optional[float] = Field(None, gt=0.0)
    tower_level: int = Field(2, ge=1, le=5, description="Crooked map level of tower fibers")
    tower_depth: int = Field(3, ge=0, le=8, description="Tower extensions")


class ProbesSection(Section):
    """[probes]: ordered probe list and per-probe parameters."""

    run: List[ProbeName] = Field(..., min_length=1, description="Probes in execution order")

    orbit_length: int = Field(1000, ge=1)

    density_steps: int = Field(10_000, ge=1)
    density_eps: float = Field(3e-4, gt=0.0)
    density_checkpoints: int = Field(20, ge=1)
    flow_steps: int = Field(1_000_000, ge=1)
    flow_eps: float = Field(1.0 / 32.0, gt=0.0)

    fiber_steps: int = Field(32, ge=0)

    almost11_samples: int = Field(10_000, ge=1)
    almost11_thresholds: List[int] = Field(default_factory=lambda: list(range(1, 11)))

    slope_x: float = Field(0.1)
    slope_beta: float = Field(0.5)
    slope_radii: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4])
    slope_tolerance: float = Field(1e-4, gt=0.0)

    equivariance_samples: int = Field(100_000, ge=1)

    tiling_radius: int = Field(2, ge=1)
    tiling_swap: bool = False
    tiling_monotone: bool = True

    product_k1: int = 1
    product_k2: int = 2
    product_alpha: Optional[float] = None
    product_start: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    product_target: List[float] = Field(default_factory=lambda: [0.0, 0.25])
    product_steps: int = Field(1_000_000, ge=1)
    product_contrast_beta: float = Field(NAMED_CONSTANTS["silver"])
    product_horizons: List[int] = Field(
        default_factory=lambda: [1_000, 10_000, 100_000, 1_000_000, 4_000_000]
    )

    crooked_levels: List[int] = Field(default_factory=lambda: [2, 3, 4, 5], min_length=1)
    crooked_power_levels: List[int] = Field(default_factory=lambda: [2])
    crooked_powers: int = Field(3, ge=1, le=4)

    @field_validator("product_alpha", "product_contrast_beta", "slope_beta", mode="before")
    @classmethod
    def named_constant(cls, value: Any) -> Any:
        return _number(value)

    @field_validator(
        "run",
        "almost11_thresholds",
        "slope_radii",
        "product_start",
        "product_target",
        "product_horizons",
        "crooked_levels",
        "crooked_power_levels",
        mode="before",
    )
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split(value)

    @field_validator("product_start", "product_target")
    @classmethod
    def torus_pair(cls, value: List[float]) -> List[float]:
        if len(value) != 2:
            raise ValueError(f"expected two coordinates, got {len(value)}")
        return value

    @field_validator("run")
    @classmethod
    def distinct_probes(cls, value: List[str]) -> List[str]:
        repeated = sorted({name for name in value if value.count(name) > 1})
        if repeated:
            raise ValueError(f"probes listed twice: {', '.join(repeated)}")
        return value


class OutputSection(Section):
    """[output]: where and how to write reports."""

    directory: Optional[str] = None
    formats: List[OutputFormat] = Field(default_factory=lambda: ["csv", "json", "svg"])
    seed: int = Field(..., ge=0, description="Seed of every random sampler in the run")

    @field_validator("formats", mode="before")
    @classmethod
    def split_formats(cls, value: Any) -> Any:
        return _split(value)


class ExperimentConfig(BaseModel):
    """One experiment: a system, an optional blow-up, probes and output."""

    model_config = ConfigDict(extra="forbid")

    system: SystemSection
    blowup: Optional[BlowupSection] = None
    probes: ProbesSection
    output: OutputSection

    @model_validator(mode="after")
    def check_prerequisites(self) -> "ExperimentConfig":
        """Cross-section rules, checked before any probe runs."""
        kind = self.system.kind
        run = self.probes.run

        if self.system.even_harmonics and ("equivariance" in run or kind == "klein"):
            raise ConfigError(
                f"even frequencies {self.system.even_harmonics}: "
                "equivariance requires odd harmonics",
                "system",
                "harmonics",
            )
        if "density" in run and kind in TORUS_KINDS:
            raise ConfigError(
                f"density probe needs a circle or suspension system, not {kind}", "probes", "run"
            )
        for name in ("slope", "equivariance"):
            if name in run and kind not in TORUS_KINDS:
                raise ConfigError(f"{name} probe needs a skew or klein system", "probes", "run")

        blowup_probes = [name for name in run if name in BLOWUP_PROBES]
        if self.blowup is not None and kind in CIRCLE_KINDS:
            raise ConfigError(f"blow-up needs a skew or suspension system, not {kind}", "blowup")
        if blowup_probes and self.blowup is None:
            raise ConfigError(f"{blowup_probes[0]} probe needs a [blowup] section", "probes", "run")
        if self.blowup is not None:
            if "witness" in run and self.blowup.mode is not BlowupMode.BACKWARD_ONLY:
                raise ConfigError(
                    "witness probe requires mode = backward-only", "blowup", "mode"
                )
            if self.blowup.fiber is FiberKind.TOWER and kind not in SUSPENSION_KINDS:
                raise ConfigError(
                    "tower fibers need a suspension system", "blowup", "fiber"
                )
        return self
