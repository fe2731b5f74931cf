"""Pydantic schemas for the JSON reports written by the probes."""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

VERDICT_DENSE = "ε-dense"
VERDICT_SPARSE = "not ε-dense at N"


class DensityReport(BaseModel):
    """Empirical minimality certificate for a time-t map of a suspension flow."""

    model_config = ConfigDict(
        populate_by_name=True,
        json_schema_extra={
            "example": {
                "t": 0.6180339887498949,
                "eps": 0.03125,
                "N": 1000000,
                "coveringRadius": 0.03125,
                "verdict": VERDICT_DENSE,
                "cellsMissed": 0,
                "cellsTotal": 8192,
            }
        },
    )

    t: float = Field(..., description="Flow time of the map")
    eps: float = Field(..., description="Grid resolution in the flow direction")
    steps: int = Field(..., alias="N", description="Number of iterates")
    covering_radius: float = Field(
        ..., alias="coveringRadius", description="Longest unvisited flow-direction run"
    )
    verdict: str = Field(..., description="ε-dense, or not ε-dense at N")
    cells_missed: int = Field(..., alias="cellsMissed", description="Grid cells never visited")
    cells_total: int = Field(..., alias="cellsTotal", description="Number of grid cells")

    @property
    def dense(self) -> bool:
        return self.cells_missed == 0


class CircleDensityReport(BaseModel):
    """Largest-gap measurement of a circle orbit."""

    n: int = Field(..., description="Orbit length")
    eps: float = Field(..., description="Required resolution")
    largest_gap: float = Field(..., description="Largest circular gap of the orbit")
    distinct_gaps: int = Field(..., description="Number of distinct consecutive gaps")
    dense: bool = Field(..., description="Whether the largest gap is below eps")


class StagePointRecord(BaseModel):
    """Printable form of a stage point."""

    kind: str = Field(..., description="regular or fiber")
    index: Optional[int] = Field(None, description="Fiber index")
    coordinate: Optional[List[float]] = Field(None, description="Fiber coordinate")
    base: Optional[List[float]] = Field(None, description="Base point coordinates")


class WitnessReport(BaseModel):
    """Two points with one common image under the stage map."""

    first: StagePointRecord
    second: StagePointRecord
    image: StagePointRecord
    separation: float = Field(..., description="Stage distance between the two points")
    image_distance: float = Field(..., description="Stage distance between their images")
    images_equal: bool = Field(..., description="Images are equal as stage points")


class ThresholdCount(BaseModel):
    """Number of fibers with diameter below 1/n."""

    n: int
    fibers_below: int
    expected: int


class AlmostOneToOneReport(BaseModel):
    """Fiber structure of the factor map at a finite stage."""

    sample_count: int
    singleton_fraction: float = Field(..., description="Sampled base points with singleton fiber")
    blown_hits: int = Field(..., description="Samples landing on a blown orbit point")
    fiber_count: int
    thresholds: List[ThresholdCount]
    diameter_histogram: Dict[str, int] = Field(
        ..., description="Sampled fiber diameters, keyed by diameter"
    )


class TilingVerdict(BaseModel):
    """Outcome of the composant-tiling rigidity enumeration."""

    model_config = ConfigDict(populate_by_name=True)

    window_radius: int = Field(..., alias="windowRadius")
    flags: Dict[str, bool]
    automorphism_count: int = Field(..., alias="automorphismCount")
    decomposable: str = Field(..., description="'all' when every map is a product map")
    group: str = Field(..., description="Z or Z_x_Z2")
    swap_count: int = Field(0, alias="swapCount")
    translation_rank: int = Field(0, alias="translationRank")
    squares_are_translations: bool = Field(True, alias="squaresAreTranslations")


class ProductReport(BaseModel):
    """Invariant and distance margin of a product of rotation powers."""

    k1: int
    k2: int
    alpha: float
    steps: int
    invariant: float = Field(..., description="(k2 x - k1 y) mod 1 at the start point")
    drift: float = Field(..., description="Largest change of the invariant along the orbit")
    target: Optional[List[float]] = None
    invariant_gap: Optional[float] = None
    bound: Optional[float] = Field(None, description="Analytic lower bound on orbit distance")
    min_distance: Optional[float] = Field(None, description="Closest approach to the target")
    respects_bound: Optional[bool] = None
    contrast_minima: Optional[List[float]] = Field(
        None, description="Running minima for rationally independent rotations"
    )


class SlopeReport(BaseModel):
    """Secant slopes of radial segments against slope transport."""

    x: float
    beta: float
    expected_slope: float
    radii: List[float]
    errors: List[float]
    monotone: bool
    passed: bool


class EquivarianceReport(BaseModel):
    """Commutation p o F = G o p on random torus points."""

    samples: int
    max_distance: float
    symmetry_residual: float
    passed: bool


class CrookednessLevel(BaseModel):
    """Crookedness of one constructed bonding map and its powers."""

    level: int
    breakpoints: int
    delta: float
    crooked: bool
    powers_crooked: List[bool]
