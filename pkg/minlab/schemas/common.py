"""Common Pydantic schemas for probe results and report bundles."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ProbeError(BaseModel):
    """Error raised while a probe ran."""

    detail: str = Field(..., description="Error message")
    error_code: str = Field(..., description="Exception class name")

    class Config:
        json_schema_extra = {
            "example": {
                "detail": "Orbit index 65 of seed 0 is outside the stored range |k| <= 64",
                "error_code": "TruncationError",
            }
        }


class ProbeResult(BaseModel):
    """Outcome of one probe."""

    name: str = Field(..., description="Probe name")
    passed: bool = Field(..., description="Whether every assertion of the probe held")
    summary: Dict[str, Any] = Field(default_factory=dict, description="Headline numbers")
    artifacts: List[str] = Field(default_factory=list, description="Artifact paths")
    failures: List[str] = Field(default_factory=list, description="Failed assertions")
    error: Optional[ProbeError] = Field(None, description="Error that stopped the probe")

    class Config:
        json_schema_extra = {
            "example": {
                "name": "witness",
                "passed": True,
                "summary": {"separation": 0.5, "image_distance": 0.0},
                "artifacts": ["witness.json"],
                "failures": [],
                "error": None,
            }
        }


class BundleMetadata(BaseModel):
    """Run metadata echoed into every bundle (no timings)."""

    title: str = Field(..., description="Tool name")
    version: str = Field(..., description="Tool version")
    seed: int = Field(..., description="Sampling seed from the config")


class ReportBundle(BaseModel):
    """Everything one experiment run produced."""

    metadata: BundleMetadata
    config: Dict[str, Any] = Field(..., description="Echo of the parsed config")
    probes: List[ProbeResult] = Field(default_factory=list)
    passed: bool = Field(..., description="True iff every probe passed")
    complete: bool = Field(True, description="False when a resource error aborted the run")
    digests: Dict[str, str] = Field(default_factory=dict, description="SHA-256 per artifact")
