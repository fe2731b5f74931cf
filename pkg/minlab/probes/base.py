"""Probe routing and result collection."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from minlab.core.reports import ReportWriter
from minlab.schemas.common import ProbeResult
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)


class Outcome:
    """Collects the assertions, artifacts and headline numbers of one probe run."""

    def __init__(self, name: str, writer: ReportWriter) -> None:
        self.name = name
        self.writer = writer
        self.failures: List[str] = []
        self.artifacts: List[str] = []
        self.summary: Dict[str, Any] = {}

    def check(self, condition: bool, message: str) -> bool:
        if not condition:
            self.failures.append(message)
            logger.warning("Probe assertion failed", extra={"probe": self.name, "detail": message})
        return bool(condition)

    def keep(self, artifact: Optional[str]) -> None:
        """Record an artifact path (writers return None for disabled formats)."""
        if artifact is not None:
            self.artifacts.append(artifact)

    def record(self, **values: Any) -> None:
        self.summary.update(values)

    def result(self) -> ProbeResult:
        return ProbeResult(
            name=self.name,
            passed=not self.failures,
            summary=self.summary,
            artifacts=self.artifacts,
            failures=self.failures,
        )


ProbeHandler = Callable[[Workbench, Outcome, np.random.Generator], None]


@dataclass(frozen=True)
class Probe:
    name: str
    summary: str
    requires: str
    handler: ProbeHandler


class ProbeRouter:
    """Named probe handlers, registered with the ``probe`` decorator."""

    def __init__(self) -> None:
        self.probes: Dict[str, Probe] = {}

    def probe(self, name: str, summary: str, requires: str = "any system") -> Callable:
        def register(handler: ProbeHandler) -> ProbeHandler:
            self.probes[name] = Probe(name, summary, requires, handler)
            return handler

        return register

    def include_router(self, other: "ProbeRouter") -> None:
        self.probes.update(other.probes)

    def __getitem__(self, name: str) -> Probe:
        return self.probes[name]

    def listing(self) -> List[Tuple[str, str, str]]:
        return [(p.name, p.summary, p.requires) for p in self.probes.values()]
