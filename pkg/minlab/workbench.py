"""Systems built from an experiment config, shared by every probe of a run."""

import logging
from functools import cached_property

from minlab.core.exceptions import ConfigError, MinlabError, PreconditionError
from minlab.models.blowup import (
    BaseSystem,
    BlownIndexSet,
    KleinBase,
    SkewBase,
    StageSpace,
    SuspensionBase,
    build_stage,
)
from minlab.models.circle import (
    CirclePoint,
    DenjoySystem,
    GeometricGapSchedule,
    RotationSystem,
    denjoy_build,
)
from minlab.models.pseudoarc import crooked_map
from minlab.models.skew import RoofFunction, SkewSystem, TorusPoint, klein_project
from minlab.models.suspension import (
    CantorSystem,
    DenjoyCantor,
    Odometer,
    SuspensionPoint,
    SuspensionSystem,
    suspend,
)
from minlab.schemas.experiment import SUSPENSION_KINDS, TORUS_KINDS, ExperimentConfig

logger = logging.getLogger(__name__)


class Workbench:
    """Lazily built systems of one experiment.

    Every property builds its object on first use; ``prepare`` builds
    everything the config asks for and turns construction failures into
    config errors.
    """

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        self.system_config = config.system
        self.kind = config.system.kind

    def prepare(self) -> "Workbench":
        """Build the configured system (and stage) now.

        Raises:
            ConfigError: If the parameters do not describe a valid system
        """
        steps = [("system", lambda: self.system)]
        if self.kind in TORUS_KINDS:
            steps.append(("system", lambda: self.torus_start))
        if self.config.blowup is not None:
            steps.append(("blowup", lambda: self.stage))
        for section, build in steps:
            try:
                build()
            except ConfigError:
                raise
            except MinlabError as exc:
                raise ConfigError(exc.detail, section) from exc
        return self

    @property
    def system(self) -> object:
        """The object named by [system] kind."""
        if self.kind == "rotation":
            return self.rotation
        if self.kind == "denjoy":
            return self.denjoy
        if self.kind in SUSPENSION_KINDS:
            return self.suspension
        return self.skew

    @property
    def start_angle(self) -> CirclePoint:
        start = self.system_config.start
        return CirclePoint(start[0] if start else 0.0)

    @cached_property
    def rotation(self) -> RotationSystem:
        return RotationSystem(self.system_config.alpha)

    @cached_property
    def denjoy(self) -> DenjoySystem:
        cfg = self.system_config
        ratio = cfg.gap_ratio
        # default scale puts total gap mass 1/2 on the circle
        scale = cfg.gap_scale or (1.0 - ratio) / (2.0 * len(cfg.seeds) * (1.0 + ratio))
        return denjoy_build(
            cfg.alpha, cfg.seeds, GeometricGapSchedule(scale, ratio), depth=cfg.depth
        )

    @cached_property
    def cantor(self) -> CantorSystem:
        if self.kind == "odometer-suspension":
            return Odometer(self.system_config.odometer_depth)
        if self.kind == "denjoy-suspension":
            return DenjoyCantor(self.denjoy)
        raise PreconditionError(f"System kind {self.kind} has no Cantor base")

    @cached_property
    def suspension(self) -> SuspensionSystem:
        return suspend(self.cantor)

    @property
    def suspension_start(self) -> SuspensionPoint:
        start = self.system_config.start
        return self.suspension.point(self.cantor.origin(), start[0] if start else 0.0)

    @cached_property
    def skew(self) -> SkewSystem:
        cfg = self.system_config
        odd_only = self.kind == "klein" or "equivariance" in self.config.probes.run
        return SkewSystem(cfg.alpha, RoofFunction.from_pairs(cfg.harmonics, odd_only=odd_only))

    @property
    def torus_start(self) -> TorusPoint:
        start = self.system_config.start or [0.0, 0.0]
        if len(start) != 2:
            raise ConfigError("torus start needs two coordinates", "system", "start")
        return TorusPoint(start[0], start[1])

    @cached_property
    def stage_base(self) -> BaseSystem:
        if self.kind == "klein":
            return KleinBase(self.skew, klein_project(self.torus_start))
        if self.kind in TORUS_KINDS:
            return SkewBase(self.skew, self.torus_start)
        if self.kind in SUSPENSION_KINDS:
            return SuspensionBase(self.suspension, self.system_config.time, self.suspension_start)
        raise ConfigError(f"blow-up needs a skew or suspension system, not {self.kind}", "blowup")

    @cached_property
    def stage(self) -> StageSpace:
        blowup = self.config.blowup
        if blowup is None:
            raise ConfigError("this probe needs a [blowup] section", "blowup")
        base = self.stage_base
        stage = build_stage(
            base,
            BlownIndexSet(blowup.mode, blowup.n),
            fiber_kind=blowup.fiber,
            weight_ratio=blowup.weight_ratio,
            chart_radius=blowup.chart_radius,
            bonding=crooked_map(blowup.tower_level),
            tower_depth=blowup.tower_depth,
        )
        logger.info(
            "Built blow-up stage",
            extra={"kind": self.kind, "mode": blowup.mode.value, "fibers": stage.fiber_count},
        )
        return stage

