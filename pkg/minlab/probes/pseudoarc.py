"""Crookedness probe of the pseudo-arc bonding maps."""

import logging

import numpy as np

from minlab.models.pseudoarc import (
    BondingMap,
    crooked_map,
    crookedness,
    enumerate_towers,
    is_delta_crooked,
    power,
    preimages,
    tower_check,
)
from minlab.probes.base import Outcome, ProbeRouter
from minlab.schemas.reports import CrookednessLevel
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)
router = ProbeRouter()

TOWER_DEPTH = 2
BISECTION_SLACK = 1e-8


@router.probe("crooked", "Crookedness of the constructed bonding maps and their powers")
def crooked_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    params = bench.config.probes
    levels = []
    for level in params.crooked_levels:
        g = crooked_map(level)
        delta = 1.0 / level
        crooked = is_delta_crooked(g, delta)
        outcome.check(crooked, f"crooked_map({level}) is not {delta:.4f}-crooked")
        increasing = bool(np.all(np.diff(g.xs) > 0.0))
        outcome.check(increasing, f"level {level} breakpoints not increasing")

        powers = []
        if level in params.crooked_power_levels:
            for m in range(2, params.crooked_powers + 1):
                passed = is_delta_crooked(power(g, m), delta)
                outcome.check(passed, f"crooked_map({level})^{m} is not {delta:.4f}-crooked")
                powers.append(passed)
            measured = [crookedness(power(g, m)) for m in range(1, params.crooked_powers + 1)]
            outcome.check(
                all(b <= a + BISECTION_SLACK for a, b in zip(measured, measured[1:])),
                f"crookedness of powers of level {level} grew: {measured}",
            )
            outcome.record(**{f"powers_{level}": measured})
        levels.append(
            CrookednessLevel(
                level=level,
                breakpoints=g.breakpoint_count,
                delta=delta,
                crooked=crooked,
                powers_crooked=powers,
            )
        )
        outcome.keep(outcome.writer.csv(f"crooked_{level}.csv", ["x", "g"], g.rows()))

    identity = BondingMap(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    for delta in (0.1, 0.5, 0.99):
        outcome.check(not is_delta_crooked(identity, delta), f"identity passed at {delta}")

    g = crooked_map(params.crooked_levels[0])
    towers = enumerate_towers(g, 0.5, TOWER_DEPTH)
    outcome.check(all(tower_check(g, t) for t in towers), "inconsistent tower over 0.5")
    laps = len(preimages(g, 0.5))
    outcome.check(
        len(enumerate_towers(g, 0.5, 1)) == laps, f"tower count differs from {laps} preimages"
    )

    outcome.record(
        levels=[entry.level for entry in levels],
        breakpoints=[entry.breakpoints for entry in levels],
        towers=len(towers),
    )

    def draw(ax) -> None:
        ax.plot(g.xs, g.ys, linewidth=0.8)
        ax.set_xlabel("x")
        ax.set_ylabel("g(x)")
        ax.set_aspect("equal")

    outcome.keep(outcome.writer.json("crooked.json", levels))
    title = f"crooked map, level {params.crooked_levels[0]}"
    outcome.keep(outcome.writer.svg("crooked.svg", draw, title=title))
