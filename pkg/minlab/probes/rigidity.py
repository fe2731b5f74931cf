"""Tiling-rigidity and product non-minimality probes."""

import logging

import numpy as np

from minlab.core.exceptions import RigidityFailure
from minlab.models.rigidity import (
    AffineForm,
    TilingWindow,
    affine_label,
    classify_product_structure,
    enumerate_automorphisms,
    independent_rotation_minima,
    invariant_of,
    product_nonminimality_report,
)
from minlab.models.skew import TorusPoint
from minlab.probes.base import Outcome, ProbeRouter
from minlab.schemas.reports import ProductReport, TilingVerdict
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)
router = ProbeRouter()

CONTRAST_THRESHOLD = 1e-3


@router.probe("tiling", "Exhaustive automorphism enumeration of a composant tiling window")
def tiling_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    params = bench.config.probes
    radius = params.tiling_radius
    maps = enumerate_automorphisms(
        TilingWindow(radius), allow_swap=params.tiling_swap, monotone=params.tiling_monotone
    )
    try:
        structure = classify_product_structure(maps)
    except RigidityFailure as exc:
        outcome.check(False, exc.detail)
        return

    forms = set(structure.forms)
    expected = (2 * radius + 1) ** 2 * (2 if params.tiling_swap else 1)
    outcome.check(len(maps) == expected, f"{len(maps)} automorphisms, expected {expected}")
    outcome.check(AffineForm(False, 0, 0) in forms, "identity is missing")
    outcome.check(AffineForm(False, 2, 0) in forms, "translation by (2, 0) is missing")
    outcome.check(AffineForm(False, 1, 0) not in forms, "odd translation (1, 0) was accepted")
    outcome.check(structure.squares_are_translations, "a square is not a translation")
    group = "Z_x_Z2" if params.tiling_swap else "Z"
    outcome.check(structure.group == group, f"group {structure.group}, expected {group}")

    verdict = TilingVerdict(
        window_radius=radius,
        flags={"allowSwap": params.tiling_swap, "monotone": params.tiling_monotone},
        automorphism_count=len(maps),
        decomposable="all",
        group=structure.group,
        swap_count=structure.swap_count,
        translation_rank=structure.translation_rank,
        squares_are_translations=structure.squares_are_translations,
    )
    outcome.record(
        automorphismCount=len(maps), group=structure.group, swapCount=structure.swap_count
    )
    outcome.keep(outcome.writer.json("tiling.json", verdict))
    outcome.keep(
        outcome.writer.csv(
            "tiling_maps.csv",
            ["label", "swap", "a", "b"],
            [(affine_label(f), f.swap, f.a, f.b) for f in structure.forms],
        )
    )


@router.probe("product", "Invariant and distance margin of a product of rotation powers")
def product_probe(bench: Workbench, outcome: Outcome, rng: np.random.Generator) -> None:
    params = bench.config.probes
    k1, k2 = params.product_k1, params.product_k2
    alpha = params.product_alpha
    if alpha is None:
        alpha = bench.system_config.alpha
    start = TorusPoint(*params.product_start)
    target = TorusPoint(*params.product_target)
    steps = params.product_steps

    margin = product_nonminimality_report(k1, k2, alpha, start, target, steps)
    outcome.check(margin.drift < 1e-9, f"invariant drifted by {margin.drift:.3e}")
    outcome.check(
        margin.respects_bound,
        f"orbit came within {margin.min_distance:.6f} of the target, bound {margin.bound:.6f}",
    )

    horizons = sorted(h for h in params.product_horizons if h <= steps) or [steps]
    product_minima = independent_rotation_minima(k1 * alpha, k2 * alpha, start, target, horizons)
    outcome.check(
        min(product_minima) >= margin.bound - 1e-12,
        "product orbit beats the invariant bound at some horizon",
    )
    contrast = independent_rotation_minima(
        alpha, params.product_contrast_beta, start, target, sorted(params.product_horizons)
    )
    outcome.check(
        all(b <= a for a, b in zip(contrast, contrast[1:])), "contrast minima increased"
    )
    outcome.check(
        contrast[-1] < CONTRAST_THRESHOLD,
        f"independent rotations stay {contrast[-1]:.3e} from the target",
    )

    report = ProductReport(
        k1=k1,
        k2=k2,
        alpha=alpha,
        steps=steps,
        invariant=invariant_of(k1, k2, start.x, start.y),
        drift=margin.drift,
        target=[target.x, target.y],
        invariant_gap=margin.invariant_gap,
        bound=margin.bound,
        min_distance=margin.min_distance,
        respects_bound=margin.respects_bound,
        contrast_minima=contrast,
    )
    outcome.record(bound=margin.bound, min_distance=margin.min_distance, drift=margin.drift)

    contrast_horizons = sorted(params.product_horizons)

    def draw(ax) -> None:
        ax.loglog(horizons, product_minima, "o-", label=f"R^{k1} x R^{k2}")
        ax.loglog(contrast_horizons, contrast, "s-", label="independent rotations")
        ax.axhline(margin.bound, linestyle="--", label="invariant bound")
        ax.set_xlabel("orbit length")
        ax.set_ylabel("distance to target")
        ax.legend()

    rows = [("product", h, m) for h, m in zip(horizons, product_minima)]
    rows += [("contrast", h, m) for h, m in zip(contrast_horizons, contrast)]
    outcome.keep(outcome.writer.json("product.json", report))
    outcome.keep(outcome.writer.csv("product.csv", ["orbit", "horizon", "min_distance"], rows))
    outcome.keep(outcome.writer.svg("product.svg", draw, title="product non-minimality"))
