from pathlib import Path
from textwrap import dedent

import pytest

from minlab.experiment import load_config, parse_config, run_experiment
from minlab.probes.base import Probe
from minlab.probes.registry import probe_registry

CONFIGS = sorted((Path(__file__).parent.parent / "configs").glob("*.ini"))


@pytest.mark.parametrize("path", CONFIGS, ids=lambda path: path.stem)
def test_shipped_experiment_passes(path, tmp_path):
    bundle = run_experiment(load_config(path), tmp_path)
    failures = {probe.name: (probe.failures, probe.error) for probe in bundle.probes}
    assert bundle.passed, failures
    assert bundle.complete
    assert (tmp_path / "summary.json").exists()
    for name in bundle.digests:
        assert (tmp_path / name).exists()


def test_exhausted_budget_stops_the_run(tmp_path):
    config = parse_config(
        dedent(
            """
            [system]
            kind = rotation

            [probes]
            run = tiling, crooked
            tiling_radius = 5

            [output]
            seed = 3
            formats = json
            """
        ).lstrip()
    )
    bundle = run_experiment(config, tmp_path)
    assert not bundle.complete
    assert not bundle.passed
    assert [probe.name for probe in bundle.probes] == ["tiling"]
    assert bundle.probes[0].error.error_code == "ResourceError"


def test_probe_results_do_not_depend_on_other_probes(tmp_path):
    text = """
    [system]
    kind = skew
    harmonics = 1:0.05

    [blowup]
    mode = backward-only
    n = 4

    [probes]
    run = {run}
    almost11_samples = 300

    [output]
    seed = 11
    formats = json
    """
    alone = parse_config(dedent(text.format(run="almost11")).lstrip())
    paired = parse_config(dedent(text.format(run="witness, almost11")).lstrip())
    first = run_experiment(alone, tmp_path / "alone")
    second = run_experiment(paired, tmp_path / "paired")
    assert first.probes[0].passed and second.probes[1].passed
    assert first.probes[0].summary == second.probes[1].summary


def test_unexpected_error_is_recorded_and_the_run_continues(tmp_path, monkeypatch):
    def broken(bench, outcome, rng):
        raise ValueError("bad breakpoint array")

    monkeypatch.setitem(
        probe_registry.probes, "crooked", Probe("crooked", "broken", "any system", broken)
    )
    config = parse_config(
        dedent(
            """
            [system]
            kind = rotation

            [probes]
            run = crooked, orbit

            [output]
            seed = 3
            formats = json
            """
        ).lstrip()
    )
    bundle = run_experiment(config, tmp_path)
    assert bundle.complete
    assert not bundle.passed
    crooked, orbit = bundle.probes
    assert crooked.error.error_code == "ValueError"
    assert "bad breakpoint array" in crooked.error.detail
    assert orbit.passed
    assert (tmp_path / "summary.json").exists()
