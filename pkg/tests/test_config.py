from pathlib import Path
from textwrap import dedent

import pytest

from minlab.core.exceptions import EXIT_CONFIG, ConfigError
from minlab.experiment import load_config, parse_config
from minlab.models.blowup import BlowupMode, FiberKind
from minlab.schemas.experiment import NAMED_CONSTANTS

WITNESS = """
[system]
kind = skew
harmonics = 1:0.05

[blowup]
mode = backward-only
n = 4

[probes]
run = witness, fibers

[output]
seed = 4
"""


def parse(text: str):
    return parse_config(dedent(text).lstrip())


def test_valid_config_is_parsed():
    config = parse(WITNESS)
    assert config.system.kind == "skew"
    assert config.system.alpha == NAMED_CONSTANTS["golden"]
    assert config.system.harmonics == [(1, 0.05)]
    assert config.blowup.mode is BlowupMode.BACKWARD_ONLY
    assert config.blowup.fiber is FiberKind.INTERVAL
    assert config.probes.run == ["witness", "fibers"]
    assert config.output.formats == ["csv", "json", "svg"]


def test_fiber_kind_alias_is_accepted():
    text = WITNESS.replace("n = 4", "n = 4\nfiberKind = interval")
    assert parse(text).blowup.fiber is FiberKind.INTERVAL


def test_unknown_key_reports_its_line():
    with pytest.raises(ConfigError) as excinfo:
        parse(WITNESS.replace("n = 4", "n = 4\nwidth = 3"))
    error = excinfo.value
    assert error.section == "blowup"
    assert error.key == "width"
    assert error.line == 8
    assert error.exit_code == EXIT_CONFIG
    assert "unknown key" in error.detail


def test_missing_seed_is_reported():
    with pytest.raises(ConfigError) as excinfo:
        parse(WITNESS.replace("seed = 4", ""))
    assert excinfo.value.section == "output"
    assert excinfo.value.key == "seed"
    assert "missing required key" in excinfo.value.detail


def test_unknown_section_is_rejected():
    with pytest.raises(ConfigError) as excinfo:
        parse(WITNESS + "\n[plots]\nstyle = dark\n")
    assert excinfo.value.section == "plots"


def test_even_harmonic_needs_no_klein_probe():
    text = """
    [system]
    kind = klein
    harmonics = 1:0.05, 2:0.01

    [probes]
    run = equivariance

    [output]
    seed = 1
    """
    with pytest.raises(ConfigError) as excinfo:
        parse(text)
    assert "equivariance requires odd harmonics" in excinfo.value.detail
    assert excinfo.value.line == 3


def test_witness_needs_backward_only_mode():
    with pytest.raises(ConfigError) as excinfo:
        parse(WITNESS.replace("backward-only", "two-sided"))
    assert excinfo.value.key == "mode"
    assert excinfo.value.line == 6


def test_blowup_probe_needs_blowup_section():
    text = """
    [system]
    kind = skew

    [probes]
    run = fibers

    [output]
    seed = 1
    """
    with pytest.raises(ConfigError, match="needs a \\[blowup\\] section"):
        parse(text)


def test_duplicate_key_is_rejected():
    with pytest.raises(ConfigError) as excinfo:
        parse(WITNESS.replace("n = 4", "n = 4\nn = 5"))
    assert excinfo.value.line == 8


def test_repeated_probe_is_rejected():
    with pytest.raises(ConfigError, match="probes listed twice"):
        parse(WITNESS.replace("witness, fibers", "witness, witness"))


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_shipped_configs_parse():
    configs = sorted((Path(__file__).parent.parent / "configs").glob("*.ini"))
    assert configs
    for path in configs:
        load_config(path)
