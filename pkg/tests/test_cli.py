import json

from click.testing import CliRunner

from minlab import __version__
from minlab.main import cli

ROTATION = """
[system]
kind = rotation
alpha = golden

[probes]
run = orbit, density
orbit_length = 200
density_steps = 10000
density_eps = 3e-4
density_checkpoints = 5

[output]
seed = 1
formats = csv, json
"""

WITNESS = """
[system]
kind = skew
harmonics = 1:0.05

[blowup]
mode = backward-only
n = 4

[probes]
run = witness, almost11
almost11_samples = 500

[output]
seed = 4
formats = json
"""

runner = CliRunner()


def test_version():
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_rotation_run_passes(write_config, tmp_path):
    out = tmp_path / "rotation"
    result = runner.invoke(cli, ["run", str(write_config(ROTATION)), "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert result.stdout.startswith("PASS 2/2 probes")
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["passed"] is True
    assert summary["complete"] is True
    assert [probe["name"] for probe in summary["probes"]] == ["orbit", "density"]
    assert "orbit.csv" in summary["digests"]


def test_runs_are_byte_identical(write_config, tmp_path):
    config = str(write_config(WITNESS))
    first, second = tmp_path / "first", tmp_path / "second"
    assert runner.invoke(cli, ["run", config, "--out", str(first)]).exit_code == 0
    assert runner.invoke(cli, ["run", config, "--out", str(second)]).exit_code == 0
    for name in ("summary.json", "witness.json", "almost11.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_witness_report(write_config, tmp_path):
    out = tmp_path / "witness"
    result = runner.invoke(cli, ["run", str(write_config(WITNESS)), "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    witness = json.loads((out / "witness.json").read_text(encoding="utf-8"))
    assert witness["separation"] == 0.5
    assert witness["image_distance"] == 0.0
    assert witness["images_equal"] is True
    assert witness["first"]["index"] == -1


def test_failed_check_exits_with_one(write_config, tmp_path):
    text = """
    [system]
    kind = rotation

    [probes]
    run = tiling
    tiling_monotone = false

    [output]
    seed = 2
    formats = json
    """
    result = runner.invoke(cli, ["run", str(write_config(text)), "--out", str(tmp_path / "r")])
    assert result.exit_code == 1
    assert result.stdout.startswith("FAIL 0/1 probes")
    assert "tiling:" in result.stderr


def test_config_error_exits_with_two(write_config, tmp_path):
    path = write_config(WITNESS.replace("n = 4", "n = 4\nwidth = 3"))
    result = runner.invoke(cli, ["run", str(path), "--out", str(tmp_path / "bad")])
    assert result.exit_code == 2
    assert "config error: line 8, [blowup] width: unknown key" in result.stderr
    assert not (tmp_path / "bad").exists()


def test_validate(write_config):
    result = runner.invoke(cli, ["validate", str(write_config(WITNESS))])
    assert result.exit_code == 0
    assert result.stdout.strip() == "ok: skew, probes witness, almost11"


def test_list_probes():
    result = runner.invoke(cli, ["list-probes"])
    assert result.exit_code == 0
    names = [line.split()[0] for line in result.stdout.splitlines()]
    assert names == [
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
