"""minlab command-line interface."""

import logging
from pathlib import Path
from typing import Optional

import click

from minlab import __version__
from minlab.core.config import settings
from minlab.core.exceptions import EXIT_ASSERTION, EXIT_OK, ConfigError, MinlabError
from minlab.core.logging import setup_logging
from minlab.experiment import SUMMARY_FILE, load_config, run_experiment
from minlab.probes.registry import probe_registry
from minlab.workbench import Workbench

logger = logging.getLogger(__name__)

config_argument = click.argument(
    "config", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)


def _fail(ctx: click.Context, exc: MinlabError) -> None:
    label = "config error" if isinstance(exc, ConfigError) else "error"
    click.echo(f"{label}: {exc.detail}", err=True)
    ctx.exit(exc.exit_code)


@click.group()
@click.version_option(__version__, prog_name="minlab")
@click.option("--log-level", default=None, help="Log level (defaults to MINLAB_LOG_LEVEL)")
def cli(log_level: Optional[str]) -> None:
    """Build minimal dynamical systems and check their properties numerically."""
    setup_logging(log_level or settings.LOG_LEVEL)


@cli.command()
@config_argument
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Report directory (overrides [output] directory)",
)
@click.pass_context
def run(ctx: click.Context, config: Path, out: Optional[Path]) -> None:
    """Run the probes of CONFIG and write a report bundle.

    Exit status is 0 when every probe passes, 1 when an assertion fails and
    2 for configuration errors.
    """
    try:
        experiment = load_config(config)
        bundle = run_experiment(experiment, out)
    except MinlabError as exc:
        _fail(ctx, exc)
        return

    directory = out or experiment.output.directory or settings.OUTPUT_DIR
    passed = sum(1 for probe in bundle.probes if probe.passed)
    status = "PASS" if bundle.passed else "FAIL"
    click.echo(
        f"{status} {passed}/{len(experiment.probes.run)} probes -> "
        f"{Path(directory) / SUMMARY_FILE}"
    )
    for probe in bundle.probes:
        for failure in probe.failures:
            click.echo(f"  {probe.name}: {failure}", err=True)
        if probe.error is not None:
            click.echo(f"  {probe.name}: {probe.error.error_code}: {probe.error.detail}", err=True)
    ctx.exit(EXIT_OK if bundle.passed else EXIT_ASSERTION)


@cli.command()
@config_argument
@click.pass_context
def validate(ctx: click.Context, config: Path) -> None:
    """Check CONFIG and build its systems without running any probe."""
    try:
        experiment = load_config(config)
        Workbench(experiment).prepare()
    except MinlabError as exc:
        _fail(ctx, exc)
        return
    click.echo(f"ok: {experiment.system.kind}, probes {', '.join(experiment.probes.run)}")


@cli.command("list-probes")
def list_probes() -> None:
    """Show every probe with its prerequisites."""
    for name, summary, requires in probe_registry.listing():
        click.echo(f"{name:<13}{summary} (requires {requires})")


if __name__ == "__main__":
    cli()
