"""Experiment config parsing and the probe runner."""

import configparser
import re
import time
import zlib
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from minlab import __version__
from minlab.core.config import settings
from minlab.core.exceptions import ConfigError, MinlabError, ResourceError
from minlab.core.logging import get_logger, run_context
from minlab.core.reports import ReportWriter
from minlab.probes.base import Outcome
from minlab.probes.registry import probe_registry
from minlab.schemas.common import BundleMetadata, ProbeError, ProbeResult, ReportBundle
from minlab.schemas.experiment import ExperimentConfig
from minlab.workbench import Workbench

logger = get_logger(__name__)

SECTIONS = ("system", "blowup", "probes", "output")
SUMMARY_FILE = "summary.json"

_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_LINE = re.compile(r"^\s*([^#;=:\s][^=:]*?)\s*[=:]")

Location = Tuple[str, Optional[str]]


def _locate(text: str) -> Dict[Location, int]:
    """Line number of every section header and key."""
    lines: Dict[Location, int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_LINE.match(line)
        if header:
            section = header.group(1).strip()
            lines.setdefault((section, None), number)
            continue
        key = _KEY_LINE.match(line)
        if key and section is not None:
            lines.setdefault((section, key.group(1).strip()), number)
    return lines


def _read(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__defaults__"
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section]", line=exc.lineno) from exc
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", exc.section, exc.option, exc.lineno) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate section", exc.section, line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line=line) from exc
    return parser


def _from_validation(exc: ValidationError, lines: Dict[Location, int]) -> ConfigError:
    error = exc.errors()[0]
    loc = [str(part) for part in error["loc"]]
    section = loc[0] if loc else None
    key = loc[1] if len(loc) > 1 else None
    if error["type"] == "extra_forbidden":
        detail = "unknown key"
    elif error["type"] == "missing":
        detail = "missing required key" if key else "missing required section"
    else:
        detail = error["msg"]
    line = lines.get((section, key)) or lines.get((section, None))
    return ConfigError(detail, section, key, line)


def parse_config(text: str) -> ExperimentConfig:
    """Parse INI experiment text into a validated config.

    Args:
        text: Config file contents with [system], [blowup], [probes] and [output]

    Returns:
        ExperimentConfig with every cross-section prerequisite checked

    Raises:
        ConfigError: With section, key and line of the first problem
    """
    parser = _read(text)
    lines = _locate(text)
    data: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError("unknown section", section, line=lines.get((section, None)))
        data[section] = dict(parser.items(section))
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise _from_validation(exc, lines) from exc
    except ConfigError as exc:
        line = lines.get((exc.section, exc.key)) or lines.get((exc.section, None))
        raise exc.at_line(line) from exc


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and parse a config file.

    Raises:
        ConfigError: If the file cannot be read or parsed
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def _failed(outcome: Outcome, exc: Exception) -> ProbeResult:
    detail = exc.detail if isinstance(exc, MinlabError) else f"unexpected error: {exc}"
    result = outcome.result()
    return result.model_copy(
        update={
            "passed": False,
            "error": ProbeError(detail=detail, error_code=type(exc).__name__),
        }
    )


def _run_probe(
    name: str, bench: Workbench, writer: ReportWriter, seed: int
) -> Tuple[ProbeResult, bool]:
    """Run one probe; the flag is set when it exhausted a resource budget."""
    outcome = Outcome(name, writer)
    rng = np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])
    logger.info("Probe started")
    started = time.perf_counter()
    exhausted = False
    try:
        probe_registry[name].handler(bench, outcome, rng)
        result = outcome.result()
    except ConfigError:
        raise
    except ResourceError as exc:
        result, exhausted = _failed(outcome, exc), True
        logger.error("Probe exhausted its budget", extra={"detail": exc.detail})
    except MinlabError as exc:
        result = _failed(outcome, exc)
        logger.warning("Probe raised", extra={"detail": exc.detail})
    except Exception as exc:
        result = _failed(outcome, exc)
        logger.exception("Probe crashed")
    logger.info(
        "Probe finished",
        extra={
            "passed": result.passed,
            "duration_ms": round(1000.0 * (time.perf_counter() - started), 3),
        },
    )
    return result, exhausted


def run_experiment(
    config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None
) -> ReportBundle:
    """Run every configured probe in order and write the report bundle.

    Each probe gets its own generator seeded by the config seed and the probe
    name, so results do not depend on which other probes run. Probe errors,
    expected or not, are recorded and the run continues; a resource error
    stops the run and marks the bundle incomplete.

    Args:
        config: Validated experiment config
        out_dir: Output directory overriding [output] directory

    Returns:
        ReportBundle, also written to summary.json

    Raises:
        ConfigError: If the configured systems cannot be built
    """
    directory = Path(out_dir or config.output.directory or settings.OUTPUT_DIR)
    seed = config.output.seed
    with run_context(seed=seed, kind=config.system.kind):
        bench = Workbench(config).prepare()
        writer = ReportWriter(directory, config.output.formats)

        results = []
        complete = True
        for name in config.probes.run:
            with run_context(probe=name):
                result, exhausted = _run_probe(name, bench, writer, seed)
            results.append(result)
            if exhausted:
                complete = False
                break

        bundle = ReportBundle(
            metadata=BundleMetadata(title=settings.APP_TITLE, version=__version__, seed=seed),
            config=config.model_dump(mode="json"),
            probes=results,
            passed=complete and all(r.passed for r in results),
            complete=complete,
            digests=dict(sorted(writer.digests.items())),
        )
        writer.json(SUMMARY_FILE, bundle, always=True)
        logger.info(
            "Experiment finished",
            extra={"directory": str(directory), "passed": bundle.passed, "probes": len(results)},
        )
    return bundle
