"""Deterministic artifact writers for CSV, JSON and SVG reports."""

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Callable, Collection, Dict, Iterable, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

from matplotlib import rc_context  # noqa: E402
from matplotlib.axes import Axes  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from pydantic import BaseModel  # noqa: E402

logger = logging.getLogger(__name__)

SVG_SETTINGS = {"svg.hashsalt": "minlab", "svg.fonttype": "path"}


def sha256_file(path: Union[str, Path]) -> str:
    """Hex SHA-256 digest of a file."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def to_jsonable(payload: Any) -> Any:
    """Convert schema models to plain JSON data, keeping field aliases."""
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json", by_alias=True)
    if isinstance(payload, dict):
        return {str(key): to_jsonable(value) for key, value in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(value) for value in payload]
    return payload


def dumps(payload: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class ReportWriter:
    """Writes artifacts under one directory and records their digests.

    Paths handed back and used as digest keys are relative to the directory,
    so bundles written to different places compare equal.
    """

    def __init__(
        self, directory: Union[str, Path], formats: Collection[str] = ("csv", "json", "svg")
    ) -> None:
        self.directory = Path(directory)
        self.formats = frozenset(formats)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.digests: Dict[str, str] = {}

    def _target(self, name: str) -> Path:
        path = self.directory / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def _record(self, name: str, path: Path) -> str:
        self.digests[name] = sha256_file(path)
        logger.debug("Wrote artifact", extra={"artifact": name})
        return name

    def csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> Optional[str]:
        """UTF-8 CSV with a header row; floats use repr formatting."""
        if "csv" not in self.formats:
            return None
        path = self._target(name)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return self._record(name, path)

    def json(self, name: str, payload: Any, always: bool = False) -> Optional[str]:
        if "json" not in self.formats and not always:
            return None
        path = self._target(name)
        path.write_text(dumps(payload), encoding="utf-8")
        return self._record(name, path)

    def svg(self, name: str, draw: Callable[[Axes], None], title: str = "") -> Optional[str]:
        """Static SVG plot drawn by ``draw`` on a single axes."""
        if "svg" not in self.formats:
            return None
        path = self._target(name)
        with rc_context(SVG_SETTINGS):
            figure = Figure(figsize=(6.4, 4.0))
            axes = figure.add_subplot(1, 1, 1)
            draw(axes)
            if title:
                axes.set_title(title)
            figure.savefig(path, format="svg", metadata={"Date": None})
        return self._record(name, path)
