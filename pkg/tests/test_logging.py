import io
import json
import logging

import pytest

from minlab.core.logging import RunContextFilter, RunJsonFormatter, run_context


@pytest.fixture
def captured():
    stream = io.StringIO()
    handler = logging.StreamHandler(stream)
    handler.addFilter(RunContextFilter())
    handler.setFormatter(RunJsonFormatter("%(name)s %(levelname)s %(message)s"))
    log = logging.getLogger("minlab.models.sample")
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    yield log, stream
    log.removeHandler(handler)


def _records(stream):
    return [json.loads(line) for line in stream.getvalue().splitlines()]


def test_run_fields_reach_plain_module_loggers(captured):
    log, stream = captured
    with run_context(seed=4, kind="klein"):
        log.info("outer")
        with run_context(probe="fibers"):
            log.info("inner")
        log.info("after")
    outer, inner, after = _records(stream)
    assert (outer["seed"], outer["kind"], outer["probe"]) == (4, "klein", None)
    assert (inner["seed"], inner["kind"], inner["probe"]) == (4, "klein", "fibers")
    assert after["probe"] is None


def test_run_fields_are_null_outside_a_run(captured):
    log, stream = captured
    log.info("idle", extra={"kind": "skew"})
    (record,) = _records(stream)
    assert record["seed"] is None
    assert record["kind"] == "skew"
