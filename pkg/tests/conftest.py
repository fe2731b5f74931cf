import math
from pathlib import Path
from textwrap import dedent

import numpy as np
import pytest

from minlab.models.blowup import BlownIndexSet, SkewBase, build_stage
from minlab.models.circle import denjoy_build
from minlab.models.skew import RoofFunction, SkewSystem

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def denjoy():
    return denjoy_build(GOLDEN, [0.0, 0.3], depth=32)


@pytest.fixture
def roof():
    return RoofFunction.from_pairs([(1, 0.05)])


@pytest.fixture
def skew(roof):
    return SkewSystem(GOLDEN, roof)


@pytest.fixture
def backward_stage(skew):
    return build_stage(SkewBase(skew), BlownIndexSet.backward_only(4))


@pytest.fixture
def two_sided_stage(skew):
    return build_stage(SkewBase(skew), BlownIndexSet.two_sided(8))


@pytest.fixture
def write_config(tmp_path):
    """Write an INI config into tmp_path and return its path."""

    def write(text: str, name: str = "experiment.ini") -> Path:
        path = tmp_path / name
        path.write_text(dedent(text).lstrip(), encoding="utf-8")
        return path

    return write
