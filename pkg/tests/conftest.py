"""
Shared fixtures for the subtensor-rank test suite.
"""

import json
from pathlib import Path

import pytest

from subtensor_rank.exact_algebra import RATIONALS, gf
from subtensor_rank.tensor_core import Tensor

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def gf2():
    return gf(2)


@pytest.fixture
def gf5():
    return gf(5)


@pytest.fixture
def qq():
    return RATIONALS


def load_sample_tensor(name: str) -> Tensor:
    with open(SAMPLES / name) as f:
        return Tensor.from_json(json.load(f))


@pytest.fixture
def diag222() -> Tensor:
    return load_sample_tensor("diag222.json")
