import json
from pathlib import Path

import pytest

from seacoop.model import base_config

HERE = Path(__file__).parent


@pytest.fixture(scope="session")
def golden():
    return json.loads((HERE / "golden.json").read_text())


@pytest.fixture(scope="session")
def base_I():
    return base_config("I")


@pytest.fixture(scope="session")
def base_II():
    return base_config("II")


def backward_slope(v, dt):
    """Fourth-order one-sided derivative at the last sample."""
    return (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * dt)
