import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from quadratic_problem import ConstructionKind, make_construction, make_random_instance  # noqa: E402
from run_config import ENV_LOG_LEVEL, ENV_OUTPUT_DIR  # noqa: E402


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(ENV_OUTPUT_DIR, raising=False)
    monkeypatch.delenv(ENV_LOG_LEVEL, raising=False)


@pytest.fixture
def signed_linear_two():
    # n=2, G=2: 分量 (1, 1) 与 (1, −1)
    return make_construction(ConstructionKind.SIGNED_LINEAR, 2, 2.0, 1.0)


@pytest.fixture
def signed_linear_four():
    return make_construction(ConstructionKind.SIGNED_LINEAR, 4, 6.0, 1.0)


@pytest.fixture
def random_instance():
    return make_random_instance(6, 1.0, 4.0, 1.0, seed=3)
