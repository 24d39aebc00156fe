import random
from pathlib import Path

import pytest

from core.formats import parse_sequence, parse_track

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240601, help="зерно для случайных выборок")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: долгие прогоны семейств")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def g1m2():
    return parse_track(FIXTURES / "g1m2.ttk")


@pytest.fixture
def g0m7():
    return parse_track(FIXTURES / "g0m7.ttk")


@pytest.fixture
def phi():
    return parse_sequence(FIXTURES / "g1m2_phi.seq").period


@pytest.fixture
def phi_cubed():
    return parse_sequence(FIXTURES / "g1m2_loop.seq").period
