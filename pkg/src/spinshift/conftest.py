"""Shared fixtures for the spinshift test modules."""

import pytest

from spinshift.closed_forms import GOLDEN_PATH, load_golden_table
from spinshift.quadrature import QuadratureConfig


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: peak searches and enhancement scans (minutes)")


@pytest.fixture(scope="session")
def golden_table():
    """50-digit non-dispersive values from the packaged fixture."""
    return load_golden_table(GOLDEN_PATH)


@pytest.fixture
def loose_config():
    return QuadratureConfig(rel_tol=1e-6, abs_tol=1e-10)
