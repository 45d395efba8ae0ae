"""
Pytest configuration and fixtures for dispersive lab tests.
"""
import pytest
import sys
import os

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
from click.testing import CliRunner

from app import create_app
from config import TestingConfig
from core.fields import random_banded_field
from models.grid import Grid


@pytest.fixture(scope='session')
def app():
    """Create the command group for testing."""
    return create_app(TestingConfig)


@pytest.fixture(scope='function')
def runner():
    """Create CLI test runner."""
    return CliRunner()


@pytest.fixture(scope='function')
def output_dir(tmp_path):
    """Artifact directory for one command run."""
    return str(tmp_path / 'artifacts')


@pytest.fixture(scope='function')
def grid():
    """Default one-dimensional grid: N = 512 on a period of 64."""
    return Grid(1, 512, 64.0)


@pytest.fixture(scope='function')
def rng():
    """Seeded generator for reproducible random fields."""
    return np.random.default_rng(TestingConfig.SEED)


@pytest.fixture(scope='function')
def banded_field(grid, rng):
    """Random field projected onto the band lambda = 4."""
    return random_banded_field(grid, rng, band=4.0)
