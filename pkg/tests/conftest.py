import math

import numpy as np
import pytest

from hartree_wkb.config import scenario_a
from hartree_wkb.harness import run_sweep
from hartree_wkb.spectral_core import GridSpec, make_grid
from hartree_wkb.wkb_builder import GaussianProfile, Mode, ModeSpec

ACCEPTANCE_LINES: list[str] = []

_SWEEPS = {}


def scenario_sweep(alpha, variant="standard", **changes):
    """Scenario A sweeps are shared across test modules."""
    key = (alpha, variant, tuple(sorted(changes.items())))
    if key not in _SWEEPS:
        _SWEEPS[key] = run_sweep(scenario_a(alpha, variant, **changes))
    return _SWEEPS[key]


@pytest.fixture
def acceptance_line():
    def add(number, passed, text):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}")
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def scenario_modes():
    return scenario_a().modes


@pytest.fixture(scope="session")
def scenario_grid_16():
    """Resolution-rule grid for eps = 1/16."""
    return scenario_a().grid_for(1 / 16)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def gaussian_mode(k, center=0.0, width=1.0, weight=1.0):
    return Mode((float(k),), GaussianProfile((float(center),), width, weight))


def line_grid(n, length=32 * math.pi):
    return make_grid(GridSpec(1, n, length))


def single_mode(k=0.0, **kw):
    return ModeSpec((gaussian_mode(k, **kw),))
