import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from varsmooth import Grid, SampledFunction, SmoothnessFunction, VariableExponent

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def grid512():
    return Grid(1, 512)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def const_exp(value, grid):
    return VariableExponent.constant(value, grid.shape, grid.period)


def const_s(value, grid):
    return SmoothnessFunction.constant(value, grid.shape, grid.period)


def trig_poly(grid, rng, degree=12):
    """Random real trigonometric polynomial of the given degree."""
    x = grid.coordinates()
    out = np.zeros(grid.shape)
    for k in range(degree + 1):
        phase = rng.uniform(0, 2 * math.pi)
        out += rng.standard_normal() * np.cos(k * x[0] + phase)
    return SampledFunction(grid, out)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
