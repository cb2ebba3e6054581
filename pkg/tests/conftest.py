"""Shared fixtures: the benchmark parameter set and coarse test grids."""

import math

import pytest

from evodom import EvolutionRate, ModelParams, PulseFunction
from evodom.engine import Grid


@pytest.fixture(scope="session")
def params():
    """The benchmark coefficient set used across the scenario suite."""
    return ModelParams(d=1.0, alpha=1.1, gamma=0.05, l0=math.pi, T=2.0)


@pytest.fixture(scope="session")
def rho_shrink(params):
    """Evolution rate dipping below 1 (amplitude -0.1)."""
    return EvolutionRate.exp_cosine(-0.1, params.T)


@pytest.fixture(scope="session")
def rho_grow(params):
    """Evolution rate rising above 1 (amplitude +0.1)."""
    return EvolutionRate.exp_cosine(+0.1, params.T)


@pytest.fixture(scope="session")
def rho_const(params):
    return EvolutionRate.constant(params.T)


@pytest.fixture(scope="session")
def bh(params):
    return PulseFunction.beverton_holt(10.0, 8.0)


@pytest.fixture(scope="session")
def ricker12():
    return PulseFunction.ricker(0.05, 1.2)


@pytest.fixture(scope="session")
def ricker5():
    return PulseFunction.ricker(0.05, 5.0)


@pytest.fixture(scope="session")
def identity():
    return PulseFunction.identity()


@pytest.fixture(scope="session")
def coarse_grid(params):
    """Small grid for tests whose claims are resolution-independent."""
    return Grid.for_model(params, ny=63, steps_per_period=256)
