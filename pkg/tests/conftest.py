import math

import numpy as np
import pytest

from cosserat_pattern import BoundarySpec, Grid2D, MaterialParams
from cosserat_pattern import solver

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture(scope="session")
def double_well_params():
    return MaterialParams(lam=1.0, mu=1.0, mu_c=12.0, mu2=1.0, rho=1.0, sigma_y=1.0)


@pytest.fixture(scope="session")
def branch_params():
    return MaterialParams(lam=1.0, mu=1.0, mu_c=6.0)


@pytest.fixture(scope="session")
def tl1_bc():
    """0 on left and bottom, pi on right and top."""
    return BoundarySpec.sides(left=0.0, right=math.pi, bottom=0.0, top=math.pi)


@pytest.fixture(scope="session")
def tl1_grid():
    return Grid2D(128, 128)


@pytest.fixture(scope="session")
def tl1_start(tl1_grid, tl1_bc):
    return solver.solve_harmonic(tl1_grid, tl1_bc)


def _run(start, bc, mu2, **kw):
    p = MaterialParams(1.0, 1.0, 12.0, mu2)
    return solver.evolve_to_stationary(start, p, bc, None, solver.EvolveConfig(**kw))


@pytest.fixture(scope="session")
def tl1_run(tl1_start, tl1_bc):
    """Explicit flow at mu2 = 1e-3 with the energy recorded every step."""
    import time
    t0 = time.perf_counter()
    f, d = _run(tl1_start, tl1_bc, 1e-3, record_every=1)
    return f, d, time.perf_counter() - t0


@pytest.fixture(scope="session")
def tl1_run_4mu2(tl1_start, tl1_bc):
    import time
    t0 = time.perf_counter()
    f, d = _run(tl1_start, tl1_bc, 4e-3)
    return f, d, time.perf_counter() - t0


@pytest.fixture(scope="session")
def tl1_run_semi(tl1_start, tl1_bc):
    import time
    t0 = time.perf_counter()
    f, d = _run(tl1_start, tl1_bc, 1e-3, scheme="semi_implicit")
    return f, d, time.perf_counter() - t0
