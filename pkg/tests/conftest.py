import numpy as np
import pytest

from kickrec.grid import RotorParams, gaussian_state, make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid(4096, 64)


@pytest.fixture(scope="session")
def params():
    return RotorParams(K=14.0, kbar=15.0, sigma=0.1)


@pytest.fixture(scope="session")
def phi0(grid):
    return gaussian_state(grid, 0.1)


def random_state(grid, rng, width=3.0):
    """Random smooth-ish normalised state concentrated well inside the window."""
    from kickrec.grid import WaveFunction
    env = np.exp(-grid.rho ** 2 / (2 * width ** 2))
    amps = env * (rng.standard_normal(grid.num_points) + 1j * rng.standard_normal(grid.num_points))
    return WaveFunction(grid, amps).normalized()


ACCEPTANCE_LINES = []


def record_acceptance(criterion, passed, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  [{criterion}] {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
