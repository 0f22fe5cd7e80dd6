import numpy as np
import pytest

from khosim.grid import PhaseSpaceGrid, Field, coherent_state, make_grid


def pytest_configure(config):
    # scorecard lines appended by the acceptance tests; printed in one
    # block at the end of the run so they survive output capture
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(3 * np.pi, 256, 0.25)


@pytest.fixture(scope="session")
def grid512():
    return make_grid(3 * np.pi, 512, 0.25)


@pytest.fixture()
def smooth_positive_field(grid256):
    """Deterministic smooth normalized classical field, not a pure Gaussian."""
    rng = np.random.default_rng(42)
    Q, P = grid256.meshes()
    vals = np.zeros((grid256.nq, grid256.np))
    for _ in range(4):
        q0, p0 = rng.uniform(-2.0, 2.0, 2)
        w = rng.uniform(0.3, 0.9)
        vals += rng.uniform(0.2, 1.0) * np.exp(
            -((Q - q0) ** 2 + (P - p0) ** 2) / (2 * w * w)
        )
    vals /= vals.sum() * grid256.cell_area
    return Field(grid=grid256, values=vals, kind="classical")


def l1_distance(a, b):
    assert a.grid == b.grid
    return float(np.abs(a.values - b.values).sum() * a.grid.cell_area)
