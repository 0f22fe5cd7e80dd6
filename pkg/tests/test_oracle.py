"""Cross-checks between the production kernels and the brute-force oracles."""

import numpy as np
import pytest

from khosim.grid import Field, coherent_state, make_grid
from khosim.maps import ModelParams, strobe_step
from khosim.metrics import observable_mean
from khosim.oracle import (
    brute_force_kick,
    coherent_psi,
    monte_carlo_classical,
    wavefunction_kick_oracle,
    wavefunction_wigner,
)
from khosim.wigner import quantum_kick


def l1(a, b):
    return float(np.abs(a.values - b.values).sum() * a.grid.cell_area)


# closure np*dp*dq = 2*pi*eta^2 holds on this grid, so the wavefunction
# transform is exactly unit-mass and alias-free
@pytest.fixture(scope="module")
def grid_closed():
    return make_grid(2 * np.pi, 256, 0.25)


class TestBruteForceKick:
    def test_k_zero_identity(self):
        grid = make_grid(3 * np.pi, 128, 0.25)
        f = coherent_state(grid, (0.0, 1.1), 0.25, kind="quantum")
        g = brute_force_kick(f, 0.0, 0.25, np.pi, 4096)
        assert l1(g, f) <= 1e-10

    def test_q_zero_column_unchanged(self):
        grid = make_grid(3 * np.pi, 128, 0.25)
        f = coherent_state(grid, (0.0, 1.1), 0.25, kind="quantum")
        g = brute_force_kick(f, 0.5, 0.25, np.pi, 4096)
        j = int(np.argmin(np.abs(grid.q_nodes)))
        assert grid.q_nodes[j] == 0.0
        assert np.max(np.abs(g.values[j, :] - f.values[j, :])) <= 1e-12

    def test_agrees_with_production_kick(self):
        grid = make_grid(3 * np.pi, 128, 0.25)
        f = coherent_state(grid, (0.0, 1.1), 0.25, kind="quantum")
        a = brute_force_kick(f, 0.5, 0.25, np.pi, 4096)
        b = quantum_kick(f, 0.5, 0.25)
        assert l1(a, b) <= 1e-8

    def test_resolution_guard(self):
        grid = make_grid(3 * np.pi, 128, 0.25)
        f = coherent_state(grid, (0.0, 1.1), 0.25, kind="quantum")
        with pytest.raises(ValueError, match="under-resolves"):
            brute_force_kick(f, 0.5, 0.25, np.pi, 100)

    def test_large_grid_rejected(self, grid512):
        f = coherent_state(grid512, (0.0, 1.1), 0.25, kind="quantum")
        with pytest.raises(ValueError, match="small grids"):
            brute_force_kick(f, 0.5, 0.25, np.pi, 4096)


class TestWavefunctionOracle:
    def test_wigner_unit_mass(self, grid_closed):
        psi = coherent_psi(grid_closed, (0.0, 1.1), 0.25)
        w = wavefunction_wigner(psi, grid_closed, 0.25)
        mass = w.values.sum() * grid_closed.cell_area
        assert abs(mass - 1.0) <= 1e-12

    def test_k_zero_wigner_unchanged(self, grid_closed):
        psi = coherent_psi(grid_closed, (0.0, 0.0), 0.25)
        before = wavefunction_wigner(psi, grid_closed, 0.25)
        after = wavefunction_kick_oracle(psi, grid_closed, 0.0, 0.25)
        assert l1(after, before) <= 1e-14

    def test_matches_production_kick(self, grid_closed):
        psi = coherent_psi(grid_closed, (0.0, 1.1), 0.25)
        before = wavefunction_wigner(psi, grid_closed, 0.25)
        a = wavefunction_kick_oracle(psi, grid_closed, 0.5, 0.25)
        b = quantum_kick(before, 0.5, 0.25)
        assert l1(a, b) <= 1e-10

    def test_wrong_sampling_rejected(self, grid_closed):
        with pytest.raises(ValueError):
            wavefunction_wigner(np.ones(17, dtype=complex), grid_closed, 0.25)


class TestMonteCarlo:
    def test_deterministic_given_seed(self, grid256):
        params = ModelParams(K=0.5, eta=0.25)
        a = monte_carlo_classical((0.0, 1.1), params, 0.01, 3, 10**5, 5, grid256)
        b = monte_carlo_classical((0.0, 1.1), params, 0.01, 3, 10**5, 5, grid256)
        assert np.array_equal(a.values, b.values)

    def test_rotated_mean(self, grid256):
        params = ModelParams(K=0.0, eta=0.25)
        n = 10**6
        mc = monte_carlo_classical((0.0, 1.1), params, 0.0, 1, n, 11, grid256)
        tol = 3 * 0.25 / np.sqrt(n)
        q1, p1 = strobe_step((0.0, 1.1), params)
        assert abs(observable_mean(mc, lambda q, p: q) - q1) <= tol
        assert abs(observable_mean(mc, lambda q, p: p) - p1) <= tol

    def test_too_few_samples_rejected(self, grid256):
        params = ModelParams(K=0.5, eta=0.25)
        with pytest.raises(ValueError, match="1e5"):
            monte_carlo_classical((0.0, 1.1), params, 0.0, 1, 10**4, 0, grid256)
