"""Brute-force reference implementations, used only by the test suite.

Each oracle reaches the same physics as a production operator through a
deliberately different numerical route: direct oscillatory quadrature of
the kick kernel, a pure-state wavefunction evolution pushed through the
phase-space transform, and Monte Carlo trajectory transport.  None of them
share kernels with the production modules.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, PhaseSpaceGrid
from .maps import NU_TAU

#: largest per-axis node count brute_force_kick accepts
BRUTE_FORCE_MAX_NODES = 256


def brute_force_kick(
    f: Field, K: float, eta: float, mu_cutoff: float, mu_steps: int
) -> Field:
    """Kick via direct trapezoid quadrature of the oscillatory kernel.

    The one-kick kernel in momentum offset dp_off is
    (1/2 pi eta^2) * integral dmu exp(i[K sin(q) sin(mu) - mu*dp_off]/eta^2)
    over mu in [-mu_cutoff, mu_cutoff].  With mu_cutoff = pi * s (s the comb
    step of the grid) the integrand is periodic and the quadrature is
    spectrally exact.
    """
    if f.grid.nq > BRUTE_FORCE_MAX_NODES or f.grid.np > BRUTE_FORCE_MAX_NODES:
        raise ValueError("brute_force_kick is restricted to small grids")
    if mu_steps < 64 * mu_cutoff / (eta * eta):
        raise ValueError(
            f"mu_steps={mu_steps} under-resolves the integrand; "
            f"need >= {64 * mu_cutoff / (eta * eta):.0f}"
        )
    grid = f.grid
    np_ = grid.np
    eta2 = eta * eta
    mu = np.linspace(-mu_cutoff, mu_cutoff, mu_steps + 1)
    w = np.full(mu_steps + 1, mu[1] - mu[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    # offsets r = output index - input index, wrapped
    r = np.arange(np_)
    r[np_ // 2 :] -= np_
    a_col = K * np.sin(grid.q_nodes) / eta2
    # phase matrix over (mu, offset); kernel row per q column via weighted sum
    osc = np.exp(-1j * np.multiply.outer(mu * grid.dp / eta2, r))
    kernels = (np.exp(1j * np.multiply.outer(a_col, np.sin(mu))) * w) @ osc
    kernels = kernels.real * (grid.dp / (2.0 * np.pi * eta2))
    out = np.empty_like(f.values)
    col_idx = (np.arange(np_)[:, None] - np.arange(np_)[None, :]) % np_
    for i in range(grid.nq):
        out[i, :] = kernels[i, col_idx] @ f.values[i, :]
    return f.with_values(out)


def coherent_psi(grid: PhaseSpaceGrid, center: tuple[float, float], eta: float) -> np.ndarray:
    """Normalized coherent-state wavefunction on the q nodes.

    Position width eta (so the phase-space distribution has width eta in
    both axes), momentum boost p0 through the phase exp(i p0 q / 2 eta^2).
    """
    q0, p0 = center
    q = grid.q_nodes
    psi = np.exp(-((q - q0) ** 2) / (4.0 * eta * eta)).astype(np.complex128)
    psi *= np.exp(1j * p0 * q / (2.0 * eta * eta))
    psi /= np.sqrt((np.abs(psi) ** 2).sum() * grid.dq)
    return psi


def wavefunction_wigner(psi: np.ndarray, grid: PhaseSpaceGrid, eta: float) -> Field:
    """Phase-space transform of a pure state sampled on the q nodes.

    W(q_i, p_r) = (dq / 2 pi eta^2) * Re sum_l psi(q_i + l dq)
    conj(psi(q_i - l dq)) exp(-i p_r l dq / eta^2), indices wrapped.
    Exactly unit mass requires np * dp * dq = 2 pi eta^2.
    """
    nq = grid.nq
    if psi.shape != (nq,):
        raise ValueError("psi must be sampled on the q nodes")
    idx = np.arange(nq)
    ls = idx.copy()
    ls[nq // 2 :] -= nq
    corr = psi[(idx[:, None] + ls[None, :]) % nq] * np.conj(
        psi[(idx[:, None] - ls[None, :]) % nq]
    )
    phase = np.exp(-1j * np.multiply.outer(ls * grid.dq / (eta * eta), grid.p_nodes))
    w = (corr @ phase).real * (grid.dq / (2.0 * np.pi * eta * eta))
    return Field(grid=grid, values=w, kind="quantum")


def wavefunction_kick_oracle(
    psi: np.ndarray, grid: PhaseSpaceGrid, K: float, eta: float
) -> Field:
    """Kick applied at the wavefunction level, then transformed.

    The kick is position-diagonal: psi -> exp(-i K cos(q) / 2 eta^2) psi.
    Compare the result against quantum_kick of the pre-kick field.
    """
    kicked = psi * np.exp(-1j * K * np.cos(grid.q_nodes) / (2.0 * eta * eta))
    return wavefunction_wigner(kicked, grid, eta)


def monte_carlo_classical(
    x0: tuple[float, float],
    params,
    D: float,
    n_kicks: int,
    n_samples: int,
    seed: int,
    grid: PhaseSpaceGrid,
) -> Field:
    """Trajectory-ensemble transport histogrammed onto the grid.

    Samples the initial Gaussian of width eta, iterates the kick map and
    rotation, adds per-kick Gaussian noise of variance 2D per axis, and
    normalizes the histogram to unit mass.
    """
    if n_samples < 10**5:
        raise ValueError("n_samples must be at least 1e5")
    rng = np.random.default_rng(seed)
    q = rng.normal(x0[0], params.eta, n_samples)
    p = rng.normal(x0[1], params.eta, n_samples)
    c, s = np.cos(params.nu_tau), np.sin(params.nu_tau)
    sigma = np.sqrt(2.0 * D)
    for _ in range(n_kicks):
        p += params.K * np.sin(q)
        q, p = c * q + s * p, -s * q + c * p
        if D > 0:
            q += rng.normal(0.0, sigma, n_samples)
            p += rng.normal(0.0, sigma, n_samples)
    # bins centered on the grid nodes, matching the sampling convention of
    # coherent_state and the transport operators
    q_edges = np.linspace(grid.q_min - grid.dq / 2, grid.q_max - grid.dq / 2, grid.nq + 1)
    p_edges = np.linspace(grid.p_min - grid.dp / 2, grid.p_max - grid.dp / 2, grid.np + 1)
    hist, _, _ = np.histogram2d(q, p, bins=[q_edges, p_edges])
    hist /= hist.sum() * grid.cell_area
    return Field(grid=grid, values=hist, kind="classical")
