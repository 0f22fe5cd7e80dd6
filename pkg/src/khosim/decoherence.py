"""Reservoir diffusion and the first-order quantum-correction machinery.

A purely diffusive reservoir smears phase space with a Gaussian of variance
2D per axis each kick period.  The leading quantum deviation from the
classical evolution enters through one signed insertion per kick: multiply
by sin q, transport through the kick, convolve momentum with the odd kernel
f(-dp/2 sqrt D) exp(-dp^2/4D) / (2 sqrt(pi D)) where f(y) = (y - 2y^3/3)/4,
smooth q with the plain Gaussian, rotate.  Summing the propagated
insertions and scaling by chi = K eta^4 / D^(3/2) predicts the
quantum-classical distance while chi stays below about 1.

The perturbative lineage keeps fields signed: no clamping and no
renormalization, since the correction terms integrate to zero exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Field, PhaseSpaceGrid
from .maps import NU_TAU, ModelParams


@dataclass(frozen=True)
class ReservoirParams:
    """Per-kick-period diffusion constant of the reservoir."""

    D: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.D) or self.D < 0:
            raise ValueError("D must be finite and nonnegative")


def diffuse(f: Field, D: float) -> Field:
    """Isotropic Gaussian smoothing, variance 2D per axis; D = 0 is identity."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    if D == 0.0:
        return f
    out = _kernels.gaussian_blur_spectral(f.values, f.grid, 2.0 * D)
    return f.with_values(out)


def chi(K: float, eta: float, D: float) -> float:
    """The control parameter K eta^4 / D^(3/2)."""
    if D <= 0:
        raise ValueError("chi requires D > 0")
    return K * eta ** 4 / D ** 1.5


def f_factor(y):
    """The odd insertion polynomial (y - 2 y^3 / 3) / 4."""
    y = np.asarray(y, dtype=np.float64)
    out = 0.25 * (y - (2.0 / 3.0) * y ** 3)
    return float(out) if out.ndim == 0 else out


def _signed_step(values: np.ndarray, grid: PhaseSpaceGrid, K: float, D: float, nu_tau: float) -> np.ndarray:
    """One linear classical period with no clamp and no renormalization."""
    shifts = K * np.sin(grid.q_nodes)
    out = _kernels.shift_p_columns_monotone(values, shifts, grid.dp)
    out = _kernels.bicubic_rotate(out, grid, nu_tau)
    if D > 0.0:
        out = _kernels.gaussian_blur_spectral(out, grid, 2.0 * D)
    return out


def insertion_step(f: Field, K: float, D: float, nu_tau: float = NU_TAU) -> Field:
    """One kick period with the signed first-order insertion inside.

    Output is a signed field integrating to zero (the momentum kernel is
    odd, so its transform vanishes at k = 0).
    """
    if D <= 0:
        raise ValueError("insertion_step requires D > 0")
    if f.kind != "classical":
        raise ValueError("insertion_step expects the classical lineage")
    grid = f.grid
    sin_q = np.sin(grid.q_nodes)
    out = f.values * sin_q[:, None]
    out = _kernels.shift_p_columns_monotone(out, K * sin_q, grid.dp)
    out = _kernels.insertion_blur_spectral(out, grid, D)
    out = _kernels.bicubic_rotate(out, grid, nu_tau)
    return f.with_values(out)


def gj_sum(W0: Field, n: int, params: ModelParams, D: float) -> Field:
    """Accumulated first-order correction with insertions at kicks 0..n.

    Forward recurrence over n+1 kick periods: B <- step(B) + insertion(A),
    A <- step(A), starting from A = W0, B = 0.  The result is signed and
    integrates to zero.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if D <= 0:
        raise ValueError("gj_sum requires D > 0")
    grid = W0.grid
    A = np.array(W0.values, dtype=np.float64)
    B = np.zeros_like(A)
    for _ in range(n + 1):
        B = _signed_step(B, grid, params.K, D, params.nu_tau)
        B += insertion_step(W0.with_values(A), params.K, D, params.nu_tau).values
        A = _signed_step(A, grid, params.K, D, params.nu_tau)
    return W0.with_values(B, kick_index=W0.kick_index + n + 1)


def dn_perturbative(W0: Field, n_max: int, params: ModelParams, D: float) -> np.ndarray:
    """Predicted quantum-classical distance series, entries n = 1..n_max.

    Entry n is chi * integral |B_n| with B_n the correction accumulated
    over the first n kick periods, i.e. the distance immediately before
    kick n+1, matching the full-pipeline series convention.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if D <= 0:
        raise ValueError("dn_perturbative requires D > 0")
    grid = W0.grid
    c = chi(params.K, params.eta, D)
    A = np.array(W0.values, dtype=np.float64)
    B = np.zeros_like(A)
    out = np.empty(n_max)
    for k in range(n_max):
        B = _signed_step(B, grid, params.K, D, params.nu_tau)
        B += insertion_step(W0.with_values(A), params.K, D, params.nu_tau).values
        A = _signed_step(A, grid, params.K, D, params.nu_tau)
        out[k] = c * np.abs(B).sum() * grid.cell_area
    return out
