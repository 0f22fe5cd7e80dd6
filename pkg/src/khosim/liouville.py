"""Classical Liouville transport on the grid.

One kick period moves the distribution with the exact backward map: a
momentum shear from the kick, a rigid rotation from the harmonic stretch,
then optional reservoir smoothing.  Advection samples the backward image
with a monotone cubic so no negative lobes appear; rotation uses bicubic
splines and clamps the small undershoot away.  This pipeline deliberately
shares no transform machinery with the quantum one beyond the diffusion
multiplier, so the two act as independent cross-checks.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .grid import Field, boundary_mass_fraction
from .maps import NU_TAU, ModelParams


def classical_kick_advect(f: Field, K: float) -> Field:
    """Backward semi-Lagrangian kick: out(q, p) = in(q, p - K sin q).

    Values are clamped to >= 0 and mass is renormalized; the factor applied
    is recorded on the result.
    """
    if f.kind != "classical":
        raise ValueError("classical_kick_advect expects a classical field")
    grid = f.grid
    shifts = K * np.sin(grid.q_nodes)
    out = _kernels.shift_p_columns_monotone(f.values, shifts, grid.dp)
    np.maximum(out, 0.0, out=out)
    mass_in = float(f.values.sum())
    mass_out = float(out.sum())
    factor = 1.0 if mass_out == 0.0 else mass_in / mass_out
    out *= factor
    return f.with_values(out, renorm_factor=factor)


def classical_rotate(f: Field, nu_tau: float = NU_TAU) -> Field:
    """Rigid rotation via bicubic resampling at the backward-rotated nodes.

    Out-of-domain backward samples read 0.  Clamped to >= 0; the relative
    mass drift (not renormalized away) is recorded.
    """
    if f.kind != "classical":
        raise ValueError("classical_rotate expects a classical field")
    out = _kernels.bicubic_rotate(f.values, f.grid, nu_tau)
    np.maximum(out, 0.0, out=out)
    mass_in = float(f.values.sum())
    mass_out = float(out.sum())
    drift = 0.0 if mass_in == 0.0 else mass_out / mass_in - 1.0
    return f.with_values(out, mass_drift=drift)


def classical_step(f: Field, params: ModelParams, D: float = 0.0) -> Field:
    """One full kick period: advect, rotate, diffuse.

    With D > 0 the result is a Gaussian of variance 2D per axis smeared
    around the classical image.  Increments kick_index and refreshes the
    boundary-mass monitor.
    """
    if D < 0:
        raise ValueError("D must be nonnegative")
    a = classical_kick_advect(f, params.K)
    r = classical_rotate(a, params.nu_tau)
    values = r.values
    if D > 0.0:
        values = _kernels.gaussian_blur_spectral(values, f.grid, 2.0 * D)
        np.maximum(values, 0.0, out=values)
    return r.with_values(
        values,
        kick_index=f.kick_index + 1,
        renorm_factor=a.renorm_factor,
        mass_drift=r.mass_drift,
        boundary_mass=boundary_mass_fraction(values),
    )
