"""Quantum Wigner evolution.

The one-kick propagator is exact on a commensurate grid: it shifts momentum
in integer multiples of eta^2 with Bessel weights J_m(K sin q / eta^2).
Summing that comb under the momentum transform collapses it to a single
phase factor exp(-i a sin(k eta^2)) per mode, which is what quantum_kick
applies.  Rotation is three spectral shears, unitary and grid-exact for
band-limited data.  Negative values are physical here and never clamped.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import irfft, rfft
from scipy.special import airy, jv

from . import _kernels
from .grid import Field, boundary_mass_fraction
from .maps import NU_TAU, ModelParams

#: default tolerance on |sum of weights - 1| when truncating the comb
WEIGHT_TOL = 1e-14

#: truncation order guard
MAX_COMB_ORDER = 10**6


def bessel_kick_weights(
    q: float, K: float, eta: float, tol: float = WEIGHT_TOL
) -> list[tuple[int, float]]:
    """Truncated momentum-comb weights (m, J_m(a)) at a = K sin(q)/eta^2.

    The order M is the smallest with the weight sum within tol of 1
    (sum over all m is exactly 1); weights are then renormalized so their
    sum is 1.  Raises if M would exceed 10^6.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = K * np.sin(q) / (eta * eta)
    if a == 0.0:
        return [(0, 1.0)]
    # start near the classical turning point, then grow until converged
    abs_a = abs(a)
    M = int(abs_a + 12.0 * abs_a ** (1.0 / 3.0) + 12.0)
    while True:
        if M > MAX_COMB_ORDER:
            raise ValueError(f"comb truncation order exceeds {MAX_COMB_ORDER}")
        ms = np.arange(-M, M + 1)
        w = jv(ms, a)
        total = w.sum()
        if abs(total - 1.0) <= tol:
            break
        M *= 2
    w /= total
    return [(int(m), float(wm)) for m, wm in zip(ms, w)]


def quantum_kick(f: Field, K: float, eta: float) -> Field:
    """Exact kick: out(q, p) = sum_m J_m(K sin q / eta^2) in(q, p - m eta^2).

    Applied as a phase multiplier on the momentum transform, which sums the
    full wrapped comb with no truncation.  Mass is conserved identically
    (the k = 0 mode is untouched).
    """
    if f.kind != "quantum":
        raise ValueError("quantum_kick expects a quantum field")
    grid = f.grid
    grid.comb_step(eta)  # raises if dp does not divide eta^2
    a_col = K * np.sin(grid.q_nodes) / (eta * eta)
    kp = _kernels.wavenumbers(grid.np, grid.dp)
    sin_k = np.sin(kp * eta * eta)
    spec = rfft(f.values, axis=1)
    block = _kernels._BLOCK
    for lo in range(0, grid.nq, block):
        sl = slice(lo, lo + block)
        spec[sl, :] *= np.exp(-1j * np.multiply.outer(a_col[sl], sin_k))
    out = irfft(spec, n=grid.np, axis=1)
    return f.with_values(out, boundary_mass=boundary_mass_fraction(out))


def quantum_rotate(f: Field, nu_tau: float = NU_TAU) -> Field:
    """Rotation by nu_tau via three spectral shears; preserves integrals."""
    if f.kind != "quantum":
        raise ValueError("quantum_rotate expects a quantum field")
    out = _kernels.spectral_rotate(f.values, f.grid, nu_tau)
    return f.with_values(out)


def quantum_step(f: Field, params: ModelParams, D: float = 0.0) -> Field:
    """One full kick period: kick, rotate, diffuse.  Increments kick_index."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    k = quantum_kick(f, params.K, params.eta)
    values = _kernels.spectral_rotate(k.values, f.grid, params.nu_tau)
    if D > 0.0:
        values = _kernels.gaussian_blur_spectral(values, f.grid, 2.0 * D)
    return f.with_values(
        values,
        kick_index=f.kick_index + 1,
        boundary_mass=boundary_mass_fraction(values),
    )


def airy_kick(f: Field, K: float, eta: float) -> Field:
    """Semiclassical kick: per-column Airy kernel instead of the Bessel comb.

    The kernel |b|^(-1/3) Ai(-sign(b)|b|^(-1/3)(p' - p + K sin q)) with
    b = (eta^4 K / 2) sin q is the uniform asymptotic form of the comb.
    Columns with sin q = 0 (or a kernel too narrow for the grid) fall back
    to the classical shift.
    """
    if f.kind != "quantum":
        raise ValueError("airy_kick expects a quantum field")
    grid = f.grid
    np_ = grid.np
    dp = grid.dp
    sin_q = np.sin(grid.q_nodes)
    b_col = 0.5 * eta ** 4 * K * sin_q
    # offsets r = (output index - input index), wrapped to the periodic column
    r = np.arange(np_)
    r[np_ // 2 :] -= np_
    out = np.empty_like(f.values)
    spec_in = rfft(f.values, axis=1)
    for i in range(grid.nq):
        b = b_col[i]
        shift = K * sin_q[i]
        if b == 0.0:
            out[i, :] = f.values[i, :]
            continue
        scale = abs(b) ** (-1.0 / 3.0)
        if scale * dp > 2.0:
            # Airy width below the grid spacing (also catches sin q at the
            # 1e-16 floor, where huge arguments would NaN out scipy's Ai):
            # nearest-node classical shift
            out[i, :] = np.roll(f.values[i, :], round(shift / dp))
            continue
        kernel = dp * scale * airy(np.sign(b) * scale * (r * dp - shift))[0]
        peak = np.max(np.abs(kernel))
        if peak > 0.0:
            kernel[np.abs(kernel) < 1e-12 * peak] = 0.0
        total = kernel.sum()
        if peak == 0.0 or abs(total) < 1e-6:
            out[i, :] = np.roll(f.values[i, :], round(shift / dp))
            continue
        kernel /= total
        out[i, :] = irfft(spec_in[i, :] * rfft(kernel), n=np_)
    return f.with_values(out, boundary_mass=boundary_mass_fraction(out))
