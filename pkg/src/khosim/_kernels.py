"""Low-level numerical kernels shared by the Liouville and reservoir operators.

Transform-based pieces (spectral shifts, Gaussian multipliers) assume the
periodic wrap of the grid; interpolation pieces (monotone cubic columns,
bicubic rotation sampling) read out-of-domain points as zero where noted.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from scipy.fft import irfft, irfft2, rfft, rfft2, rfftfreq, fftfreq

from .grid import PhaseSpaceGrid

#: row-block size for building per-line phase multipliers without large temporaries
_BLOCK = 256

#: cache rotation sample coordinates for grids up to this many cells
_COORD_CACHE_MAX_CELLS = 12_000_000

_coord_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def wavenumbers(n: int, d: float, real: bool = True) -> np.ndarray:
    """Angular wavenumbers matching scipy.fft conventions."""
    if real:
        return 2.0 * np.pi * rfftfreq(n, d)
    return 2.0 * np.pi * fftfreq(n, d)


def fft_shift_axis(values: np.ndarray, delta: np.ndarray | float, axis: int, d: float) -> np.ndarray:
    """Spectral translation out(x) = in(x - delta) along one axis.

    delta may be a scalar or a per-line array indexed by the other axis.
    Exact for band-limited periodic data; content crossing the domain edge
    wraps around.
    """
    n = values.shape[axis]
    k = wavenumbers(n, d)
    spec = rfft(values, axis=axis)
    if np.isscalar(delta) or np.ndim(delta) == 0:
        phase = np.exp(-1j * k * float(delta))
        spec *= phase[:, None] if axis == 0 else phase[None, :]
    elif axis == 0:
        delta = np.asarray(delta, dtype=np.float64)
        for lo in range(0, spec.shape[1], _BLOCK):
            sl = slice(lo, lo + _BLOCK)
            spec[:, sl] *= np.exp(-1j * np.multiply.outer(k, delta[sl]))
    else:
        delta = np.asarray(delta, dtype=np.float64)
        for lo in range(0, spec.shape[0], _BLOCK):
            sl = slice(lo, lo + _BLOCK)
            spec[sl, :] *= np.exp(-1j * np.multiply.outer(delta[sl], k))
    return irfft(spec, n=n, axis=axis)


def spectral_rotate(values: np.ndarray, grid: PhaseSpaceGrid, angle: float) -> np.ndarray:
    """Rotate a field by three spectral shears: out(x) = in(R^{-1} x).

    R maps (q, p) to (q cos + p sin, -q sin + p cos); the decomposition is
    shear_q(tan(angle/2)), shear_p(-sin angle), shear_q(tan(angle/2)).
    """
    t = np.tan(0.5 * angle)
    s = np.sin(angle)
    out = fft_shift_axis(values, t * grid.p_nodes, axis=0, d=grid.dq)
    out = fft_shift_axis(out, -s * grid.q_nodes, axis=1, d=grid.dp)
    out = fft_shift_axis(out, t * grid.p_nodes, axis=0, d=grid.dq)
    return out


def gaussian_blur_spectral(values: np.ndarray, grid: PhaseSpaceGrid, var_axis: float) -> np.ndarray:
    """Periodic isotropic Gaussian convolution with the given per-axis variance."""
    if var_axis == 0.0:
        return values.copy()
    half = 0.5 * var_axis
    kq = wavenumbers(grid.nq, grid.dq, real=False)
    kp = wavenumbers(grid.np, grid.dp)
    mult = np.exp(-half * kq * kq)[:, None] * np.exp(-half * kp * kp)[None, :]
    return irfft2(rfft2(values) * mult, s=values.shape)


def signed_p_multiplier(grid: PhaseSpaceGrid, D: float) -> np.ndarray:
    """rfft-domain transform of the odd reservoir insertion kernel along p.

    Real-space kernel f(-x/(2 sqrt D)) exp(-x^2/(4D)) / (2 sqrt(pi D)) with
    f(y) = (y - 2 y^3/3)/4; its continuous transform is
    i D^{3/2} k^3 exp(-D k^2) / 6.
    """
    kp = wavenumbers(grid.np, grid.dp)
    return 1j * (D ** 1.5 / 6.0) * kp ** 3 * np.exp(-D * kp * kp)


def insertion_blur_spectral(values: np.ndarray, grid: PhaseSpaceGrid, D: float) -> np.ndarray:
    """Signed kernel convolution along p and plain Gaussian (variance 2D) along q."""
    kq = wavenumbers(grid.nq, grid.dq, real=False)
    mult = np.exp(-D * kq * kq)[:, None] * signed_p_multiplier(grid, D)[None, :]
    return irfft2(rfft2(values) * mult, s=values.shape)


def shift_p_columns_monotone(
    values: np.ndarray, shifts: np.ndarray, dp: float
) -> np.ndarray:
    """Shift each q-line along p by its own constant offset, periodic wrap.

    Semi-Lagrangian readout with Fritsch-Butland monotone cubic Hermite
    interpolation: no new extrema are created, so nonnegative input stays
    nonnegative up to roundoff.
    """
    nq, np_ = values.shape
    c = np.asarray(shifts, dtype=np.float64) / dp
    m_int = np.floor(-c).astype(np.int32)
    u = (-c - m_int)[:, None]

    # slopes and monotone derivative estimates on the periodic columns
    d = np.roll(values, -1, axis=1) - values
    d_prev = np.roll(d, 1, axis=1)
    prod = d_prev * d
    denom = d_prev + d
    with np.errstate(divide="ignore", invalid="ignore"):
        md = np.where(prod > 0.0, 2.0 * prod / denom, 0.0)
    del d, d_prev, prod, denom

    j = np.arange(np_, dtype=np.int32)[None, :]
    idx = (j + m_int[:, None]) % np.int32(np_)
    idx1 = idx + np.int32(1)
    idx1[idx1 == np_] = 0

    vb = np.take_along_axis(values, idx, axis=1)
    vb1 = np.take_along_axis(values, idx1, axis=1)
    del idx1
    mb = np.take_along_axis(md, idx, axis=1)
    idx += np.int32(1)
    idx[idx == np_] = 0
    mb1 = np.take_along_axis(md, idx, axis=1)
    del idx, md

    one_m = 1.0 - u
    h00 = (1.0 + 2.0 * u) * one_m * one_m
    h10 = u * one_m * one_m
    h01 = u * u * (3.0 - 2.0 * u)
    h11 = u * u * (u - 1.0)
    return h00 * vb + h10 * mb + h01 * vb1 + h11 * mb1


def _rotation_coords(grid: PhaseSpaceGrid, angle: float) -> tuple[np.ndarray, np.ndarray]:
    key = (grid, round(float(angle), 15))
    hit = _coord_cache.get(key)
    if hit is not None:
        return hit
    c, s = np.cos(angle), np.sin(angle)
    qm, pm = grid.meshes()
    qs = c * qm - s * pm
    ps = s * qm + c * pm
    iq = (qs - grid.q_min) / grid.dq
    ip = (ps - grid.p_min) / grid.dp
    iq = np.ascontiguousarray(np.broadcast_to(iq, (grid.nq, grid.np)))
    ip = np.ascontiguousarray(np.broadcast_to(ip, (grid.nq, grid.np)))
    if grid.nq * grid.np <= _COORD_CACHE_MAX_CELLS:
        if len(_coord_cache) >= 3:
            _coord_cache.pop(next(iter(_coord_cache)))
        _coord_cache[key] = (iq, ip)
    return iq, ip


def bicubic_rotate(values: np.ndarray, grid: PhaseSpaceGrid, angle: float) -> np.ndarray:
    """Rotate by resampling at R^{-1} x with bicubic splines; outside reads 0."""
    iq, ip = _rotation_coords(grid, angle)
    return ndimage.map_coordinates(
        values, [iq, ip], order=3, mode="constant", cval=0.0, prefilter=True
    )
