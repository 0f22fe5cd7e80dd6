"""Distance series, peak extraction, scaling fits, and observable means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.signal import find_peaks

from .grid import Field, PhaseSpaceGrid, coherent_state
from .liouville import classical_step
from .maps import ModelParams
from .wigner import quantum_step

#: boundary-mass fraction above which a run is flagged contaminated
BOUNDARY_FLAG_LEVEL = 1e-4


class SeriesParams(NamedTuple):
    K: float
    eta: float
    D: float
    x0: tuple[float, float]


@dataclass(frozen=True)
class DnSeries:
    """Quantum-classical distance, sampled immediately before each kick.

    Entry n holds the distance after n full kick periods.
    """

    params: SeriesParams
    n: np.ndarray
    dn: np.ndarray
    boundary_flag: bool = False

    def __post_init__(self) -> None:
        n = np.asarray(self.n, dtype=np.int64)
        dn = np.asarray(self.dn, dtype=np.float64)
        if n.shape != dn.shape or n.ndim != 1:
            raise ValueError("n and dn must be 1-d arrays of equal length")
        if len(n) > 1 and not np.all(np.diff(n) > 0):
            raise ValueError("kick indices must be strictly increasing")
        if np.any(dn < 0):
            raise ValueError("dn values must be nonnegative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "dn", dn)

    @property
    def values(self) -> list[tuple[int, float]]:
        return list(zip(self.n.tolist(), self.dn.tolist()))


@dataclass(frozen=True)
class ScalingLaw:
    """Separation-time exponents: alpha for regular motion, lam (Lambda) for chaotic."""

    alpha: float
    lam: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be finite and positive")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lam must be finite and positive")


def dn(Wq: Field, Wc: Field) -> float:
    """L1 distance between two fields on the same grid."""
    if Wq.grid != Wc.grid:
        raise ValueError("fields live on different grids")
    return float(np.abs(Wq.values - Wc.values).sum() * Wq.grid.cell_area)


def dn_series(
    x0: tuple[float, float],
    params: ModelParams,
    D: float,
    n_max: int,
    grid: PhaseSpaceGrid,
) -> DnSeries:
    """Run both pipelines from the same coherent state; record dn each period."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    fq = coherent_state(grid, x0, params.eta, kind="quantum")
    fc = coherent_state(grid, x0, params.eta, kind="classical")
    out = np.empty(n_max)
    contaminated = False
    for k in range(n_max):
        fq = quantum_step(fq, params, D)
        fc = classical_step(fc, params, D)
        out[k] = dn(fq, fc)
        if fq.boundary_mass > BOUNDARY_FLAG_LEVEL or fc.boundary_mass > BOUNDARY_FLAG_LEVEL:
            contaminated = True
    return DnSeries(
        params=SeriesParams(params.K, params.eta, D, (float(x0[0]), float(x0[1]))),
        n=np.arange(1, n_max + 1),
        dn=out,
        boundary_flag=contaminated,
    )


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    kernel = np.ones(window)
    sums = np.convolve(values, kernel, mode="same")
    counts = np.convolve(np.ones_like(values), kernel, mode="same")
    return sums / counts


def first_peak(
    s: DnSeries, smooth_window: int = 3, prominence: float = 0.05
) -> tuple[int, float]:
    """First prominent local maximum of the smoothed series.

    Prominence is measured on the smoothed curve and must exceed
    prominence * max(raw series).  Returns (kick index, raw value there).
    """
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise ValueError("smooth_window must be odd and positive")
    if len(s.dn) < 3:
        raise ValueError("series too short for peak extraction")
    smoothed = _moving_average(s.dn, smooth_window)
    threshold = prominence * float(s.dn.max())
    idx, _ = find_peaks(smoothed, prominence=threshold)
    if len(idx) == 0:
        raise ValueError("no peak of sufficient prominence")
    i = int(idx[0])
    return int(s.n[i]), float(s.dn[i])


class CollapseResult(NamedTuple):
    alpha: float
    objective: float
    no_rescaling: bool


#: search interval for the collapse exponent
ALPHA_BOUNDS = (0.1, 3.0)


def collapse_objective(curves: Sequence[DnSeries], alpha: float) -> float:
    """Mean pairwise L2 distance between curves on the rescaled axis n * eta^alpha.

    Pairs are compared on their overlapping rescaled-time support only;
    pairs with no overlap are skipped.
    """
    axes = [c.n * c.params.eta ** alpha for c in curves]
    total, pairs = 0.0, 0
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            lo = max(axes[i][0], axes[j][0])
            hi = min(axes[i][-1], axes[j][-1])
            if hi <= lo:
                continue
            s = np.linspace(lo, hi, 200)
            fi = np.interp(s, axes[i], curves[i].dn)
            fj = np.interp(s, axes[j], curves[j].dn)
            total += float(np.sqrt(np.mean((fi - fj) ** 2)))
            pairs += 1
    if pairs == 0:
        raise ValueError("no pair of curves overlaps on the rescaled axis")
    return total / pairs


def collapse_alpha(curves: Sequence[DnSeries]) -> CollapseResult:
    """Exponent alpha minimizing the pairwise spread of rescaled curves.

    Coarse scan of the bounds then golden-section refinement to 1e-3.
    Flags no_rescaling when the optimum sits at the lower search bound.
    """
    if len(curves) < 2:
        raise ValueError("need at least two curves")
    etas = {c.params.eta for c in curves}
    if len(etas) < 2:
        raise ValueError("curves must span at least two distinct eta values")

    def objective(a: float) -> float:
        # large alpha can push every pair off the shared support; score it
        # as arbitrarily bad instead of aborting the search
        try:
            return collapse_objective(curves, a)
        except ValueError:
            return np.inf

    lo, hi = ALPHA_BOUNDS
    grid = np.linspace(lo, hi, 59)
    vals = [objective(a) for a in grid]
    if not np.isfinite(vals).any():
        raise ValueError("no pair of curves overlaps on the rescaled axis")
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = objective(x1)
    f2 = objective(x2)
    while b - a > 1e-3:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = objective(x2)
    alpha = 0.5 * (a + b)
    best = objective(alpha)
    return CollapseResult(
        alpha=float(alpha),
        objective=float(best),
        no_rescaling=bool(alpha <= lo + 2e-3),
    )


def slope_loglog(
    points: Sequence[tuple[float, float]], chi_range: tuple[float, float]
) -> float:
    """Least-squares slope of log(dn_peak) against log(chi) inside chi_range."""
    lo, hi = chi_range
    sel = [(c, d) for c, d in points if lo <= c <= hi]
    if len(sel) < 3:
        raise ValueError(f"need >= 3 points in chi range, got {len(sel)}")
    x = np.log([c for c, _ in sel])
    y = np.log([d for _, d in sel])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def predicted_ts(law: ScalingLaw, eta: float, tau: float, regime: str) -> float:
    """Separation-time estimate: tau/eta^alpha (regular) or (tau/lam) ln(1/eta)."""
    if not 0 < eta < 1:
        raise ValueError("eta must be in (0, 1)")
    if regime == "regular":
        return tau / eta ** law.alpha
    if regime == "chaotic":
        return (tau / law.lam) * np.log(1.0 / eta)
    raise ValueError(f"unknown regime {regime!r}")


def observable_mean(f: Field, symbol) -> float:
    """Mean of a phase-space symbol: integral of symbol(q, p) * W."""
    if callable(symbol):
        qm, pm = f.grid.meshes()
        sym = np.broadcast_to(np.asarray(symbol(qm, pm), dtype=np.float64), f.values.shape)
    else:
        sym = np.asarray(symbol, dtype=np.float64)
        if sym.shape != f.values.shape:
            raise ValueError("symbol array shape does not match grid")
    return float((sym * f.values).sum() * f.grid.cell_area)


def ripple_period(s: DnSeries, max_lag: int = 20) -> int:
    """Dominant short-scale oscillation period of the series, by autocorrelation.

    Detrends with a moving average wider than the ripple, then returns the
    lag of the first autocorrelation maximum.
    """
    x = s.dn - _moving_average(s.dn, 9)
    x = x - x.mean()
    if np.allclose(x, 0):
        raise ValueError("series has no ripple component")
    n = len(x)
    max_lag = min(max_lag, n - 2)
    ac = np.array([np.dot(x[: n - lag], x[lag:]) for lag in range(max_lag + 1)])
    for lag in range(2, max_lag):
        if ac[lag] >= ac[lag - 1] and ac[lag] > ac[lag + 1]:
            return lag
    raise ValueError("no autocorrelation peak found")
