"""Stroboscopic point map of the kicked harmonic oscillator.

One period is an instantaneous momentum kick p -> p + K sin q followed by
free harmonic rotation through the angle nu*tau.  At nu*tau = pi/3 the
origin changes stability at K = 2/sqrt(3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: resonant rotation angle used throughout (six kicks per oscillator period)
NU_TAU = math.pi / 3.0

#: tolerance separating the parabolic case from elliptic/hyperbolic
PARABOLIC_TOL = 1e-12


@dataclass(frozen=True)
class StabilityClass:
    """Linear stability of a period-1 point, decided by the map trace."""

    kind: str
    trace: float

    @classmethod
    def from_trace(cls, trace: float) -> "StabilityClass":
        if abs(abs(trace) - 2.0) <= PARABOLIC_TOL:
            kind = "parabolic"
        elif abs(trace) < 2.0:
            kind = "elliptic"
        else:
            kind = "hyperbolic"
        return cls(kind=kind, trace=trace)


@dataclass(frozen=True)
class ModelParams:
    """Kick strength K, rotation angle nu_tau, and Lamb-Dicke parameter eta.

    The effective Planck constant of the quantum pipeline is 2*eta^2.
    """

    K: float
    eta: float
    nu_tau: float = NU_TAU

    def __post_init__(self) -> None:
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    @property
    def hbar_eff(self) -> float:
        return 2.0 * self.eta * self.eta


def kick_map(x: tuple[float, float], K: float) -> tuple[float, float]:
    """Instantaneous kick: (q, p) -> (q, p + K sin q)."""
    q, p = x
    return q, p + K * math.sin(q)


def rotate_map(x: tuple[float, float], nu_tau: float = NU_TAU) -> tuple[float, float]:
    """Harmonic rotation: (q, p) -> (q cos + p sin, -q sin + p cos)."""
    q, p = x
    c, s = math.cos(nu_tau), math.sin(nu_tau)
    return c * q + s * p, -s * q + c * p


def strobe_step(x: tuple[float, float], params: ModelParams) -> tuple[float, float]:
    """One full period: kick then rotation."""
    return rotate_map(kick_map(x, params.K), params.nu_tau)


def strobe_jacobian(x: tuple[float, float], K: float, nu_tau: float = NU_TAU) -> np.ndarray:
    """Exact Jacobian of strobe_step at x (unit determinant)."""
    q = x[0]
    c, s = math.cos(nu_tau), math.sin(nu_tau)
    kc = K * math.cos(q)
    # d(strobe)/d(q,p) = R @ [[1, 0], [K cos q, 1]]
    return np.array([[c + s * kc, s], [-s + c * kc, c]])


def classify_origin(K: float, nu_tau: float = NU_TAU) -> StabilityClass:
    """Stability of the origin fixed point.

    The one-kick linearization at the origin has trace
    2 cos(nu_tau) + K sin(nu_tau); |trace| < 2 is elliptic, |trace| > 2
    hyperbolic, equality (within 1e-12) parabolic.
    """
    return StabilityClass.from_trace(origin_trace(K, nu_tau))


def origin_trace(K: float, nu_tau: float = NU_TAU) -> float:
    return 2.0 * math.cos(nu_tau) + K * math.sin(nu_tau)


def critical_K(nu_tau: float = NU_TAU) -> float:
    """Kick strength where the origin turns parabolic, (2 - 2 cos)/sin."""
    return (2.0 - 2.0 * math.cos(nu_tau)) / math.sin(nu_tau)


def poincare_section(
    seeds: np.ndarray, n_iter: int, params: ModelParams
) -> np.ndarray:
    """Orbit points of all seeds, as rows (seed_id, iter, q, p).

    Records iterates k = 1..n_iter (the seed itself is not emitted).
    Unbounded orbits are kept as-is.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=np.float64))
    if seeds.ndim != 2 or seeds.shape[1] != 2:
        raise ValueError("seeds must have shape (n_seeds, 2)")
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    c, s = math.cos(params.nu_tau), math.sin(params.nu_tau)
    n_seeds = seeds.shape[0]
    q = seeds[:, 0].copy()
    p = seeds[:, 1].copy()
    out = np.empty((n_seeds * n_iter, 4))
    out[:, 0] = np.repeat(np.arange(n_seeds, dtype=np.float64), n_iter)
    out[:, 1] = np.tile(np.arange(1, n_iter + 1, dtype=np.float64), n_seeds)
    for k in range(n_iter):
        p = p + params.K * np.sin(q)
        q, p = c * q + s * p, -s * q + c * p
        out[k::n_iter, 2] = q
        out[k::n_iter, 3] = p
    return out


def find_period1_points(
    guess: tuple[float, float],
    params: ModelParams,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> tuple[tuple[float, float], StabilityClass]:
    """Newton search for a fixed point of strobe_step near guess.

    Returns the converged point and its stability from the exact one-period
    Jacobian.  Raises RuntimeError if the residual is still >= tol after
    max_iter iterations.
    """
    x = np.array(guess, dtype=np.float64)
    eye = np.eye(2)
    for _ in range(max_iter):
        fx = np.array(strobe_step((x[0], x[1]), params)) - x
        if np.hypot(fx[0], fx[1]) < tol:
            break
        jac = strobe_jacobian((x[0], x[1]), params.K, params.nu_tau) - eye
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"singular Newton system at guess {guess}") from exc
        x = x + dx
    else:
        raise RuntimeError(f"no convergence after {max_iter} Newton iterations from {guess}")
    tr = float(np.trace(strobe_jacobian((x[0], x[1]), params.K, params.nu_tau)))
    return (float(x[0]), float(x[1])), StabilityClass.from_trace(tr)
