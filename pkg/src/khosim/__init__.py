"""Quantum vs classical phase-space evolution of the kicked harmonic oscillator."""

from .grid import (
    Field,
    PhaseSpaceGrid,
    coherent_state,
    integrate,
    load_snapshot,
    make_grid,
    make_grid_rect,
    save_snapshot,
)
from .maps import NU_TAU, ModelParams, StabilityClass, classify_origin, critical_K
from .decoherence import ReservoirParams, chi, diffuse

__all__ = [
    "Field",
    "PhaseSpaceGrid",
    "coherent_state",
    "integrate",
    "load_snapshot",
    "make_grid",
    "make_grid_rect",
    "save_snapshot",
    "NU_TAU",
    "ModelParams",
    "StabilityClass",
    "classify_origin",
    "critical_K",
    "ReservoirParams",
    "chi",
    "diffuse",
]
