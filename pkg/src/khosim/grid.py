"""Shared phase-space grid, distribution fields, and snapshot I/O.

Both evolution pipelines (quantum Wigner, classical Liouville) operate on the
same uniform rectangular grid.  Momentum spacing is tied to the effective
Planck cell: the quantum kick shifts momentum in exact multiples of eta^2, so
dp must divide eta^2 for those shifts to land on grid nodes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

SNAPSHOT_MAGIC = b"KHOW"
SNAPSHOT_VERSION = 2

#: maximum allowed eta^2 / dp ratio before make_grid refuses
MAX_COMB_RATIO = 10**6

#: number of border cells inspected by the boundary-mass monitor
BOUNDARY_CELLS = 5


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform rectangular grid on [q_min, q_max) x [p_min, p_max).

    Nodes sit at q_min + i*dq and p_min + j*dp; the upper edges are
    identified with the lower ones under the periodic wrap used by the
    transform-based operators.  Both domains are symmetric about 0 and
    both node counts are even.
    """

    nq: int
    np: int
    q_min: float
    q_max: float
    p_min: float
    p_max: float

    def __post_init__(self) -> None:
        if self.nq <= 0 or self.np <= 0 or self.nq % 2 or self.np % 2:
            raise ValueError("node counts must be positive and even")
        if not (self.q_min < self.q_max and self.p_min < self.p_max):
            raise ValueError("empty grid domain")
        if abs(self.q_min + self.q_max) > 1e-12 * (self.q_max - self.q_min):
            raise ValueError("q domain must be symmetric about 0")
        if abs(self.p_min + self.p_max) > 1e-12 * (self.p_max - self.p_min):
            raise ValueError("p domain must be symmetric about 0")

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.nq

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.np

    @property
    def cell_area(self) -> float:
        return self.dq * self.dp

    @cached_property
    def q_nodes(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.nq)

    @cached_property
    def p_nodes(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.np)

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable (Q, P) coordinate arrays, q along axis 0."""
        return self.q_nodes[:, None], self.p_nodes[None, :]

    def comb_step(self, eta: float) -> int:
        """Integer s with eta^2 = s*dp, or raise if incommensurate."""
        ratio = eta * eta / self.dp
        s = round(ratio)
        if s < 1 or abs(ratio - s) > 1e-9 * max(ratio, 1.0):
            raise ValueError(
                f"dp={self.dp!r} does not divide eta^2={eta * eta!r}; "
                "build the grid with make_grid so the momentum comb lands on nodes"
            )
        return s


@dataclass(frozen=True)
class Field:
    """A distribution sampled on a grid.  Treated as an immutable value.

    kind records the lineage: "quantum" fields may be negative, "classical"
    ones are kept nonnegative by the Liouville operators.  renorm_factor,
    mass_drift and boundary_mass carry diagnostics of the operation that
    produced the field.
    """

    grid: PhaseSpaceGrid
    values: np.ndarray
    kind: str
    kick_index: int = 0
    renorm_factor: float = 1.0
    mass_drift: float = 0.0
    boundary_mass: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("quantum", "classical"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.nq, self.grid.np):
            raise ValueError(
                f"value shape {v.shape} does not match grid ({self.grid.nq}, {self.grid.np})"
            )
        if v is self.values and v.flags.writeable:
            v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray, **changes) -> "Field":
        return replace(self, values=values, **changes)


def make_grid(extent: float, n_cells: int, eta: float) -> PhaseSpaceGrid:
    """Symmetric n_cells x n_cells grid on [-extent, extent)^2.

    dp is adjusted downward to the nearest value with eta^2 an exact integer
    multiple of dp; the p extent follows from the fixed cell count, so it
    shrinks accordingly.  The q spacing is left untouched.
    """
    if extent <= 0 or n_cells <= 0 or n_cells % 2:
        raise ValueError("extent must be positive and n_cells positive even")
    if eta <= 0:
        raise ValueError("eta must be positive")
    if extent < 4 * eta:
        raise ValueError(f"extent {extent} below 4*eta={4 * eta}; initial state would not fit")
    dp0 = 2.0 * extent / n_cells
    s = math.ceil(eta * eta / dp0 - 1e-12)
    s = max(s, 1)
    if s > MAX_COMB_RATIO:
        raise ValueError(
            f"eta^2/dp = {s} exceeds {MAX_COMB_RATIO}; comb resolution absurdly fine"
        )
    dp = eta * eta / s
    p_half = 0.5 * n_cells * dp
    return PhaseSpaceGrid(
        nq=n_cells, np=n_cells, q_min=-extent, q_max=extent, p_min=-p_half, p_max=p_half
    )


def make_grid_rect(
    eta: float,
    q_extent: float,
    nq: int,
    p_extent: float,
    s: int = 1,
) -> PhaseSpaceGrid:
    """Rectangular grid with dp = eta^2/s and np grown to cover p_extent.

    Small eta forces dp <= eta^2, so covering a physical momentum range can
    need far more p nodes than q nodes; this keeps memory bounded where a
    square grid would not.
    """
    if s < 1:
        raise ValueError("s must be a positive integer")
    if eta <= 0 or q_extent <= 0 or p_extent <= 0:
        raise ValueError("eta and extents must be positive")
    if nq <= 0 or nq % 2:
        raise ValueError("nq must be positive even")
    dp = eta * eta / s
    np_ = 2 * math.ceil(p_extent / dp - 1e-12)
    p_half = 0.5 * np_ * dp
    return PhaseSpaceGrid(
        nq=nq, np=np_, q_min=-q_extent, q_max=q_extent, p_min=-p_half, p_max=p_half
    )


def coherent_state(
    grid: PhaseSpaceGrid,
    center: tuple[float, float],
    eta: float,
    kind: str = "quantum",
) -> Field:
    """Gaussian Wigner function of a coherent state, renormalized to unit mass.

    W(q, p) = exp(-((q-q0)^2 + (p-p0)^2) / (2 eta^2)) / (2 pi eta^2),
    so the marginal widths are Delta q = Delta p = eta.
    """
    q0, p0 = center
    margin = 4.0 * eta
    if not (grid.q_min + margin <= q0 <= grid.q_max - margin):
        raise ValueError(f"center q={q0} within 4*eta of the q boundary")
    if not (grid.p_min + margin <= p0 <= grid.p_max - margin):
        raise ValueError(f"center p={p0} within 4*eta of the p boundary")
    qm, pm = grid.meshes()
    w = np.exp(-((qm - q0) ** 2 + (pm - p0) ** 2) / (2.0 * eta * eta)) / (
        2.0 * np.pi * eta * eta
    )
    w /= w.sum() * grid.cell_area
    return Field(grid=grid, values=w, kind=kind)


def integrate(f: Field) -> float:
    """Riemann integral of the field over the whole grid."""
    return float(f.values.sum() * f.grid.cell_area)


def boundary_mass_fraction(values: np.ndarray, n_cells: int = BOUNDARY_CELLS) -> float:
    """Fraction of total |mass| within n_cells of any grid edge."""
    a = np.abs(values)
    total = a.sum()
    if total == 0.0:
        return 0.0
    inner = a[n_cells:-n_cells, n_cells:-n_cells].sum()
    return float((total - inner) / total)


# magic, version, kind code, kick_index, nq, np, q_min, q_max, p_min, p_max
_HEADER = struct.Struct("<4sIBIII4d")
_KIND_CODES = {"classical": 0, "quantum": 1}


def save_snapshot(f: Field, path) -> None:
    """Write the binary snapshot: header then nq*np float64, row-major, q outer."""
    g = f.grid
    header = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        _KIND_CODES[f.kind],
        f.kick_index,
        g.nq,
        g.np,
        g.q_min,
        g.q_max,
        g.p_min,
        g.p_max,
    )
    data = np.ascontiguousarray(f.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def load_snapshot(path) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated snapshot header")
        magic, version, kind_code, kick_index, nq, np_, q_min, q_max, p_min, p_max = (
            _HEADER.unpack(raw)
        )
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {version}")
        payload = fh.read(nq * np_ * 8)
    if len(payload) != nq * np_ * 8:
        raise ValueError(f"{path}: truncated snapshot payload")
    values = np.frombuffer(payload, dtype="<f8").reshape(nq, np_)
    grid = PhaseSpaceGrid(nq=nq, np=np_, q_min=q_min, q_max=q_max, p_min=p_min, p_max=p_max)
    kind = {v: k for k, v in _KIND_CODES.items()}.get(kind_code)
    if kind is None:
        raise ValueError(f"{path}: unknown kind code {kind_code}")
    return Field(grid=grid, values=values.astype(np.float64), kind=kind, kick_index=kick_index)
