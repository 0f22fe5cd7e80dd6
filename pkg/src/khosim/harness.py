"""Experiment orchestration: JSON configs, runs, sweeps, density-plot emission.

Every experiment is described by one ExperimentConfig and produces flat files
under its output directory: a CSV series, binary field snapshots, and a JSON
run record.  Equal config and seed give byte-identical outputs, serial or
parallel.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .decoherence import chi, dn_perturbative
from .grid import (
    Field,
    PhaseSpaceGrid,
    coherent_state,
    load_snapshot,
    make_grid,
    make_grid_rect,
    save_snapshot,
)
from .liouville import classical_step
from .maps import ModelParams, poincare_section
from .metrics import (
    BOUNDARY_FLAG_LEVEL,
    DnSeries,
    SeriesParams,
    dn,
    dn_series,
    first_peak,
)
from .wigner import quantum_step

KINDS = (
    "poincare",
    "evolve",
    "dn_series",
    "sweep",
    "collapse",
    "peaks_vs_chi",
    "perturbative_compare",
)

#: kinds that iterate over the (K, eta, D) axes
SWEEP_KINDS = ("sweep", "collapse", "peaks_vs_chi")


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    # 17 significant digits round-trips binary64; '.' decimal, no locale
    return format(float(x), ".17g")


@dataclass
class ExperimentConfig:
    kind: str
    K: float = 0.5
    eta: float = 0.25
    D: float = 0.0
    x0: tuple[float, float] = (0.0, 1.1)
    grid_extent: float = 3 * np.pi
    grid_cells: int = 512
    # optional momentum half-extent; set to build a rectangular grid with
    # grid_cells position columns and dp = eta^2 (commensurate by construction)
    grid_p_extent: float | None = None
    n_kicks: int = 60
    K_values: list[float] = field(default_factory=list)
    eta_values: list[float] = field(default_factory=list)
    D_values: list[float] = field(default_factory=list)
    out_dir: str = "runs"
    snapshot_every: int = 0
    seed: int = 0
    workers: int = 0
    n_seeds: int = 20

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.n_kicks < 1:
            raise ConfigError("n_kicks must be >= 1")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")
        if self.K < 0 or self.D < 0:
            raise ConfigError("K and D must be non-negative")
        if self.snapshot_every < 0 or self.n_seeds < 1 or self.workers < 0:
            raise ConfigError("snapshot_every/n_seeds/workers out of range")
        if self.grid_cells < 2 or self.grid_extent <= 0:
            raise ConfigError("grid must have positive extent and >= 2 cells")
        if self.kind in SWEEP_KINDS:
            for name in ("K_values", "eta_values", "D_values"):
                axis = getattr(self, name)
                if not axis:
                    raise ConfigError(f"{name} must be non-empty for kind {self.kind!r}")
                if any(v < 0 for v in axis):
                    raise ConfigError(f"{name} entries must be non-negative")
        if self.kind == "perturbative_compare" and self.D <= 0:
            raise ConfigError("perturbative_compare needs D > 0")

    @property
    def model(self) -> ModelParams:
        return ModelParams(K=self.K, eta=self.eta)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["x0"] = list(self.x0)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("config needs a 'kind'")
        d = dict(d)
        if "x0" in d:
            x0 = d["x0"]
            if len(x0) != 2:
                raise ConfigError("x0 must be a pair")
            d["x0"] = (float(x0[0]), float(x0[1]))
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad JSON in {path}: {e}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        return cls.from_dict(doc)


def build_grid(config: ExperimentConfig) -> PhaseSpaceGrid:
    if config.grid_p_extent is not None:
        return make_grid_rect(
            config.eta, config.grid_extent, config.grid_cells, config.grid_p_extent
        )
    return make_grid(config.grid_extent, config.grid_cells, config.eta)


@dataclass
class RunRecord:
    config: ExperimentConfig
    series: DnSeries | None = None
    peak: tuple[int, float] | None = None
    chi_value: float | None = None  # present iff D > 0
    wall_time: float = 0.0
    boundary_flag: bool = False
    snapshots: list[str] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "peak": list(self.peak) if self.peak else None,
            "chi": self.chi_value,
            "wall_time": self.wall_time,
            "boundary_flag": self.boundary_flag,
            "snapshots": self.snapshots,
            "error": self.error,
        }


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def _series_csv(path: Path, s: DnSeries) -> None:
    flag = int(s.boundary_flag)
    _write_csv(
        path,
        ["n", "dn", "boundary_flag"],
        zip((int(n) for n in s.n), (float(v) for v in s.dn), (flag for _ in s.n)),
    )


def _record_json(out: Path, rec: RunRecord) -> None:
    (out / "record.json").write_text(json.dumps(rec.to_dict(), indent=2) + "\n")


def _try_peak(s: DnSeries) -> tuple[int, float] | None:
    try:
        return first_peak(s)
    except ValueError:
        return None


def run(config: ExperimentConfig) -> RunRecord:
    """Execute one experiment; write outputs under config.out_dir."""
    if config.kind in SWEEP_KINDS:
        raise ConfigError(f"kind {config.kind!r} goes through sweep(), not run()")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rec = RunRecord(config=config, chi_value=chi(config.K, config.eta, config.D) if config.D > 0 else None)

    if config.kind == "poincare":
        rng = np.random.default_rng(config.seed)
        half = 0.9 * config.grid_extent
        seeds = rng.uniform(-half, half, size=(config.n_seeds, 2))
        rows = poincare_section(seeds, config.n_kicks, config.model)
        _write_csv(
            out / "poincare.csv",
            ["seed_id", "iter", "q", "p"],
            ((int(r[0]), int(r[1]), float(r[2]), float(r[3])) for r in rows),
        )
    elif config.kind == "evolve":
        grid = build_grid(config)
        fq = coherent_state(grid, config.x0, config.eta, kind="quantum")
        fc = coherent_state(grid, config.x0, config.eta, kind="classical")
        dns = np.empty(config.n_kicks)
        contaminated = False
        for n in range(1, config.n_kicks + 1):
            fq = quantum_step(fq, config.model, config.D)
            fc = classical_step(fc, config.model, config.D)
            dns[n - 1] = dn(fq, fc)
            if (
                fq.boundary_mass > BOUNDARY_FLAG_LEVEL
                or fc.boundary_mass > BOUNDARY_FLAG_LEVEL
            ):
                contaminated = True
            if config.snapshot_every and n % config.snapshot_every == 0:
                for f, label in ((fq, "quantum"), (fc, "classical")):
                    name = f"{label}_n{n:04d}.kho"
                    save_snapshot(f, out / name)
                    rec.snapshots.append(name)
        s = DnSeries(
            params=SeriesParams(config.K, config.eta, config.D, tuple(config.x0)),
            n=np.arange(1, config.n_kicks + 1),
            dn=dns,
            boundary_flag=contaminated,
        )
        rec.series = s
        rec.peak = _try_peak(s)
        rec.boundary_flag = s.boundary_flag
        _series_csv(out / "series.csv", s)
    elif config.kind == "dn_series":
        grid = build_grid(config)
        s = dn_series(config.x0, config.model, config.D, config.n_kicks, grid)
        rec.series = s
        rec.peak = _try_peak(s)
        rec.boundary_flag = s.boundary_flag
        _series_csv(out / "series.csv", s)
    elif config.kind == "perturbative_compare":
        grid = build_grid(config)
        s = dn_series(config.x0, config.model, config.D, config.n_kicks, grid)
        W0 = coherent_state(grid, config.x0, config.eta, kind="classical")
        pert = dn_perturbative(W0, config.n_kicks, config.model, config.D)
        rec.series = s
        rec.peak = _try_peak(s)
        rec.boundary_flag = s.boundary_flag
        _write_csv(
            out / "perturbative.csv",
            ["n", "dn_full", "dn_perturbative"],
            zip(
                (int(n) for n in s.n),
                (float(v) for v in s.dn),
                (float(v) for v in pert),
            ),
        )
    else:  # pragma: no cover - validate() blocks this
        raise ConfigError(f"unhandled kind {config.kind!r}")

    rec.wall_time = time.perf_counter() - t0
    _record_json(out, rec)
    return rec


def resolve_workers(requested: int) -> int:
    env = os.environ.get("KHO_WORKERS")
    if env is not None:
        try:
            requested = int(env)
        except ValueError:
            raise ConfigError(f"KHO_WORKERS must be an integer, got {env!r}") from None
    if requested < 0:
        raise ConfigError("worker count must be >= 0")
    return requested or (os.cpu_count() or 1)


def _child_run(config_dict: dict[str, Any]) -> RunRecord:
    return run(ExperimentConfig.from_dict(config_dict))


def sweep(config: ExperimentConfig) -> list[RunRecord]:
    """Cartesian (K, eta, D) product of dn_series runs plus a summary CSV.

    Individual failures are recorded in the returned records (error field)
    and in failures.json; the sweep continues.  Results are ordered by axis
    position, so the summary is byte-identical for any worker count.
    """
    config.validate()
    if config.kind not in SWEEP_KINDS:
        raise ConfigError(f"kind {config.kind!r} is not a sweep kind")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    combos = [
        (K, eta, D)
        for K in config.K_values
        for eta in config.eta_values
        for D in config.D_values
    ]
    children = []
    for K, eta, D in combos:
        sub = f"run_K{K:g}_eta{eta:g}_D{D:g}"
        child = config.to_dict()
        child.update(
            kind="dn_series",
            K=K,
            eta=eta,
            D=D,
            K_values=[],
            eta_values=[],
            D_values=[],
            out_dir=str(out / sub),
        )
        children.append(child)

    workers = resolve_workers(config.workers)
    records: list[RunRecord] = []
    if workers <= 1:
        for child in children:
            records.append(_safe_child(child))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_child_run, child) for child in children]
            for child, fut in zip(children, futures):
                try:
                    records.append(fut.result())
                except Exception as e:  # noqa: BLE001 - sweep must continue
                    records.append(
                        RunRecord(config=ExperimentConfig.from_dict(child), error=str(e))
                    )

    rows = []
    for rec in records:
        c = rec.config
        chi_s = _fmt(chi(c.K, c.eta, c.D)) if c.D > 0 else ""
        n_peak, dn_peak = ("", "")
        if rec.peak is not None:
            n_peak, dn_peak = str(rec.peak[0]), _fmt(rec.peak[1])
        rows.append([_fmt(c.K), _fmt(c.eta), _fmt(c.D), chi_s, n_peak, dn_peak])
    with open(out / "summary.csv", "w", newline="") as fh:
        fh.write("K,eta,D,chi,n_peak,dn_peak\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    failures = {
        f"run_K{r.config.K:g}_eta{r.config.eta:g}_D{r.config.D:g}": r.error
        for r in records
        if r.error
    }
    if failures:
        (out / "failures.json").write_text(json.dumps(failures, indent=2) + "\n")
    return records


def _safe_child(child: dict[str, Any]) -> RunRecord:
    try:
        return _child_run(child)
    except Exception as e:  # noqa: BLE001 - sweep must continue
        return RunRecord(config=ExperimentConfig.from_dict(child), error=str(e))


def emit_density_plot(
    snapshot_path: str | Path,
    out_path: str | Path,
    gamma: float = 0.5,
    signed_channel: bool = False,
) -> None:
    """Render a field snapshot as a 16-bit PGM (q along x, p upward).

    Intensity is (|W| / max|W|)^gamma.  A JSON sidecar carries min, max and
    the negativity fraction.  With signed_channel, two extra PGMs split the
    positive and negative parts against the same scale.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    f = load_snapshot(snapshot_path)
    out_path = Path(out_path)
    img = f.values.T[::-1, :]  # rows top-to-bottom = p high-to-low
    peak = float(np.max(np.abs(img)))

    def to_pgm(path: Path, plane: np.ndarray) -> None:
        scaled = np.zeros_like(plane) if peak == 0.0 else (np.abs(plane) / peak) ** gamma
        pix = np.round(scaled * 65535).astype(">u2")
        with open(path, "wb") as fh:
            fh.write(f"P5\n{pix.shape[1]} {pix.shape[0]}\n65535\n".encode())
            fh.write(pix.tobytes())

    to_pgm(out_path, img)
    meta = {
        "source": str(snapshot_path),
        "kind": f.kind,
        "kick_index": f.kick_index,
        "gamma": gamma,
        "min": float(f.values.min()),
        "max": float(f.values.max()),
        "negativity_fraction": float(np.mean(f.values < 0.0)),
    }
    out_path.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    if signed_channel:
        to_pgm(out_path.with_name(out_path.stem + "_pos.pgm"), np.maximum(img, 0.0))
        to_pgm(out_path.with_name(out_path.stem + "_neg.pgm"), np.minimum(img, 0.0))
