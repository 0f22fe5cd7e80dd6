"""Command-line entry point.

Subcommands map one-to-one onto experiment kinds; every flag overrides the
matching field of a JSON config given with --config.  Exit codes: 0 success,
2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    SWEEP_KINDS,
    ConfigError,
    ExperimentConfig,
    resolve_workers,
    run,
    sweep,
)
from .metrics import collapse_alpha, collapse_objective, slope_loglog

#: subcommand -> experiment kind
_COMMANDS = {
    "poincare": "poincare",
    "evolve": "evolve",
    "dn": "dn_series",
    "sweep": "sweep",
    "collapse": "collapse",
    "peaks": "peaks_vs_chi",
    "perturb": "perturbative_compare",
}

#: chi window for the peaks slope fit
SLOPE_CHI_RANGE = (1e-4, 1e-2)


def _parse_values(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad value list {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kho",
        description="Kicked-harmonic-oscillator quantum/classical phase-space runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--K", type=float, default=None)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--D", type=float, default=None)
        p.add_argument(
            "--center",
            type=str,
            default=None,
            metavar="Q,P",
            help="initial state center, e.g. 0,1.1",
        )
        p.add_argument("--kicks", type=int, default=None)
        p.add_argument("--grid-extent", type=float, default=None)
        p.add_argument(
            "--grid-cells",
            type=str,
            default=None,
            metavar="N|NQxNP",
            help="square cell count, or NQxNP for a rectangular grid with dp=eta^2",
        )
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        if name in ("sweep", "collapse", "peaks"):
            p.add_argument("--K-list", type=str, default=None, metavar="A,B,...")
            p.add_argument("--eta-list", type=str, default=None, metavar="A,B,...")
            p.add_argument("--D-list", type=str, default=None, metavar="A,B,...")
        if name == "evolve":
            p.add_argument("--snapshot-every", type=int, default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kind = _COMMANDS[args.command]
    base: dict = {"kind": kind}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise OSError(f"config file not found: {path}")
        base = ExperimentConfig.from_json(path).to_dict()
        base["kind"] = kind
    if args.K is not None:
        base["K"] = args.K
    if args.eta is not None:
        base["eta"] = args.eta
    if args.D is not None:
        base["D"] = args.D
    if args.center is not None:
        parts = _parse_values(args.center)
        if len(parts) != 2:
            raise ConfigError("--center expects Q,P")
        base["x0"] = parts
    if args.kicks is not None:
        base["n_kicks"] = args.kicks
    if args.grid_extent is not None:
        base["grid_extent"] = args.grid_extent
    if args.grid_cells is not None:
        text = args.grid_cells.lower()
        try:
            if "x" in text:
                nq_s, np_s = text.split("x")
                nq, n_p = int(nq_s), int(np_s)
                base["grid_cells"] = nq
                eta = base.get("eta", 0.25)
                base["grid_p_extent"] = n_p * eta * eta / 2.0
            else:
                base["grid_cells"] = int(text)
                base["grid_p_extent"] = None
        except ValueError:
            raise ConfigError(f"bad --grid-cells {args.grid_cells!r}") from None
    if args.out is not None:
        base["out_dir"] = args.out
    if args.seed is not None:
        base["seed"] = args.seed
    if args.workers is not None:
        base["workers"] = args.workers
    if getattr(args, "snapshot_every", None) is not None:
        base["snapshot_every"] = args.snapshot_every
    for flag, key in (
        ("K_list", "K_values"),
        ("eta_list", "eta_values"),
        ("D_list", "D_values"),
    ):
        text = getattr(args, flag, None)
        if text is not None:
            base[key] = _parse_values(text)
    return ExperimentConfig.from_dict(base)


def _post_sweep(config: ExperimentConfig, records) -> None:
    out = Path(config.out_dir)
    if config.kind == "collapse":
        by_K: dict[float, list] = {}
        for rec in records:
            if rec.error is None and rec.series is not None:
                by_K.setdefault(rec.config.K, []).append(rec.series)
        doc = {}
        for K, curves in sorted(by_K.items()):
            res = collapse_alpha(curves)
            at_zero = collapse_objective(curves, 0.0)
            doc[f"K={K:g}"] = {
                "alpha": res.alpha,
                "objective": res.objective,
                "objective_at_zero": at_zero,
                "improvement": at_zero / res.objective if res.objective > 0 else float("inf"),
                "no_rescaling": res.no_rescaling,
            }
        (out / "collapse.json").write_text(json.dumps(doc, indent=2) + "\n")
        print(json.dumps(doc, indent=2))
    elif config.kind == "peaks_vs_chi":
        points = [
            (rec.chi_value, rec.peak[1])
            for rec in records
            if rec.error is None and rec.peak is not None and rec.chi_value
        ]
        doc: dict = {"points_used": len(points)}
        try:
            doc["slope"] = slope_loglog(points, SLOPE_CHI_RANGE)
            doc["chi_range"] = list(SLOPE_CHI_RANGE)
        except ValueError as e:
            doc["slope_error"] = str(e)
        (out / "slope.json").write_text(json.dumps(doc, indent=2) + "\n")
        print(json.dumps(doc, indent=2))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if config.kind in SWEEP_KINDS:
            records = sweep(config)
            _post_sweep(config, records)
            failed = sum(1 for r in records if r.error)
            print(
                f"sweep: {len(records)} runs ({failed} failed), "
                f"workers={resolve_workers(config.workers)}, "
                f"summary at {Path(config.out_dir) / 'summary.csv'}"
            )
        else:
            rec = run(config)
            msg = f"{config.kind}: done in {rec.wall_time:.1f}s -> {config.out_dir}"
            if rec.peak is not None:
                msg += f" (first peak dn={rec.peak[1]:.4g} at n={rec.peak[0]})"
            if rec.boundary_flag:
                msg += " [warning: boundary contamination]"
            print(msg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
