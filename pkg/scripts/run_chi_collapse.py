#!/usr/bin/env python3
"""Diffusive-reservoir runs showing D_n/chi falling onto one curve.

Each (eta, D) pair with chi = K eta^4 / D^1.5 below ~1e-2 should give the
same rescaled separation history.  Grids are rectangular with dp = eta^2 so
the momentum comb stays exact at small eta.
"""
import argparse
import csv
from pathlib import Path

from khosim.harness import ExperimentConfig, run
from khosim.decoherence import chi

parser = argparse.ArgumentParser()
parser.add_argument("--K", type=float, default=0.5)
parser.add_argument("--kicks", type=int, default=50)
parser.add_argument("--out", default="runs/chi_collapse")
parser.add_argument(
    "--pairs",
    default="0.125:0.1,0.0625:0.1,0.0625:0.05,0.0625:0.01",
    help="comma-separated eta:D pairs",
)
args = parser.parse_args()

out = Path(args.out) / f"K{args.K:g}"
out.mkdir(parents=True, exist_ok=True)
rescaled = {}
for tok in args.pairs.split(","):
    eta_s, D_s = tok.split(":")
    eta, D = float(eta_s), float(D_s)
    x = chi(args.K, eta, D)
    rec = run(
        ExperimentConfig(
            kind="dn_series",
            K=args.K,
            eta=eta,
            D=D,
            x0=(0.0, 1.1),
            grid_cells=512,
            grid_p_extent=4.0,
            n_kicks=args.kicks,
            out_dir=str(out / f"eta{eta:g}_D{D:g}"),
        )
    )
    rescaled[f"eta{eta:g}_D{D:g}"] = rec.series.dn / x
    print(f"eta={eta} D={D}: chi={x:.3e} max dn/chi={max(rescaled[f'eta{eta:g}_D{D:g}']):.3f}")

with open(out / "rescaled.csv", "w", newline="") as fh:
    writer = csv.writer(fh)
    names = sorted(rescaled)
    writer.writerow(["n"] + names)
    for i in range(args.kicks):
        writer.writerow([i + 1] + [format(rescaled[k][i], ".17g") for k in names])
print(f"rescaled table -> {out / 'rescaled.csv'}")
