#!/usr/bin/env python3
"""Side-by-side quantum/classical density images during the evolution.

Writes field snapshots every few kicks and renders them to 16-bit PGM with a
signed-channel pair for the quantum interference fringes.
"""
import argparse
from pathlib import Path

from khosim.harness import ExperimentConfig, emit_density_plot, run

parser = argparse.ArgumentParser()
parser.add_argument("--K", type=float, default=0.5)
parser.add_argument("--eta", type=float, default=0.25)
parser.add_argument("--D", type=float, default=0.0)
parser.add_argument("--kicks", type=int, default=18)
parser.add_argument("--every", type=int, default=2)
parser.add_argument("--out", default="runs/snapshots")
args = parser.parse_args()

out = Path(args.out)
rec = run(
    ExperimentConfig(
        kind="evolve",
        K=args.K,
        eta=args.eta,
        D=args.D,
        x0=(0.0, 1.1),
        n_kicks=args.kicks,
        snapshot_every=args.every,
        out_dir=str(out),
    )
)
for name in rec.snapshots:
    src = out / name
    emit_density_plot(src, src.with_suffix(".pgm"), gamma=0.5, signed_channel=True)
print(f"{len(rec.snapshots)} snapshots rendered under {out}")
