#!/usr/bin/env python3
"""Stroboscopic portraits for the four kick strengths used throughout.

K=0.5 and 1.0 sit below the origin bifurcation, 1.5 is mixed, 2.0 has the
origin hyperbolic inside the stochastic web.
"""
import argparse
from pathlib import Path

from khosim.harness import ExperimentConfig, run

parser = argparse.ArgumentParser()
parser.add_argument("--out", default="runs/poincare")
parser.add_argument("--iters", type=int, default=2000)
parser.add_argument("--seeds", type=int, default=40)
args = parser.parse_args()

for K in (0.5, 1.0, 1.5, 2.0):
    out = Path(args.out) / f"K{K:g}"
    rec = run(
        ExperimentConfig(
            kind="poincare",
            K=K,
            n_kicks=args.iters,
            n_seeds=args.seeds,
            out_dir=str(out),
            seed=7,
        )
    )
    print(f"K={K}: {args.seeds * args.iters} points -> {out}/poincare.csv")
