#!/usr/bin/env python3
"""Rate-distortion sweep over the compensation tolerance, CSV to stdout.

Equivalent to `hsicodec rd` but exposed as a script so the sweep settings
are easy to edit for experiments.

Usage: python scripts/rd_sweep.py cube.raw --lambdas 0,0.01,0.02,0.05
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hsicodec import CompensationConfig, EncoderConfig, TrainConfig, load_cube
from hsicodec.metrics import rd_csv, rd_points


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("cube", help="input cube (.raw with .hdr sidecar)")
    parser.add_argument("--lambdas", default="0.0,0.01,0.02,0.05")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mse-goal", type=float, default=1e-4)
    parser.add_argument("--max-epochs", type=int, default=200)
    args = parser.parse_args()

    cube = load_cube(args.cube)
    cfg = EncoderConfig(
        train=TrainConfig(
            mse_goal=args.mse_goal, max_epochs=args.max_epochs, seed=args.seed
        ),
        compensation=CompensationConfig(enabled=True),
    )
    lambdas = [float(part) for part in args.lambdas.split(",") if part.strip()]
    sys.stdout.write(rd_csv(rd_points(cube, lambdas, cfg)))


if __name__ == "__main__":
    main()
