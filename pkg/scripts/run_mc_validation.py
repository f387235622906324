#!/usr/bin/env python3
"""Monte Carlo check that the sampled maximum-likelihood estimator attains
the classical precision bound at the fig2 working point.

Usage:
    python scripts/run_mc_validation.py [--shots N] [--reps R] [--seed S] [--eta E]
"""

import argparse
import sys

from spinmet.cli import main as spinmet_main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=100_000)
    parser.add_argument("--reps", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--eta", type=float, default=0.0)
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    cli_args = [
        "mc-validate", "--preset", "fig2",
        "--shots", str(args.shots), "--reps", str(args.reps),
        "--seed", str(args.seed), "--eta", str(args.eta),
    ]
    if args.out:
        cli_args += ["--out", args.out]
    return spinmet_main(cli_args)


if __name__ == "__main__":
    sys.exit(run())
