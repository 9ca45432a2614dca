#!/usr/bin/env python3
"""Reproduce the Laplace-exponent curve study for the drift + exponential-jumps model.

Runs the `experiment1` pipeline: estimates the ratio curve z M_n(z)/M_n(z+1)
along the line Re z = 30 from n = 10^4 stationary draws, then tabulates
median drift/intensity errors over a 10^3/10^4/10^5 sample-size ladder.

Writes into results/laplace_curve_study/:
  fig1_laplace.csv     true vs estimated curve values on v in [-30, 30]
  fig2_estimates.csv   per-replicate estimates for each ladder point
  manifest.json        arguments, seed, outputs, status

Any extra command-line arguments are passed through to the CLI, e.g.
  scripts/run_laplace_curve_study.py --seed 3 --reps 50
"""

import sys

from gouest.cli import main

DEFAULTS = ["experiment1", "--out", "results/laplace_curve_study", "--seed", "0"]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))
