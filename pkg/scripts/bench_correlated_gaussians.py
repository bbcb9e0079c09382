#!/usr/bin/env python3
"""Desk-scale benchmark: the whole estimator ladder on one Gaussian task.

Runs every estimator for a few thousand steps at target information 2.0
nats (d=20), three seeds each, and leaves trajectories plus summary.csv in
results/gaussian_mi2/. This is a shortened version of the full sweep; pass
--steps 20000 to reproduce benchmark-scale numbers.
"""

import sys

from mitk.cli import main

DEFAULTS = [
    "bench",
    "--estimators", "ba_upper,l1out,dv,tuba,nwj,infonce,ba_lower",
    "--dim", "20",
    "--target-mi", "2.0",
    "--steps", "2000",
    "--batch-size", "128",
    "--seeds", "3",
    "--seed", "0",
    "--out", "results/gaussian_mi2",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))
