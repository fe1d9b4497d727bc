"""Geometric tails of the centred stopped maximum.

Run: python3 demos/tails.py
"""
from __future__ import annotations

import numpy as np

from stopped_occupancy import ModelParams, simulate
from stopped_occupancy.asymptotics import E, constants
from stopped_occupancy.stats import check_tail_bounds, tail_log_slope


def main() -> None:
    n = 10_000
    batch = simulate(ModelParams(n), K=1, reps=20_000, seed=7)
    x = batch.maxima - constants(n).b_n
    check = check_tail_bounds(x, epsilon=0.1)
    print(check.report())
    print(f"\nbounds hold: {check.passed}")
    print(f"right-tail log slope on k = 2..10: {tail_log_slope(x, np.arange(2, 11)):.3f}  (limit law: {-1 / (E - 1):.3f})")


if __name__ == "__main__":
    main()
