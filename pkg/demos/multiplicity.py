"""How often is the stopped maximum attained by a single box?

Run: python3 demos/multiplicity.py
"""
from __future__ import annotations

import math

import numpy as np

from stopped_occupancy import ModelParams, simulate
from stopped_occupancy.asymptotics import multiplicity_pmf, multiplicity_pmf_direct


def main() -> None:
    print(" j   chi_j (Fourier)    chi_j (direct)")
    for j in range(1, 6):
        print(f"{j:2d}   {multiplicity_pmf(j, 0, 0.3):.12f}   {multiplicity_pmf_direct(j, 0, 0.3):.12f}")
    print(f"\n1 - 1/e = {1 - math.exp(-1):.12f}")

    batch = simulate(ModelParams(10_000), K=1, reps=5_000, seed=3)
    q = batch.q_multiplicity
    print("\nsimulated at n = 10^4:")
    for j in range(1, 5):
        print(f"  P[Q = {j}] = {np.mean(q == j):.4f}   limit {multiplicity_pmf(j, 0, 0.0):.4f}")


if __name__ == "__main__":
    main()
