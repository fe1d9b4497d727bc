"""Simulate the coupon collector's stopped maximum and set it against its exact law.

Run: python3 demos/stopped_maximum.py
"""
from __future__ import annotations

from stopped_occupancy import ModelParams, simulate
from stopped_occupancy.asymptotics import constants
from stopped_occupancy.exact import stopped_max_pmf
from stopped_occupancy.stats import empirical_pmf, mc_summary, tv_distance, tv_noise


def main() -> None:
    params = ModelParams(n=1_000)
    batch = simulate(params, K=3, reps=20_000, seed=1)
    mean, sem = mc_summary(batch.maxima)
    print(f"n = {params.n}: every box got a ball after {batch.balls.mean():.0f} balls on average")
    print(f"largest count when stopping: {mean:.4f} +- {sem:.4f}")
    print(f"second and third largest on average: {batch.top_counts[:, 1].mean():.3f}, {batch.top_counts[:, 2].mean():.3f}")

    exact = stopped_max_pmf(params)
    emp = empirical_pmf(batch.maxima)
    print(f"exact mean by quadrature: {exact.mean():.4f}")
    print(f"TV(empirical, exact) = {tv_distance(emp, exact):.4f}  (noise bar {tv_noise(len(emp.probs), len(batch)):.4f})")

    b_n = constants(params.n).b_n
    print("\n  r   exact P[M=r]   empirical")
    for r in range(b_n - 3, b_n + 6):
        print(f"{r:3d}   {exact.pmf(r):.5f}        {emp.pmf(r):.5f}")


if __name__ == "__main__":
    main()
