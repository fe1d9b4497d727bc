"""The discrete limit law of the centred stopped maximum and its oscillating mean.

Run: python3 demos/limit_law.py
"""
from __future__ import annotations

import numpy as np

from stopped_occupancy.asymptotics import EULER_GAMMA, E, constants, expected_mn, mean_zn, zn_pmf
from stopped_occupancy.exact import stopped_max_pmf
from stopped_occupancy.sim import ModelParams
from stopped_occupancy.stats import tv_distance


def main() -> None:
    print("    n     b_n   c_n     TV(exact, limit)")
    for k in range(2, 7):
        n = 10**k
        c = constants(n)
        exact = stopped_max_pmf(ModelParams(n)).shift(-c.b_n)
        print(f"{n:>8d}  {c.b_n:3d}   {c.c_n:.3f}   {tv_distance(exact, zn_pmf(c, 0)):.4f}")

    print("\nThe limit law depends on n only through the fractional part c_n,")
    print("so the mean of M_n - b_n - c_n oscillates; the wiggle is tiny:")
    u = np.linspace(0, 1, 9)
    wiggle = [mean_zn(1, 0, x) - (EULER_GAMMA * E + 0.5 + x) for x in u]
    for x, w in zip(u, wiggle):
        print(f"  c = {x:.3f}   deviation {w:+.3e}")

    print("\nExpected maximum with ell boxes still allowed to be small (n = 10^4):")
    for ell in (0, 1, 10, 100):
        print(f"  ell = {ell:3d}: {expected_mn(10_000, 1, 0, ell):.5f}")


if __name__ == "__main__":
    main()
