"""Adding Poisson(1) jumps to every atom of the exponential process acts like a translation by e - 1.

Run: python3 demos/poisson_shift.py
"""
from __future__ import annotations

import math

import numpy as np

from stopped_occupancy.pointproc import lattice_round, sample_exponential_process, shift_truncation_bias, shifted_maxima, translated_maxima


def main() -> None:
    cfg = sample_exponential_process(0.0, -2.0, seed=4)
    print("atoms above -2:", np.round(cfg.atoms, 3))
    print("rounded up    :", lattice_round(cfg))

    reps, cut = 200_000, -7.5
    a = np.sort(shifted_maxima(0.0, 1.0, cut, reps, seed=5))
    b = np.sort(translated_maxima(math.e - 1, reps, seed=6))
    print(f"\nlargest atom after the shift vs translated process ({reps} reps each):")
    for x in np.linspace(0, 6, 7):
        fa = np.searchsorted(a, x, side="right") / reps
        fb = np.searchsorted(b, x, side="right") / reps
        print(f"  x = {x:.0f}:  {fa:.4f}  {fb:.4f}")
    print(f"atoms below {cut} are dropped; their effect is at most {shift_truncation_bias(0.0, 1.0, cut):.1e}")


if __name__ == "__main__":
    main()
