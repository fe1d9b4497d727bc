"""The exponential Poisson process, its lattice rounding and the Poisson shift.

The process has intensity ``e^{-(x - shift)} dx`` on the real line, so it has
infinitely many atoms towards ``-inf``; every sampler materializes only the
atoms above an explicit ``lower_cut``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from . import _rng
from ._rng import as_seed, generator

__all__ = [
    "PointConfig",
    "sample_exponential_process",
    "lattice_round",
    "poisson_shift",
    "shifted_maxima",
    "translated_maxima",
    "shift_truncation_bias",
]

_E = 2.71828182845904523536
_SHIFT_STREAM = 11
_WINDOW_STREAM = 12
_INV32 = 1.0 / 4294967296.0


@dataclass(frozen=True)
class PointConfig:
    """Atoms of a point process above ``lower_cut``, sorted nonincreasing."""

    atoms: np.ndarray
    lower_cut: float

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        object.__setattr__(self, "atoms", atoms)
        if atoms.ndim != 1:
            raise ValueError("atoms must be 1-d")
        if atoms.size and (np.any(np.diff(atoms) > 0) or atoms[-1] < self.lower_cut):
            raise ValueError("atoms must be nonincreasing and lie above lower_cut")

    def __len__(self) -> int:
        return self.atoms.size

    def count_above(self, x: float) -> int:
        return int(np.count_nonzero(self.atoms > x))

    def restrict(self, lower: float) -> "PointConfig":
        return PointConfig(self.atoms[self.atoms >= lower], max(lower, self.lower_cut))


def sample_exponential_process(shift: float, lower_cut: float, seed: int | None = None) -> PointConfig:
    """Atoms ``-log(E_1 + ... + E_i) + shift`` down to ``lower_cut``."""
    if not math.isfinite(lower_cut):
        raise ValueError("lower_cut must be finite")
    rng = generator(seed, 201)
    # stop once the partial sum exceeds exp(shift - lower_cut)
    threshold = math.exp(shift - lower_cut)
    chunk = int(threshold + 10 * math.sqrt(threshold) + 16)
    sums = np.cumsum(rng.standard_exponential(chunk))
    while sums[-1] <= threshold:
        sums = np.concatenate([sums, sums[-1] + np.cumsum(rng.standard_exponential(chunk))])
    sums = sums[: np.searchsorted(sums, threshold, side="right")]
    return PointConfig(shift - np.log(sums), lower_cut)


def lattice_round(config: PointConfig) -> np.ndarray:
    """Atom-wise ceiling, as a nonincreasing integer array."""
    return np.ceil(config.atoms).astype(np.int64)


def poisson_shift(config: PointConfig, h: float, seed: int | None = None) -> PointConfig:
    """Add an independent Poisson(h) jump to every atom and re-sort.

    In law this acts on the exponential process like translation by
    ``(e - 1) h``, but only above roughly ``lower_cut + (e - 1) h + 15``: atoms
    below the cut that would have jumped into view are missing.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    if h == 0 or config.atoms.size == 0:
        return config
    rng = generator(seed, 202)
    moved = config.atoms + rng.poisson(h, size=config.atoms.size)
    return PointConfig(np.sort(moved)[::-1], config.lower_cut)


@nb.njit(cache=True, parallel=True)
def _shifted_max_kernel(shift, h, lower_cut, seed, out):
    lam = math.exp(shift - lower_cut)
    # Poisson(h) cdf table for inversion
    table = np.empty(64)
    p = math.exp(-h)
    acc = p
    for i in range(64):
        table[i] = acc
        p *= h / (i + 1)
        acc += p
    for rep in nb.prange(out.size):
        s = _rng.new_state(seed, rep, _WINDOW_STREAM)
        count = _rng.next_poisson(s, lam)
        best = -np.inf
        # the atom lower_cut - log(v) beats best after a jump j iff v < bar[j]
        bar = np.full(64, 2.0)
        for _ in range(count):
            # two 32-bit uniforms from one draw: position and jump
            word = _rng.next_u64(s)
            v = (float(word >> np.uint64(32)) + 0.5) * _INV32
            u = (float(word & np.uint64(0xFFFFFFFF)) + 0.5) * _INV32
            jump = 0
            while jump < 63 and u > table[jump]:
                jump += 1
            if v < bar[jump]:
                x = lower_cut - math.log(v) + jump
                if x > best:
                    best = x
                    for j in range(64):
                        bar[j] = math.exp(lower_cut + j - best)
        out[rep] = best


def shifted_maxima(shift: float, h: float, lower_cut: float, reps: int, seed: int | None = None) -> np.ndarray:
    """Maxima of ``poisson_shift`` applied to independent copies of the process.

    Each replicate materializes the atoms above ``lower_cut`` (a Poisson
    number of them, placed independently with density ``e^{-(x - lower_cut)}``),
    jumps every atom by an independent Poisson(h) amount, and records the
    largest result; ``-inf`` if there are no atoms.
    """
    if h < 0 or h >= 10:
        raise ValueError("h must lie in [0, 10)")
    out = np.empty(int(reps))
    _shifted_max_kernel(float(shift), float(h), float(lower_cut), as_seed(seed), out)
    return out


def translated_maxima(shift: float, reps: int, seed: int | None = None) -> np.ndarray:
    """Maxima of the process with location ``shift``: a shifted standard Gumbel sample."""
    rng = generator(seed, 203)
    return shift - np.log(rng.standard_exponential(int(reps)))


def shift_truncation_bias(shift: float, h: float, lower_cut: float) -> float:
    """Upper bound on ``sup_y |P[max <= y]`` error| caused by ignoring atoms below ``lower_cut``.

    Missing atoms land above ``y`` with expected count
    ``e^{shift - y} sum_{j > y - lower_cut} p_j(h) e^j`` at most; multiplying by
    the translated cdf ``exp(-e^{shift + (e-1) h - y})`` and maximizing over a
    fine grid in ``y`` bounds the cdf discrepancy.
    """
    ys = np.linspace(lower_cut, shift + (_E - 1) * h + 40, 4001)
    js = np.arange(0, 200)
    log_pj = -h + js * math.log(h) - np.array([math.lgamma(j + 1) for j in js]) if h > 0 else None
    bound = 0.0
    for y in ys:
        if h == 0:
            break
        mask = js > y - lower_cut
        tail = np.exp(log_pj[mask] + js[mask]).sum()
        cdf = math.exp(-math.exp(shift + (_E - 1) * h - y))
        bound = max(bound, cdf * math.exp(shift - y) * tail)
    return bound
