"""Empirical laws, total variation, Monte Carlo summaries and tail-bound checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticePMF",
    "TailBoundFit",
    "TailCheck",
    "empirical_pmf",
    "tv_distance",
    "tv_noise",
    "mc_summary",
    "check_tail_bounds",
    "tail_log_slope",
]

_E = 2.71828182845904523536


@dataclass(frozen=True)
class LatticePMF:
    """Probability mass function on ``support_lo, support_lo + 1, ...``."""

    support_lo: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "support_lo", int(self.support_lo))
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(probs.sum() - 1.0) > 1e-8:
            raise ValueError(f"probabilities sum to {probs.sum():.12g}")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_lo, self.support_lo + len(self.probs))

    @property
    def support_hi(self) -> int:
        return self.support_lo + len(self.probs) - 1

    def pmf(self, k):
        k = np.asarray(k)
        idx = k - self.support_lo
        inside = (idx >= 0) & (idx < len(self.probs))
        out = np.where(inside, self.probs[np.clip(idx, 0, len(self.probs) - 1)], 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, k):
        k = np.asarray(k)
        cum = np.cumsum(self.probs)
        idx = np.clip(k - self.support_lo, -1, len(self.probs) - 1)
        out = np.where(idx < 0, 0.0, cum[np.maximum(idx, 0)])
        return out[()] if out.ndim == 0 else out

    def mean(self) -> float:
        return float(self.support @ self.probs)

    def var(self) -> float:
        mu = self.mean()
        return float(((self.support - mu) ** 2) @ self.probs)

    def shift(self, k: int) -> "LatticePMF":
        return LatticePMF(self.support_lo + k, self.probs)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        p = self.probs / self.probs.sum()
        return self.support_lo + rng.choice(len(p), size=size, p=p)


@dataclass(frozen=True)
class TailBoundFit:
    """Constants of the bounds ``P[X > k] <= C e^{-rate k}`` and ``P[X <= -k] <= C e^{-k}``."""

    C: float
    rate: float
    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.C <= 0 or self.rate <= 0:
            raise ValueError("C and rate must be positive")
        if self.rate > (1 - self.epsilon) / _E + 1e-15:
            raise ValueError("rate exceeds (1 - epsilon)/e")


@dataclass
class TailCheck:
    passed: bool
    fit: TailBoundFit
    ks: np.ndarray
    right_tail: np.ndarray
    left_tail: np.ndarray
    right_margin: np.ndarray
    left_margin: np.ndarray

    def report(self) -> str:
        lines = [f"C={self.fit.C:.4g} rate={self.fit.rate:.4g} eps={self.fit.epsilon}"]
        for k, r, l, mr, ml in zip(self.ks, self.right_tail, self.left_tail, self.right_margin, self.left_margin):
            lines.append(f"k={k:3d}  P[X>k]={r:.3e} (margin {mr:+.3e})  P[X<=-k]={l:.3e} (margin {ml:+.3e})")
        return "\n".join(lines)


def empirical_pmf(samples) -> LatticePMF:
    """Normalized histogram over ``[min, max]`` of integer samples.

    >>> empirical_pmf([0, 0, 1, 1]).probs
    array([0.5, 0.5])
    """
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("no samples")
    x = x.astype(np.int64).ravel()
    lo = int(x.min())
    counts = np.bincount(x - lo)
    return LatticePMF(lo, counts / counts.sum())


def tv_distance(p: LatticePMF, q: LatticePMF) -> float:
    """Half the L1 distance over the union of supports."""
    lo = min(p.support_lo, q.support_lo)
    hi = max(p.support_hi, q.support_hi)
    a = np.zeros(hi - lo + 1)
    b = np.zeros(hi - lo + 1)
    a[p.support_lo - lo : p.support_hi - lo + 1] = p.probs
    b[q.support_lo - lo : q.support_hi - lo + 1] = q.probs
    return float(0.5 * np.abs(a - b).sum())


def tv_noise(support_size: int, reps: int) -> float:
    """Plug-in Monte Carlo error bar ``sqrt(support / reps)`` for an empirical TV."""
    return math.sqrt(support_size / reps)


def mc_summary(samples) -> tuple[float, float]:
    """Sample mean and its standard error (sample std with ddof=1 over sqrt(reps))."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two samples")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _tails(x: np.ndarray, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xs = np.sort(x)
    n = xs.size
    right = (n - np.searchsorted(xs, ks, side="right")) / n
    left = np.searchsorted(xs, -ks, side="right") / n
    return right, left


def check_tail_bounds(samples, fit: TailBoundFit | None = None, epsilon: float = 0.1, k_fit: int = 3) -> TailCheck:
    """Check exponential tail bounds on centred integer samples.

    Right tail ``P[X > k] <= C exp(-(1-eps) k / e)`` and left tail
    ``P[X <= -k] <= C exp(-k)`` for every ``k >= 0``.  Without ``fit`` the
    constant ``C`` is the smallest one satisfying both bounds for
    ``k <= k_fit``; the remaining ``k`` are then genuine checks.
    """
    x = np.asarray(samples).astype(np.int64).ravel()
    if x.size < 10_000:
        raise ValueError("tail checks need at least 10^4 samples")
    kmax = int(max(x.max(), -x.min(), k_fit)) + 1
    ks = np.arange(0, kmax + 1)
    right, left = _tails(x, ks)
    if fit is None:
        rate = (1 - epsilon) / _E
        head = ks <= k_fit
        C = float(max(np.max(right[head] * np.exp(rate * ks[head])), np.max(left[head] * np.exp(ks[head]))))
        fit = TailBoundFit(C=max(C, 1e-300), rate=rate, epsilon=epsilon)
    right_margin = fit.C * np.exp(-fit.rate * ks) - right
    left_margin = fit.C * np.exp(-1.0 * ks) - left
    passed = bool(np.all(right_margin >= -1e-15) and np.all(left_margin >= -1e-15))
    return TailCheck(passed, fit, ks, right, left, right_margin, left_margin)


def tail_log_slope(samples, ks) -> float:
    """Least-squares slope of ``log P[X > k]`` against ``k`` (empty tails skipped)."""
    x = np.asarray(samples).ravel()
    ks = np.asarray(ks)
    right, _ = _tails(x.astype(np.int64), ks)
    keep = right > 0
    if keep.sum() < 2:
        raise ValueError("not enough populated tail points")
    return float(np.polyfit(ks[keep], np.log(right[keep]), 1)[0])
