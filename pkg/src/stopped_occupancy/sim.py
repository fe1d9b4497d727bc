"""Monte Carlo simulation of the stopped occupancy scheme.

Balls land uniformly in ``n`` boxes until all but ``ell`` boxes hold more
than ``m`` balls.  Three flavours share one allocation kernel:

``discrete``
    the classic scheme; ``tau`` is the number of balls thrown.
``poissonized``
    the same allocation read on the clock of a rate-``n`` Poisson arrival
    process, so ``tau`` is a Gamma(balls, n) time.  The stopped
    configuration is identical to the discrete one for the same seed.
``bipoissonized``
    the number of boxes is itself Poisson(``n``).

Replicate ``i`` of a run seeded with ``seed`` always uses the streams
keyed by ``(seed, i)``, so batches can be split or parallelised freely
without changing any result.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from . import _rng
from .special import log_poisson_cdf, log_poisson_pmf, log_poisson_sf

__all__ = [
    "ModelParams",
    "OccupancyState",
    "StoppedResult",
    "StoppedBatch",
    "simulate",
    "simulate_discrete",
    "simulate_poissonized",
    "simulate_bipoissonized",
    "allocation_stream",
    "occupancy_at",
    "fixed_time_maxima",
    "fixed_time_maxima_batch",
    "r_arrival_times",
]

_MODES = {"discrete": 0, "poissonized": 1, "bipoissonized": 2}


@dataclass(frozen=True)
class ModelParams:
    """Number of boxes ``n``, ball threshold ``m`` and allowed laggards ``ell``."""

    n: int
    m: int = 0
    ell: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 0 or self.ell < 0:
            raise ValueError(f"invalid parameters {self}")
        if self.n <= self.ell:
            raise ValueError(f"need n > ell, got n={self.n}, ell={self.ell}")
        if self.n >= 2**32:
            raise ValueError("n must be below 2**32")


class OccupancyState:
    """Box counts together with their multiplicities (count of counts).

    Updated one ball at a time in O(1); intended for small-scale checks and
    for replaying an allocation stream, not for bulk simulation.
    """

    def __init__(self, counts, m: int = 0, time: float = 0.0):
        self.counts = np.array(counts, dtype=np.int64)
        self.m = m
        self.time = time
        self.count_of_counts = Counter(self.counts.tolist())
        self.balls_thrown = int(self.counts.sum())
        self.small_boxes = int(np.sum(self.counts <= m))

    @classmethod
    def empty(cls, n: int, m: int = 0) -> "OccupancyState":
        return cls(np.zeros(n, dtype=np.int64), m=m)

    @property
    def n(self) -> int:
        return len(self.counts)

    def throw(self, box: int) -> None:
        c = self.counts[box]
        self.counts[box] = c + 1
        self.count_of_counts[c] -= 1
        if not self.count_of_counts[c]:
            del self.count_of_counts[c]
        self.count_of_counts[c + 1] += 1
        self.balls_thrown += 1
        if c == self.m:
            self.small_boxes -= 1

    def top(self, K: int) -> np.ndarray:
        out = np.zeros(K, dtype=np.int64)
        j = 0
        for r in sorted(self.count_of_counts, reverse=True):
            take = min(self.count_of_counts[r], K - j)
            out[j : j + take] = r
            j += take
            if j == K:
                break
        return out

    @property
    def max_multiplicity(self) -> int:
        return self.count_of_counts[max(self.count_of_counts)] if self.count_of_counts else 0


@dataclass
class StoppedResult:
    """One stopped realisation.

    ``tau`` is the ball count (discrete) or the continuous stopping time;
    ``top_counts`` holds the ``K`` largest box counts, ``q_multiplicity`` the
    number of boxes tied at the maximum, ``n_effective`` the number of boxes.
    In the bi-poissonised scheme with fewer than ``ell + 1`` boxes everything
    except ``n_effective`` is zero.
    """

    tau: float
    top_counts: np.ndarray
    q_multiplicity: int
    n_effective: int
    balls: int
    probe_count: int = -1


@dataclass
class StoppedBatch:
    """Column-oriented results of many replicates."""

    params: ModelParams
    mode: str
    tau: np.ndarray
    balls: np.ndarray
    top_counts: np.ndarray
    q_multiplicity: np.ndarray
    n_effective: np.ndarray
    probe_count: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.tau)

    @property
    def maxima(self) -> np.ndarray:
        return self.top_counts[:, 0]

    def __getitem__(self, i: int) -> StoppedResult:
        tau = int(self.balls[i]) if self.mode == "discrete" else float(self.tau[i])
        return StoppedResult(
            tau=tau,
            top_counts=self.top_counts[i].copy(),
            q_multiplicity=int(self.q_multiplicity[i]),
            n_effective=int(self.n_effective[i]),
            balls=int(self.balls[i]),
            probe_count=int(self.probe_count[i]),
        )


@nb.njit(cache=True, parallel=True)
def _stopped_kernel(n, m, ell, K, seed, first, mode, tau, balls_out, top, q, neff, probe):
    for i in nb.prange(tau.shape[0]):
        rep = first + i
        clock = _rng.new_state(seed, rep, _rng.CLOCK)
        boxes = n
        if mode == 2:
            boxes = _rng.next_poisson(clock, float(n))
        neff[i] = boxes
        if boxes < ell + 1:
            continue
        alloc = _rng.new_state(seed, rep, _rng.ALLOC)
        counts = np.zeros(boxes, np.int32)
        small = boxes
        balls = 0
        last = 0
        while small > ell:
            last = _rng.next_below(alloc, boxes)
            c = counts[last] + 1
            counts[last] = c
            balls += 1
            if c == m + 1:
                small -= 1
        balls_out[i] = balls
        if mode == 0:
            tau[i] = balls
        else:
            tau[i] = _rng.next_gamma(clock, float(balls)) / boxes
        mx = 0
        for b in range(boxes):
            if counts[b] > mx:
                mx = counts[b]
        cc = np.zeros(mx + 1, np.int64)
        for b in range(boxes):
            cc[counts[b]] += 1
        q[i] = cc[mx]
        j = 0
        r = mx
        while j < K and r >= 0:
            take = min(cc[r], K - j)
            for jj in range(j, j + take):
                top[i, jj] = r
            j += take
            r -= 1
        # one box with more than m balls, other than the box that stopped the run
        if boxes - ell - 1 > 0:
            while True:
                b = _rng.next_below(clock, boxes)
                if counts[b] > m and b != last:
                    probe[i] = counts[b]
                    break


def simulate(
    params: ModelParams,
    K: int = 1,
    reps: int = 1,
    seed: int | None = None,
    mode: str = "discrete",
    first_replicate: int = 0,
) -> StoppedBatch:
    """Run ``reps`` independent stopped replicates (replicate indices start at ``first_replicate``)."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {sorted(_MODES)}")
    if K < 1:
        raise ValueError("K must be positive")
    if mode != "bipoissonized" and K > params.n:
        raise ValueError(f"K={K} exceeds n={params.n}")
    if reps < 1:
        raise ValueError("reps must be positive")
    seed = _rng.as_seed(seed)
    tau = np.zeros(reps)
    balls = np.zeros(reps, np.int64)
    top = np.zeros((reps, K), np.int64)
    q = np.zeros(reps, np.int64)
    neff = np.zeros(reps, np.int64)
    probe = np.full(reps, -1, np.int64)
    _stopped_kernel(
        params.n, params.m, params.ell, K, np.uint64(seed), first_replicate, _MODES[mode], tau, balls, top, q, neff, probe
    )
    return StoppedBatch(params, mode, tau, balls, top, q, neff, probe)


def simulate_discrete(params: ModelParams, K: int = 1, seed: int | None = None, replicate: int = 0) -> StoppedResult:
    """Throw balls one at a time until only ``ell`` boxes hold at most ``m`` balls.

    >>> simulate_discrete(ModelParams(1), seed=0).top_counts
    array([1])
    """
    return simulate(params, K, 1, seed, "discrete", replicate)[0]


def simulate_poissonized(params: ModelParams, K: int = 1, seed: int | None = None, replicate: int = 0) -> StoppedResult:
    return simulate(params, K, 1, seed, "poissonized", replicate)[0]


def simulate_bipoissonized(params: ModelParams, K: int = 1, seed: int | None = None, replicate: int = 0) -> StoppedResult:
    return simulate(params, K, 1, seed, "bipoissonized", replicate)[0]


@nb.njit(cache=True)
def _allocation_kernel(n, seed, replicate, out):
    s = _rng.new_state(seed, replicate, _rng.ALLOC)
    for k in range(out.shape[0]):
        out[k] = _rng.next_below(s, n)


def allocation_stream(n: int, size: int, seed: int | None = None, replicate: int = 0) -> np.ndarray:
    """The box indices the simulators use for replicate ``replicate``, in throwing order."""
    out = np.empty(size, np.int64)
    _allocation_kernel(n, np.uint64(_rng.as_seed(seed)), replicate, out)
    return out


def occupancy_at(n: int, t: float, seed: int | None = None, m: int = 0, bipoissonized: bool = False) -> OccupancyState:
    """Occupancy at fixed poissonised time ``t``: iid Poisson(t) counts in n (or Poisson(n)) boxes."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    rng = _rng.generator(_rng.as_seed(seed), 5)
    boxes = rng.poisson(n) if bipoissonized else n
    return OccupancyState(rng.poisson(t, boxes), m=m, time=t)


def _top_from_counts(counts: np.ndarray, K: int) -> np.ndarray:
    cc = np.bincount(counts)
    out = np.zeros(K, dtype=np.int64)
    j = 0
    for r in range(len(cc) - 1, -1, -1):
        take = min(int(cc[r]), K - j)
        out[j : j + take] = r
        j += take
        if j == K:
            break
    return out


def fixed_time_maxima(params: ModelParams, t: float, K: int = 1, seed: int | None = None) -> np.ndarray:
    """The ``K`` largest of ``n`` iid Poisson(t) box counts, read off their multiplicities."""
    if K > params.n:
        raise ValueError(f"K={K} exceeds n={params.n}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    rng = _rng.generator(_rng.as_seed(seed), 3)
    return _top_from_counts(rng.poisson(t, params.n), K)


def fixed_time_maxima_batch(
    params: ModelParams, t: float, K: int = 1, reps: int = 1, seed: int | None = None, tail: float = 1e-18
) -> np.ndarray:
    """``reps`` draws of the top-``K`` counts at time ``t``, shape ``(reps, K)``.

    Samples the multiplicities from the top down: given that ``A`` boxes lie
    above ``r``, the number at exactly ``r`` is Binomial(n - A, p_r / P_r).
    Exact in law; the cost does not grow with ``n``.
    """
    n = params.n
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    rng = _rng.generator(_rng.as_seed(seed), 6)
    top = np.zeros((reps, K), dtype=np.int64)
    if t == 0:
        return top
    # start where the expected number of boxes above r is negligible
    r = int(t)
    while np.log(n) + log_poisson_sf(r, t) > np.log(tail):
        r += 1
    above = rng.binomial(n, np.exp(log_poisson_sf(r, t)), size=reps)
    filled = np.zeros(reps, dtype=np.int64)
    cols = np.arange(K)
    for i in np.flatnonzero(above):
        # rare: place the overshooting boxes exactly by inversion
        u = rng.random(above[i])
        vals = [_invert_tail(r, t, ui) for ui in u]
        vals = sorted(vals, reverse=True)[:K]
        top[i, : len(vals)] = vals
        filled[i] = len(vals)
    remaining = n - above
    while r >= 0 and np.any(filled < K):
        prob = np.exp(log_poisson_pmf(r, t) - log_poisson_cdf(r, t))
        mu = rng.binomial(remaining, min(prob, 1.0))
        mask = (cols[None, :] >= filled[:, None]) & (cols[None, :] < (filled + mu)[:, None])
        top[mask] = r
        filled += mu
        remaining -= mu
        r -= 1
    return top


def _invert_tail(r0: int, t: float, u: float) -> int:
    # smallest r > r0 with Pbar_r(t) <= (1 - u) Pbar_r0(t)
    target = np.log1p(-u) + log_poisson_sf(r0, t)
    r = r0 + 1
    while log_poisson_sf(r, t) > target:
        r += 1
    return r


def r_arrival_times(
    params: ModelParams, r: int, window: tuple[float, float], seed: int | None = None
) -> np.ndarray:
    """Times in ``(a, b]`` at which one of Poisson(n) boxes receives its r-th ball, sorted."""
    if r < 1:
        raise ValueError("r must be positive")
    a, b = window
    if b < a:
        raise ValueError("empty window")
    rng = _rng.generator(_rng.as_seed(seed), 4)
    times = rng.gamma(r, size=rng.poisson(params.n))
    return np.sort(times[(times > a) & (times <= b)])
