"""Large-n approximations for the stopped maximum and its multiplicity.

For fixed ``(m, l)`` the stopped maximum behaves like ``b_n + Z`` with

    Z = ceil(xi + (e - 1) tau + c_n),

where ``xi`` is standard Gumbel, ``tau`` is Gumbel(l+1) and ``c_n`` is the
fractional part of the real centering ``b_tilde_n``.  The i-th largest count
replaces ``xi`` by the i-th atom of the exponential Poisson process.

Moments and the multiplicity law are periodic in ``c_n`` and are expanded
in Fourier series whose coefficients are products of complex Gamma values.
Those coefficients are of order 1e-10 already at the first harmonic and
decay like ``exp(-e pi^2 |k|)``, so three harmonics are kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import gamma as gamma_dist

from ._rng import generator
from .quadrature import integrate
from .special import _v_log_cdf, _v_log_pmf, _v_log_sf, complex_log_gamma
from .stats import LatticePMF

__all__ = [
    "EULER_GAMMA",
    "E",
    "AsymptoticConstants",
    "GumbelSpec",
    "constants",
    "gumbel_cdf",
    "gumbel_pdf",
    "sample_gumbel",
    "zn_cdf",
    "zn_pmf",
    "zn_pmf_at",
    "sample_topk_approx",
    "fourier_coefficient",
    "mean_zn",
    "expected_mn",
    "multiplicity_pmf",
    "multiplicity_fourier_coefficient",
    "multiplicity_pmf_direct",
    "lattice_multiplicity",
    "joint_max_multiplicity",
    "joint_max_multiplicity_at",
]

EULER_GAMMA = 0.57721566490153286061
E = 2.71828182845904523536

J_MAX = 200
ELL_MAX = 100_000
K_MAX = 3

# quadrature settings for the integrals over the Gumbel(l+1) variable
_ABS_TOL = 1e-13
_REL_TOL = 1e-12
_TAIL = 1e-17


@dataclass(frozen=True)
class AsymptoticConstants:
    n: int
    m: int
    L: float
    alpha_n: float
    b_tilde_n: float
    b_n: int
    c_n: float


@dataclass(frozen=True)
class GumbelSpec:
    """Gumbel(order) law shifted by ``shift``: cdf ``P_{order-1}(e^{-(x - shift)})``."""

    order: int = 1
    shift: float = 0.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("order must be a positive integer")


def constants(n: int, m: int = 0) -> AsymptoticConstants:
    """Centering constants for ``n >= 3`` boxes and threshold ``m``.

    >>> round(constants(10).b_tilde_n, 6)
    3.881796
    """
    if int(n) != n or n < 3:
        raise ValueError("constants need n >= 3 so that log log n > 0")
    if int(m) != m or m < 0:
        raise ValueError("m must be a nonnegative integer")
    L = math.log(n)
    log_m_fact = math.lgamma(m + 1)
    alpha = L + m * math.log(L) - log_m_fact
    b_tilde = (
        E * L
        + ((E - 1) * m - 0.5) * math.log(L)
        - (math.log(E - 1) + (E - 1) * log_m_fact + 0.5 * math.log(2 * math.pi * E))
    )
    b = math.floor(b_tilde)
    return AsymptoticConstants(int(n), int(m), L, alpha, b_tilde, b, b_tilde - b)


def _harmonic(k: int) -> float:
    return math.fsum(1.0 / i for i in range(1, k + 1))


def _check_j_ell(j: int, ell: int) -> None:
    if int(j) != j or not 1 <= j <= J_MAX:
        raise ValueError(f"j must be an integer in [1, {J_MAX}]")
    if int(ell) != ell or not 0 <= ell <= ELL_MAX:
        raise ValueError(f"ell must be an integer in [0, {ELL_MAX}]")


# ---------------------------------------------------------------------------
# Gumbel family
# ---------------------------------------------------------------------------


def gumbel_cdf(spec: GumbelSpec, x):
    y = np.minimum(-(np.asarray(x, dtype=float) - spec.shift), 700.0)
    out = np.exp(_v_log_cdf(np.full_like(y, spec.order - 1.0), np.exp(y)))
    return out[()] if out.ndim == 0 else out


def gumbel_pdf(spec: GumbelSpec, x):
    y = np.minimum(-(np.asarray(x, dtype=float) - spec.shift), 700.0)
    out = np.exp(_v_log_pmf(np.full_like(y, spec.order - 1.0), np.exp(y)) + y)
    return out[()] if out.ndim == 0 else out


def sample_gumbel(spec: GumbelSpec, seed: int | None = None, size: int | None = None):
    """``-log(E_1 + ... + E_order) + shift``; the exponential sum is drawn as one Gamma variate."""
    rng = generator(seed, 101, spec.order)
    g = rng.gamma(spec.order, size=size)
    return -np.log(g) + spec.shift


def _log_gumbel_density(ell: int, s: np.ndarray) -> np.ndarray:
    # log of e^{-s} p_l(e^{-s})
    return _v_log_pmf(np.full_like(s, float(ell)), np.exp(-s)) - s


def _gumbel_window(ell: int) -> tuple[float, float]:
    # Gumbel(l+1) is -log Gamma(l+1); both tails beyond the window carry < _TAIL
    lo = -math.log(gamma_dist.isf(_TAIL, ell + 1))
    hi = -math.log(gamma_dist.ppf(_TAIL, ell + 1))
    return lo, hi


def _gumbel_expectation(log_f, ell: int) -> float:
    """``E[exp(log_f(tau))]`` for ``tau ~ Gumbel(l+1)``."""
    lo, hi = _gumbel_window(ell)

    def integrand(s):
        return np.exp(log_f(s) + _log_gumbel_density(ell, s))

    value, _ = integrate(integrand, lo, hi, _ABS_TOL, _REL_TOL, initial_panels=64)
    return value


# ---------------------------------------------------------------------------
# the approximating law Z
# ---------------------------------------------------------------------------


def zn_cdf(c: float, ell: int, k: int, order: int = 1) -> float:
    """``P[ceil(xi_order + (e-1) tau + c) <= k]`` with ``tau ~ Gumbel(l+1)``."""
    _check_j_ell(order, ell)
    r = float(order - 1)

    def log_f(s):
        x = np.exp(np.minimum((E - 1) * s + c - k, 700.0))
        return _v_log_cdf(np.full_like(x, r), x)

    return _gumbel_expectation(log_f, ell)


def _zn_sf(c: float, ell: int, k: int, order: int) -> float:
    r = float(order - 1)

    def log_f(s):
        x = np.exp(np.minimum((E - 1) * s + c - k, 700.0))
        with np.errstate(divide="ignore"):
            return _v_log_sf(np.full_like(x, r), x)

    return _gumbel_expectation(log_f, ell)


def zn_pmf_at(c: float, ell: int, window: tuple[int, int] | None = None, order: int = 1, tail: float = 1e-13) -> LatticePMF:
    """Law of ``ceil(xi_order + (e-1) tau + c)`` for any real offset ``c``.

    Without ``window`` the support is grown from the mean until both tails
    fall below ``tail``.  A supplied window must leave out less than 1e-10.
    """
    _check_j_ell(order, ell)
    if window is None:
        k0 = int(round(mean_zn(order, ell, c - math.floor(c)) + math.floor(c)))
        lo = k0
        while zn_cdf(c, ell, lo - 1, order) >= tail:
            lo -= 1
        hi = k0
        while _zn_sf(c, ell, hi, order) >= tail:
            hi += 1
    else:
        lo, hi = int(window[0]), int(window[1])
        if hi < lo:
            raise ValueError("empty window")
        left = zn_cdf(c, ell, lo - 1, order)
        right = _zn_sf(c, ell, hi, order)
        if left > 1e-10 or right > 1e-10:
            raise ValueError(f"window [{lo}, {hi}] leaves out mass {left:.3g} (left) and {right:.3g} (right)")
    cdf = np.array([zn_cdf(c, ell, k, order) for k in range(lo - 1, hi + 1)])
    probs = np.clip(np.diff(cdf), 0.0, None)
    return LatticePMF(lo, probs / probs.sum())


def zn_pmf(consts: AsymptoticConstants, ell: int, window: tuple[int, int] | None = None, order: int = 1) -> LatticePMF:
    """Approximating law of ``M_{n,order} - b_n``."""
    return zn_pmf_at(consts.c_n, ell, window, order)


def sample_topk_approx(
    consts: AsymptoticConstants, ell: int, K: int, seed: int | None = None, size: int | None = None
) -> np.ndarray:
    """Draw ``(ceil(xi_i + (e-1) tau + c_n))_{i <= K}``, nonincreasing in ``i``.

    Returns shape ``(K,)`` or ``(size, K)``.
    """
    if K < 1:
        raise ValueError("K must be positive")
    rng = generator(seed, 102, ell, K)
    reps = 1 if size is None else int(size)
    tau = -np.log(rng.gamma(ell + 1, size=reps))
    xi = -np.log(np.cumsum(rng.standard_exponential((reps, K)), axis=1))
    out = np.ceil(xi + (E - 1) * tau[:, None] + consts.c_n).astype(np.int64)
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# Fourier series: moments and multiplicity
# ---------------------------------------------------------------------------


def fourier_coefficient(j: int, ell: int, k):
    """``Gamma(j - 2 pi i k) Gamma(l + 1 - 2 pi (e-1) i k) / ((j-1)! l!)``."""
    _check_j_ell(j, ell)
    k = np.asarray(k, dtype=float)
    w = 2 * math.pi * k
    log_c = (
        complex_log_gamma(j - 1j * w)
        + complex_log_gamma(ell + 1 - 1j * (E - 1) * w)
        - math.lgamma(j)
        - math.lgamma(ell + 1)
    )
    return np.exp(log_c)


def _oscillation(j: int, ell: int, u: float, kmax: int, weight) -> float:
    ks = np.arange(1, kmax + 1)
    terms = fourier_coefficient(j, ell, ks) * np.exp(2j * math.pi * ks * u) * weight(ks)
    # the -k term is the conjugate of the k term
    return float(2.0 * np.sum(terms.real))


def mean_zn(j: int, ell: int, c: float, kmax: int = K_MAX) -> float:
    """Mean of ``ceil(xi_j + (e-1) tau + c)`` with ``tau ~ Gumbel(l+1)``.

    >>> round(mean_zn(1, 0, 0.0), 6)
    2.069035
    """
    _check_j_ell(j, ell)
    base = EULER_GAMMA * E - _harmonic(j - 1) - (E - 1) * _harmonic(ell) + 0.5 + c
    return base + _oscillation(j, ell, c, kmax, lambda ks: 1.0 / (2j * math.pi * ks))


def expected_mn(n: int, j: int = 1, m: int = 0, ell: int = 0, kmax: int = K_MAX) -> float:
    """Asymptotic mean of the j-th largest stopped count."""
    consts = constants(n, m)
    return consts.b_n + mean_zn(j, ell, consts.c_n, kmax)


def multiplicity_fourier_coefficient(j: int, ell: int, k):
    """k-th Fourier coefficient of ``u -> chi_j(u)``."""
    return (1 - math.exp(-1.0)) ** j / j * fourier_coefficient(j, ell, k)


def multiplicity_pmf(j: int, ell: int, u: float, kmax: int = K_MAX) -> float:
    """Limiting ``P[Q = j]`` at fractional offset ``u``, by its Fourier series."""
    _check_j_ell(j, ell)
    value = (1 - math.exp(-1.0)) ** j / j * (1.0 + _oscillation(j, ell, u, kmax, lambda ks: 1.0))
    return min(max(value, 0.0), 1.0)


def lattice_multiplicity(j: int, y):
    """``(1 - e^{-1})^j sum_k p_j(e^{y - k})``: multiplicity law of the top atom of the rounded process."""
    y = np.asarray(y, dtype=float)
    frac = y - np.floor(y)
    ks = np.arange(-8, 47, dtype=float)
    x = np.exp(frac[..., None] - ks)
    terms = np.exp(_v_log_pmf(np.full_like(x, float(j)), x))
    out = (1 - math.exp(-1.0)) ** j * terms.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def multiplicity_pmf_direct(j: int, ell: int, u: float) -> float:
    """``E[q_j((e-1) tau + u)]`` by quadrature, with ``q_j`` the lattice sum above."""
    _check_j_ell(j, ell)
    return _gumbel_expectation(lambda s: np.log(lattice_multiplicity(j, (E - 1) * s + u)), ell)


def joint_max_multiplicity_at(c: float, ell: int, k: int, j: int) -> float:
    """Limiting ``P[M - b_n = k, Q = j]`` at fractional offset ``c``."""
    _check_j_ell(j, ell)
    jj = float(j)

    def log_f(s):
        x = np.exp(np.minimum((E - 1) * s + c - k, 700.0))
        return -x + _v_log_pmf(np.full_like(x, jj), (E - 1) * x)

    return _gumbel_expectation(log_f, ell)


def joint_max_multiplicity(consts: AsymptoticConstants, ell: int, k: int, j: int) -> float:
    return joint_max_multiplicity_at(consts.c_n, ell, k, j)
