"""Exact finite-n laws: the stopping-time density and the stopped maximum.

With every box running an independent unit-rate Poisson clock, the stopping
time has density

    n C(n-1, l) P_m(t)^l Pbar_m(t)^(n-l-1) p_m(t),

and, given the stopping time ``t``, the ``n - l - 1`` boxes that already hold
more than ``m`` balls are independent Poisson(t) counts conditioned to exceed
``m``.  Hence

    P[M_n <= r] = E[(1 - Pbar_r(tau) / Pbar_m(tau))^(n-l-1)],   r > m.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .sim import ModelParams
from .special import _v_log_cdf, _v_log_pmf, _v_log_sf, poisson_cdf
from .stats import LatticePMF

__all__ = ["stopping_time_pdf", "stopping_time_cdf", "stopped_max_cdf", "stopped_max_pmf", "stopping_window"]

_E = 2.71828182845904523536


def _log_pdf(params: ModelParams, t: np.ndarray) -> np.ndarray:
    n, m, ell = params.n, params.m, params.ell
    t = np.asarray(t, dtype=float)
    mm = np.full_like(t, float(m))
    out = math.log(n) + gammaln(n) - gammaln(ell + 1) - gammaln(n - ell) + _v_log_pmf(mm, t)
    # skip zero powers so that 0 * (-inf) never appears
    if ell > 0:
        out = out + ell * _v_log_cdf(mm, t)
    if n - ell - 1 > 0:
        out = out + (n - ell - 1) * _v_log_sf(mm, t)
    return out


def stopping_time_pdf(params: ModelParams, t):
    """Density of the poissonized stopping time at ``t >= 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = np.exp(_log_pdf(params, t))
    if np.any(np.isnan(out)):
        raise ArithmeticError("stopping-time density evaluation failed")
    return out[()] if out.ndim == 0 else out


def stopping_time_cdf(params: ModelParams, t):
    """``P[tau <= t]``: at most ``l`` boxes still hold ``m`` or fewer balls at time ``t``."""
    t = np.asarray(t, dtype=float)
    out = binom.cdf(params.ell, params.n, poisson_cdf(params.m, t))
    return out[()] if np.ndim(out) == 0 else out


def _stopping_tail_mass(params: ModelParams, a: float, b: float) -> float:
    left = stopping_time_cdf(params, a) if a > 0 else 0.0
    right = binom.sf(params.ell, params.n, poisson_cdf(params.m, b))
    right = max(float(right), 0.0)
    return float(left) + right


def _alpha(n: int, m: int) -> float:
    L = math.log(n)
    return L + m * math.log(max(L, 1.0)) - math.lgamma(m + 1)


def stopping_window(params: ModelParams, tol: float) -> tuple[float, float]:
    """Interval in ``t`` carrying all but ``tol`` of the stopping-time mass."""
    alpha = _alpha(params.n, params.m)
    if params.n >= 10:
        a, b = max(alpha - 30.0, 0.0), alpha + 40.0
    else:
        a, b = 0.0, max(alpha, 0.0) + 60.0
    for _ in range(20):
        if _stopping_tail_mass(params, a, b) < tol:
            return a, b
        a, b = max(a - 10.0, 0.0), b + 10.0
    raise ArithmeticError("could not find a stopping-time window with negligible excluded mass")


def stopped_max_cdf(params: ModelParams, r: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``P[M_n <= r]`` for the stopped maximum, by quadrature of the mixture formula."""
    n, m, ell = params.n, params.m, params.ell
    r = int(r)
    if r <= m:
        return 0.0
    power = n - ell - 1
    if power == 0:
        # only the box that triggered the stop holds more than m balls, and it holds m+1
        return 1.0
    a, b = spec.window if spec.window is not None else stopping_window(params, spec.abs_tol / 10)
    rr = float(r)
    mm = float(m)

    def integrand(t):
        log_ratio = _v_log_sf(np.full_like(t, rr), t) - _v_log_sf(np.full_like(t, mm), t)
        ratio = np.where(t > 0, np.exp(np.where(t > 0, log_ratio, -np.inf)), 0.0)
        with np.errstate(divide="ignore"):
            return np.exp(power * np.log1p(-ratio) + _log_pdf(params, t))

    value, _ = integrate(integrand, a, b, spec.abs_tol, spec.rel_tol, spec.max_panels, initial_panels=32)
    return min(max(value, 0.0), 1.0)


def _default_hi(params: ModelParams) -> int:
    if params.n >= 3:
        L = math.log(params.n)
        m = params.m
        b_tilde = (
            _E * L
            + ((_E - 1) * m - 0.5) * math.log(L)
            - (math.log(_E - 1) + (_E - 1) * math.lgamma(m + 1) + 0.5 * math.log(2 * math.pi * _E))
        )
        return max(math.floor(b_tilde), params.m + 1) + 60
    return params.m + 61


def stopped_max_pmf(
    params: ModelParams, window: tuple[int, int] | None = None, spec: QuadratureSpec = DEFAULT_SPEC
) -> LatticePMF:
    """Law of the stopped maximum on the integer window ``[lo, hi]``.

    The default window is ``[m + 1, b_n + 60]``.  Differences are clipped at
    zero; a total mass below ``1 - 1e-6`` raises ``ValueError``.
    """
    m = params.m
    lo, hi = window if window is not None else (m + 1, _default_hi(params))
    lo = max(int(lo), m + 1)
    hi = int(hi)
    if hi < lo:
        raise ValueError("empty window")
    cdf = np.array([stopped_max_cdf(params, r, spec) for r in range(lo - 1, hi + 1)])
    probs = np.clip(np.diff(cdf), 0.0, None)
    total = probs.sum()
    if total < 1 - 1e-6:
        raise ValueError(f"window [{lo}, {hi}] holds only {total:.3g} of the mass")
    if total < 1 - 1e-8:
        warnings.warn(f"stopped maximum mass in window is {total:.10f}; renormalizing", RuntimeWarning, stacklevel=2)
    return LatticePMF(lo, probs / probs.sum())
