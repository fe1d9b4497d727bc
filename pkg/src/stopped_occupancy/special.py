"""Poisson probabilities on the log scale, and the complex log-Gamma function.

Notation: ``p_r(t)`` is the Poisson(t) point probability at ``r``,
``P_r(t)`` its distribution function and ``Pbar_r(t) = 1 - P_r(t)``.
The cumulative functions are regularized incomplete Gamma functions,
``P_r(t) = Q(r + 1, t)`` and ``Pbar_r(t) = P(r + 1, t)``; each is evaluated
by a power series when ``t < r + 1`` and by a continued fraction otherwise,
so whichever of the two is small is computed directly and never as one
minus something close to one.

All scalar kernels are numba ufuncs, so every public function broadcasts
over numpy arrays.
"""
from __future__ import annotations

import cmath
import math

import numba as nb
import numpy as np

__all__ = [
    "log_poisson_pmf",
    "poisson_pmf",
    "log_poisson_cdf",
    "log_poisson_sf",
    "poisson_cdf",
    "poisson_sf",
    "log_pmf_expansion",
    "complex_log_gamma",
    "ConvergenceError",
]

MAX_ITER = 500
EPS = 1e-15
_FPMIN = 1e-300
_E = 2.71828182845904523536


class ConvergenceError(ArithmeticError):
    """An iterative special-function evaluation did not converge."""


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------


# log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 1..15
_STIRLERR = np.array(
    [
        0.0,
        0.08106146679532725822,
        0.041340695955409294094,
        0.027677925684998339149,
        0.020790672103765093112,
        0.016644691189821192163,
        0.013876128823070747999,
        0.011896709945891770095,
        0.010411265261972096497,
        0.0092554621827127329177,
        0.0083305634333628712565,
        0.007573675487951840795,
        0.0069428401072095298657,
        0.0064089941880042070684,
        0.0059513701127588477356,
        0.005554733551962801371,
    ]
)


@nb.njit(cache=True)
def _stirlerr(n):
    if n <= 15.0:
        return _STIRLERR[int(n)]
    nn = n * n
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - (1.0 / 1188) / nn) / nn) / nn) / nn) / n


@nb.njit(cache=True)
def _bd0(x, mu):
    """``x log(x/mu) + mu - x`` without cancellation when x is near mu."""
    if abs(x - mu) < 0.1 * (x + mu):
        v = (x - mu) / (x + mu)
        s = (x - mu) * v
        ej = 2.0 * x * v
        v = v * v
        j = 1
        while True:
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * (math.log(x) - math.log(mu)) + mu - x


@nb.njit(cache=True)
def _log_pmf(r, t):
    # saddle-point form (Loader 2000); avoids cancelling -t, r log t and log r!
    if t == 0.0:
        return 0.0 if r == 0.0 else -np.inf
    if r == 0.0:
        return -t
    return -_stirlerr(r) - _bd0(r, t) - 0.5 * math.log(2.0 * math.pi * r)


@nb.njit(cache=True)
def _log_lower_series(a, x):
    """log P(a, x) by the power series.  NaN if it fails to converge."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * EPS:
            return _log_pmf(a - 1.0, x) + math.log(x) + math.log(total)
    return np.nan


@nb.njit(cache=True)
def _log_upper_cf(a, x):
    """log Q(a, x) by the modified Lentz continued fraction.  NaN on failure."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return _log_pmf(a - 1.0, x) + math.log(x) + math.log(h)
    return np.nan


@nb.njit(cache=True)
def _log_sf(r, t):
    if t == 0.0:
        return -np.inf
    a = r + 1.0
    if t < a:
        return _log_lower_series(a, t)
    return math.log1p(-math.exp(_log_upper_cf(a, t)))


@nb.njit(cache=True)
def _log_cdf(r, t):
    if t == 0.0:
        return 0.0
    a = r + 1.0
    if t < a:
        return math.log1p(-math.exp(_log_lower_series(a, t)))
    return _log_upper_cf(a, t)


_v_log_pmf = nb.vectorize(["float64(float64, float64)"], cache=True)(_log_pmf)
_v_log_sf = nb.vectorize(["float64(float64, float64)"], cache=True)(_log_sf)
_v_log_cdf = nb.vectorize(["float64(float64, float64)"], cache=True)(_log_cdf)


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------


def _check_args(r, t):
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(r < 0) or np.any(np.floor(r) != r):
        raise ValueError("r must be a nonnegative integer")
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("t must be nonnegative")
    return r, t


def _finish(out, name):
    if np.any(np.isnan(out)):
        raise ConvergenceError(f"{name}: incomplete Gamma evaluation did not converge in {MAX_ITER} iterations")
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def log_poisson_pmf(r, t):
    """``log p_r(t) = -t + r log t - log r!``; exact zeros map to ``-inf``."""
    r, t = _check_args(r, t)
    return _finish(_v_log_pmf(r, t), "log_poisson_pmf")


def poisson_pmf(r, t):
    return np.exp(log_poisson_pmf(r, t))


def log_poisson_cdf(r, t):
    """``log P_r(t)``, accurate far into the left tail of Poisson(t)."""
    r, t = _check_args(r, t)
    return _finish(_v_log_cdf(r, t), "log_poisson_cdf")


def log_poisson_sf(r, t):
    """``log Pbar_r(t) = log P[Poisson(t) > r]``, accurate in the right tail."""
    r, t = _check_args(r, t)
    return _finish(_v_log_sf(r, t), "log_poisson_sf")


def poisson_cdf(r, t):
    """``P_r(t) = P[Poisson(t) <= r]``.

    Examples
    --------
    >>> round(float(poisson_cdf(5, 10.0)), 7)
    0.067086
    """
    return np.exp(log_poisson_cdf(r, t))


def poisson_sf(r, t):
    """``Pbar_r(t) = P[Poisson(t) > r]``."""
    return np.exp(log_poisson_sf(r, t))


def log_pmf_expansion(L: float, u: float, v: float) -> float:
    """Bivariate expansion of ``log p_r(t)`` without its error term.

    Here ``t = L + m log L + u`` and ``r = eL + ((e-1)m - 1/2) log L + v``;
    the expansion is uniform for ``u/L + 1 >= 0.01`` and ``|eu - v| <= 10 sqrt(L)``,
    and either violation raises ``ValueError``.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if u / L + 1.0 < 0.01:
        raise ValueError(f"u={u} too negative for L={L}")
    if abs(_E * u - v) > 10.0 * math.sqrt(L):
        raise ValueError(f"|e*u - v| = {abs(_E * u - v):.3g} exceeds 10*sqrt(L)")
    eL = _E * L
    return (
        -L
        + (_E - 1.0) * u
        - v
        - 0.5 * math.log(2.0 * math.pi * _E)
        - 0.5 * math.log1p(v / eL)
        - (_E * u - v) ** 2 / (2.0 * (eL + v))
    )


# Lanczos approximation, g = 7, nine coefficients
_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    w = z - 1.0
    acc = np.full_like(w, _LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def complex_log_gamma(z):
    """Log-Gamma for complex arguments.

    For ``Re z >= 1/2`` this is the branch continuous in the right half-plane.
    Reflection ``Gamma(z) Gamma(1-z) = pi / sin(pi z)`` handles ``Re z < 1/2``;
    there the imaginary part is only determined modulo ``2 pi``.
    Accepts scalars or arrays; raises ``ValueError`` at the poles.
    """
    z = np.asarray(z, dtype=complex)
    if np.any((z.imag == 0) & (z.real <= 0) & (np.floor(z.real) == z.real)):
        raise ValueError("log Gamma has a pole at nonpositive integers")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_log_gamma(z[right])
    if np.any(~right):
        zl = z[~right]
        log_sin = np.array([cmath.log(cmath.sin(math.pi * x)) for x in zl.ravel()]).reshape(zl.shape)
        out[~right] = math.log(math.pi) - log_sin - _lanczos_log_gamma(1.0 - zl)
    return out[()] if out.ndim == 0 else out
