"""Exponential integral ``E_1`` and its inverse.

``E_1(x) = int_x^inf exp(-u)/u du`` is the tail ``nu(x, inf)`` of the Gamma
subordinator's Levy measure.
"""

import numpy as np

from ._numerics import ParameterError

__all__ = ["e1", "log_e1", "e1_inverse"]

EULER_GAMMA = 0.57721566490153286061
_TINY = 1e-300


def _series(x):
    # -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!), used for 0 < x <= 1
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = term * (-x) / k
        total = total - term / k
    return -EULER_GAMMA - np.log(x) + total


def _log_cf(x):
    # modified Lentz evaluation of exp(x) E_1(x), valid for x > 1
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, 1000):
        an = -float(i * i)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > 1e-16
        if not active.any():
            break
    return np.log(h) - x


def log_e1(x):
    """``log E_1(x)`` for ``x > 0``, safe where ``E_1`` underflows."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterError("E1 is defined here for x > 0 only")
    out = np.empty_like(x)
    small = x <= 1.0
    if small.any():
        out[small] = np.log(_series(x[small]))
    if (~small).any():
        out[~small] = _log_cf(x[~small])
    return out if out.ndim else float(out)


def e1(x):
    """Exponential integral ``E_1(x)``: power series on ``(0, 1]``, continued
    fraction beyond."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterError("E1 is defined here for x > 0 only")
    out = np.empty_like(x)
    small = x <= 1.0
    if small.any():
        out[small] = _series(x[small])
    if (~small).any():
        out[~small] = np.exp(_log_cf(x[~small]))
    return out if out.ndim else float(out)


def e1_inverse(u, maxiter=200):
    """Solve ``E_1(x) = u`` for ``x``.

    Newton's method on ``t = log x`` against ``log E_1``, safeguarded by a
    bracket that falls back to bisection whenever a step leaves it.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any(u <= 0) or not np.all(np.isfinite(u)):
        raise ParameterError("E1 inverse needs finite u > 0")
    # beyond E_1(smallest normal) the root underflows; 0 is correctly rounded
    under = u > _U_MAX
    u = np.where(under, 1.0, u)
    logu = np.log(u)
    # seeds: E_1(x) ~ exp(-x)/x for large x, ~ -gamma - log x for small x
    big = -logu
    seed_large = np.maximum(big - np.log(np.maximum(big, 1.0)), 1e-3)
    seed_small = np.exp(-EULER_GAMMA - u)
    x0 = np.where(u < 0.2, seed_large, seed_small)
    t = np.log(x0)
    lo = np.full_like(t, -800.0)
    hi = np.full_like(t, 7.0)
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(maxiter):
        x = np.exp(t)
        le = log_e1(x)
        g = le - logu
        # g is decreasing in t
        lo = np.where(g > 0, np.maximum(lo, t), lo)
        hi = np.where(g < 0, np.minimum(hi, t), hi)
        dg = -np.exp(-x - le)
        step = g / dg
        tn = t - step
        outside = (tn <= lo) | (tn >= hi) | ~np.isfinite(tn)
        tn = np.where(outside, 0.5 * (lo + hi), tn)
        newly = np.abs(tn - t) <= 1e-15 * np.maximum(1.0, np.abs(t))
        t = np.where(done, t, tn)
        done |= newly
        if done.all():
            break
    else:
        raise ArithmeticError("E1 inverse did not converge")
    x = np.where(under, 0.0, np.exp(t))
    return float(x[0]) if scalar else x


_U_MAX = float(_series(np.array(np.finfo(float).tiny)))
