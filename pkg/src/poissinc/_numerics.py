"""Small numerical kernels shared across modules."""

import numba as nb
import numpy as np

__all__ = ["compensated_cumsum", "neumaier_prefix", "compensated_sum", "loglog_slope",
           "gl_panels", "ParameterError", "QuadratureError"]


class ParameterError(ValueError):
    """A parameter lies outside its admissible domain."""


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


@nb.njit(cache=True)
def _neumaier_cumsum(x):
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


@nb.njit(cache=True)
def neumaier_prefix(x, s, c):
    """Prefix sums of ``x`` continuing from running sum ``s`` and compensation ``c``.

    Returns ``(prefix, s, c)`` with the updated state.
    """
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out, s, c


def compensated_cumsum(x):
    """Prefix sums with Neumaier compensation (real or complex input)."""
    x = np.asarray(x)
    if x.size == 0:
        return x.astype(float if not np.iscomplexobj(x) else complex)
    if np.iscomplexobj(x):
        re = _neumaier_cumsum(np.ascontiguousarray(x.real, dtype=np.float64))
        im = _neumaier_cumsum(np.ascontiguousarray(x.imag, dtype=np.float64))
        return re + 1j * im
    return _neumaier_cumsum(np.ascontiguousarray(x, dtype=np.float64))


def compensated_sum(x):
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    return compensated_cumsum(x)[-1]


def loglog_slope(x, y):
    """OLS slope of log(y) against log(x)."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


_GL_CACHE = {}


def _gl(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def gl_panels(f, lo, hi, width, order=20):
    """Composite Gauss-Legendre integral of ``f`` over ``[lo, hi]``.

    Panels have width at most ``width``. ``f`` must accept arrays.
    """
    if hi <= lo:
        return 0.0
    npan = max(1, int(np.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, npan + 1)
    x, w = _gl(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return compensated_sum((vals * w[None, :]).sum(axis=1) * half)
