"""One-sided Levy measures: exponents, tails, modulars and LePage series.

Three models are supported:

``poisson_unit``
    ``nu = delta_1``; ``psi_r = 1 - cos``, ``psi_i = sin``, ``G = H = 1_[0,1]``.
``stable``
    ``nu(dx) = alpha x^(-alpha-1) dx`` with ``0 < alpha < 1``;
    ``psi_r = Gamma(1-alpha) cos(alpha pi/2) |theta|^alpha`` and
    ``psi_i = Gamma(1-alpha) sin(alpha pi/2) sign(theta) |theta|^alpha``.
``gamma_unit``
    ``nu(dx) = exp(-x)/x dx``; ``psi_r = log(1+theta^2)/2``,
    ``psi_i = arctan(theta)``, ``G = E_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special as sp

from ._numerics import ParameterError, compensated_cumsum
from ._parse import format_call, parse_call
from .distributions import marker_sample
from .improper import dyadic_tail_integral
from .series import SeriesEvaluation
from .special import e1, e1_inverse

__all__ = ["LevyModel", "psi", "psi_quadrature", "tail_and_inverse", "modulars",
           "lepage_evaluate", "parse_levy", "lepage_cover", "sample_lepage_values"]

_KINDS = ("poisson_unit", "stable", "gamma_unit")


@dataclass(frozen=True)
class LevyModel:
    kind: str
    alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown Levy model {self.kind!r}")
        if self.kind == "stable" and not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"stable index must lie in (0, 1), got {self.alpha}")

    @classmethod
    def poisson_unit(cls):
        return cls("poisson_unit")

    @classmethod
    def stable(cls, alpha):
        return cls("stable", float(alpha))

    @classmethod
    def gamma_unit(cls):
        return cls("gamma_unit")

    @property
    def c_alpha(self):
        return sp.gamma(1.0 - self.alpha) * math.cos(self.alpha * math.pi / 2)

    @property
    def s_alpha(self):
        return sp.gamma(1.0 - self.alpha) * math.sin(self.alpha * math.pi / 2)

    def psi(self, theta):
        """``(psi_r(theta), psi_i(theta))``."""
        t = np.asarray(theta, dtype=float)
        if self.kind == "poisson_unit":
            return 1.0 - np.cos(t), np.sin(t)
        if self.kind == "stable":
            a = np.abs(t) ** self.alpha
            return self.c_alpha * a, self.s_alpha * np.sign(t) * a
        return 0.5 * np.log1p(t * t), np.arctan(t)

    def laplace_exponent(self, theta):
        """``psi(theta) = int (1 - exp(-theta x)) nu(dx)`` for ``theta >= 0``."""
        t = np.asarray(theta, dtype=float)
        if self.kind == "poisson_unit":
            return -np.expm1(-t)
        if self.kind == "stable":
            return sp.gamma(1.0 - self.alpha) * t ** self.alpha
        return np.log1p(t)

    def tail(self, x):
        """``G(x) = nu(x, inf)``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ParameterError("G needs x >= 0")
        if self.kind == "poisson_unit":
            return (x <= 1.0).astype(float)
        with np.errstate(divide="ignore"):
            if self.kind == "stable":
                return x ** (-self.alpha)
        out = np.full(x.shape, np.inf)
        pos = x > 0
        out[pos] = e1(x[pos])
        return out if out.ndim else float(out)

    def inverse_tail(self, u):
        """``H = G^{-1}``; for ``poisson_unit`` the indicator ``1_[0,1]``."""
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0):
            raise ParameterError("H needs u > 0")
        if self.kind == "poisson_unit":
            return (u <= 1.0).astype(float)
        if self.kind == "stable":
            with np.errstate(over="ignore"):
                return u ** (-1.0 / self.alpha)
        return e1_inverse(u)

    def moment_below(self, y, order=2):
        """``int_0^y x^order nu(dx)`` for ``order`` in {1, 2}."""
        y = np.asarray(y, dtype=float)
        if self.kind == "poisson_unit":
            return (y >= 1.0).astype(float)
        if self.kind == "stable":
            a = self.alpha
            return a * y ** (order - a) / (order - a)
        # int_0^y x^(order-1) e^-x dx = lower incomplete gamma
        return sp.gammainc(order, y) * sp.gamma(order)

    def density(self, x):
        if self.kind == "poisson_unit":
            raise ParameterError("delta_1 has no density")
        x = np.asarray(x, dtype=float)
        if self.kind == "stable":
            return self.alpha * x ** (-self.alpha - 1.0)
        return np.exp(-x) / x

    def __str__(self):
        if self.kind == "stable":
            return format_call("stable", {"alpha": self.alpha})
        return self.kind


def parse_levy(text):
    name, params = parse_call(text)
    if name == "stable":
        return LevyModel.stable(params.get("alpha", 0.5))
    if name in ("poisson_unit", "gamma_unit") and not params:
        return LevyModel(name)
    raise ParameterError(f"cannot build Levy model from {text!r}")


def psi(model, theta):
    return model.psi(theta)


def psi_quadrature(model, theta):
    """``(psi_r, psi_i)`` by direct quadrature of the defining integrals.

    Independent of the closed forms; used to arbitrate the constants.
    """
    if model.kind == "poisson_unit":
        return 1.0 - math.cos(theta), math.sin(theta)
    if theta == 0:
        return 0.0, 0.0
    w = abs(theta)
    nu = model.density
    # near 0 the integrands are O(x^2) and O(x) times nu; split at 1/w
    b = 1.0 / w
    head_r = integrate.quad(lambda x: (1 - np.cos(w * x)) * nu(x), 0, b, limit=200)[0]
    head_i = integrate.quad(lambda x: np.sin(w * x) * nu(x), 0, b, limit=200)[0]
    tail_mass = integrate.quad(nu, b, np.inf)[0]
    tail_c = integrate.quad(nu, b, np.inf, weight="cos", wvar=w, limlst=200)[0]
    tail_s = integrate.quad(nu, b, np.inf, weight="sin", wvar=w, limlst=200)[0]
    return head_r + tail_mass - tail_c, math.copysign(head_i + tail_s, theta)


def tail_and_inverse(model, x=None, u=None):
    """``G(x)`` when ``x`` is given, ``H(u)`` when ``u`` is given."""
    if (x is None) == (u is None):
        raise ValueError("pass exactly one of x or u")
    if x is not None:
        return model.tail(x)
    return model.inverse_tail(u)


def _inner_psi2(model, y):
    # int (x^2 y^2 ^ 1) nu(dx)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    yp = y[pos]
    if model.kind == "poisson_unit":
        out[pos] = np.minimum(yp * yp, 1.0)
    elif model.kind == "stable":
        out[pos] = yp ** model.alpha * 2.0 / (2.0 - model.alpha)
    else:
        out[pos] = yp * yp * model.moment_below(1.0 / yp, 2) + e1(1.0 / yp)
    return out


def _inner_psi1(model, y):
    # int (x y ^ 1) nu(dx)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    yp = y[pos]
    if model.kind == "poisson_unit":
        out[pos] = np.minimum(yp, 1.0)
    elif model.kind == "stable":
        out[pos] = yp ** model.alpha / (1.0 - model.alpha)
    else:
        out[pos] = yp * model.moment_below(1.0 / yp, 1) + e1(1.0 / yp)
    return out


def modulars(f, model, jmax=16):
    """``(Psi_1(f), Psi_2(f))`` as :class:`~poissinc.improper.DyadicResult` pairs.

    ``Psi_2(f) = int int (x^2 f(t)^2 ^ 1) nu(dx) dt``, ``Psi_1`` likewise with
    ``|x f(t)| ^ 1``. The inner integrals are closed forms per model; the
    outer one runs over dyadic windows with divergence detection, so a
    divergent modular has ``value == inf``.
    """
    breaks = tuple(getattr(f, "breakpoints", ()))
    support = getattr(f, "support", (0.0, math.inf))

    def outer(inner):
        def g(t):
            t = np.asarray(t, dtype=float)
            inside = (t >= support[0]) & (t <= support[1])
            return np.where(inside, inner(model, np.abs(f(t))), 0.0)
        return dyadic_tail_integral(g, jmax=jmax, breaks=breaks)

    return outer(_inner_psi1), outer(_inner_psi2)


def lepage_evaluate(model, marker, f, arrivals, marker_stream, N):
    """Partial sums of ``sum_n H(S_n p(V_n)) f(V_n)``.

    Markers ``V_n`` come from ``marker_stream``; the arrivals are extended to
    ``N`` if needed. ``extras`` carries ``H`` and ``V``.
    """
    if N == 0:
        return SeriesEvaluation("lepage", np.zeros(0))
    if N > len(arrivals):
        arrivals.extend(N)
    S = arrivals.arrivals[:N]
    V = marker_sample(marker, N, marker_stream)
    H = model.inverse_tail(S * marker.pdf(V))
    terms = H * f(V)
    ev = SeriesEvaluation("lepage", compensated_cumsum(terms))
    ev.extras.update(H=H, V=V)
    return ev


MARKER_PATH = 2 ** 32 - 1


def lepage_cover(model, marker, f):
    """Arrival horizon past which every LePage term vanishes, or ``None``.

    Holds for ``poisson_unit`` with a decreasing marker and compactly
    supported ``f``: ``H(S p(V)) = 0`` once ``S p(V) > 1``, and on the
    support ``p(V) >= p(hi)``.
    """
    hi = getattr(f, "support", (0.0, math.inf))[1]
    if model.kind != "poisson_unit" or not marker.decreasing or not math.isfinite(hi):
        return None
    p_hi = float(marker.pdf(np.array(max(hi, marker.support[0]))))
    return 1.0 / p_hi if p_hi > 0 else None


def sample_lepage_values(model, marker, f, replicates, seed, N=None,
                         experiment="lepage", workers=1):
    """Replicates of the LePage sum ``Xf``.

    Arrivals are unit-rate Poisson. Markers come from a child stream of the
    replicate stream. Without ``N`` the sum runs to the horizon given by
    :func:`lepage_cover`.
    """
    from .distributions import DistributionSpec
    from .pointprocess import ArrivalStream
    from .rng import map_replicates

    cover = lepage_cover(model, marker, f)
    if N is None and cover is None:
        raise ParameterError("N is required unless the series terminates (poisson_unit, "
                             "decreasing marker, compact support)")
    spec = DistributionSpec.exponential(1.0)

    def one(stream):
        arr = ArrivalStream(spec, stream)
        n = N
        if n is None:
            arr.extend_past(cover)
            n = int(np.searchsorted(arr.arrivals, cover, side="right"))
        ev = lepage_evaluate(model, marker, f, arr, stream.split(MARKER_PATH), n)
        return ev.total

    return np.array(map_replicates(one, replicates, seed, experiment, workers))
