"""Increment laws for renewal arrivals and marker densities for LePage series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from ._numerics import ParameterError, QuadratureError
from ._parse import format_call, parse_call

__all__ = [
    "DistributionSpec", "MarkerDensity", "DegenerateError",
    "sample", "char_value", "char_value_quadrature", "cz_constant",
    "marker_sample", "parse_distribution", "parse_marker",
]


class DegenerateError(ValueError):
    """The increment law has |E exp(iX)| = 1."""


_FAMILIES = {
    "exponential": ("rate",),
    "pareto": ("index", "scale"),
    "gamma": ("shape", "rate"),
    "deterministic": ("value",),
    "uniform": ("lo", "hi"),
}

_DEFAULTS = {
    "exponential": {"rate": 1.0},
    "pareto": {"scale": 1.0},
    "gamma": {"rate": 1.0},
    "uniform": {"lo": 0.0},
}


@dataclass(frozen=True)
class DistributionSpec:
    """Law of a nonnegative increment ``X``.

    Build with the family constructors, e.g. ``DistributionSpec.exponential(1)``
    or ``parse_distribution("gamma(shape=2, rate=1)")``.
    """

    family: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ParameterError(f"unknown increment family {self.family!r}")
        p = dict(self.params)
        names = _FAMILIES[self.family]
        if set(p) != set(names):
            raise ParameterError(
                f"{self.family} needs parameters {names}, got {tuple(p)}")
        _validate(self.family, p)

    # constructors
    @classmethod
    def make(cls, family, **params):
        family = family.lower()
        full = dict(_DEFAULTS.get(family, {}))
        full.update(params)
        names = _FAMILIES.get(family)
        if names is None:
            raise ParameterError(f"unknown increment family {family!r}")
        return cls(family, tuple((k, float(full[k])) for k in names if k in full))

    @classmethod
    def exponential(cls, rate=1.0):
        return cls.make("exponential", rate=rate)

    @classmethod
    def pareto(cls, index, scale=1.0):
        return cls.make("pareto", index=index, scale=scale)

    @classmethod
    def gamma(cls, shape, rate=1.0):
        return cls.make("gamma", shape=shape, rate=rate)

    @classmethod
    def deterministic(cls, value):
        return cls.make("deterministic", value=value)

    @classmethod
    def uniform(cls, lo, hi):
        return cls.make("uniform", lo=lo, hi=hi)

    def __getitem__(self, name):
        return dict(self.params)[name]

    @property
    def nondegenerate(self):
        return self.family != "deterministic"

    @property
    def has_atom_at_zero(self):
        return False

    def mean(self):
        p = dict(self.params)
        f = self.family
        if f == "exponential":
            return 1.0 / p["rate"]
        if f == "pareto":
            return p["index"] * p["scale"] / (p["index"] - 1.0)
        if f == "gamma":
            return p["shape"] / p["rate"]
        if f == "deterministic":
            return p["value"]
        return 0.5 * (p["lo"] + p["hi"])

    def variance(self):
        p = dict(self.params)
        f = self.family
        if f == "exponential":
            return 1.0 / p["rate"] ** 2
        if f == "pareto":
            a, m = p["index"], p["scale"]
            if a <= 2:
                return math.inf
            return a * m * m / ((a - 1.0) ** 2 * (a - 2.0))
        if f == "gamma":
            return p["shape"] / p["rate"] ** 2
        if f == "deterministic":
            return 0.0
        return (p["hi"] - p["lo"]) ** 2 / 12.0

    def pdf(self, x):
        """Density of X (not defined for the deterministic family)."""
        p = dict(self.params)
        x = np.asarray(x, dtype=float)
        f = self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if f == "exponential":
                lam = p["rate"]
                return np.where(x >= 0, lam * np.exp(-lam * x), 0.0)
            if f == "pareto":
                a, m = p["index"], p["scale"]
                return np.where(x >= m, a * m ** a / x ** (a + 1.0), 0.0)
            if f == "gamma":
                k, lam = p["shape"], p["rate"]
                logp = (k * math.log(lam) + (k - 1.0) * np.log(x) - lam * x
                        - special.gammaln(k))
                return np.where(x > 0, np.exp(logp), 0.0)
            if f == "uniform":
                lo, hi = p["lo"], p["hi"]
                return np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)
        raise ParameterError("the deterministic law has no density")

    def sample(self, n, stream):
        return sample(self, n, stream)

    def __str__(self):
        return format_call(self.family, dict(self.params))


def _validate(family, p):
    def positive(name):
        if not (p[name] > 0 and math.isfinite(p[name])):
            raise ParameterError(f"{family}: {name} must be positive, got {p[name]}")

    if family == "exponential":
        positive("rate")
    elif family == "pareto":
        positive("scale")
        if not p["index"] > 1:
            raise ParameterError(f"pareto: index must exceed 1, got {p['index']}")
    elif family == "gamma":
        positive("shape")
        positive("rate")
    elif family == "deterministic":
        positive("value")
    elif family == "uniform":
        if not p["lo"] >= 0:
            raise ParameterError("uniform: lo must be nonnegative")
        if not p["hi"] > p["lo"]:
            raise ParameterError("uniform: hi must exceed lo")


def parse_distribution(text):
    name, params = parse_call(text)
    return DistributionSpec.make(name, **params)


def sample(spec, n, stream):
    """Draw ``n`` i.i.d. increments from ``spec`` using ``stream``."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    gen = stream.generator if hasattr(stream, "generator") else stream
    p = dict(spec.params)
    f = spec.family
    if f == "exponential":
        return gen.standard_exponential(n) / p["rate"]
    if f == "pareto":
        u = gen.random(n)
        return p["scale"] * (1.0 - u) ** (-1.0 / p["index"])
    if f == "gamma":
        return gen.standard_gamma(p["shape"], n) / p["rate"]
    if f == "deterministic":
        return np.full(n, p["value"])
    return gen.uniform(p["lo"], p["hi"], n)


def char_value_quadrature(spec, tol=1e-10):
    """``E exp(iX)`` by oscillatory quadrature of the density.

    The Fourier tail beyond ``lo + 10`` goes through QUADPACK's QAWF routine;
    bounded supports use the weighted finite-interval rule.
    """
    if spec.family == "deterministic":
        v = spec["value"]
        return complex(math.cos(v), math.sin(v))
    if spec.family == "uniform":
        lo, hi = spec["lo"], spec["hi"]
        pieces = [integrate.quad(spec.pdf, lo, hi, weight=w, wvar=1.0,
                                 epsabs=tol * 1e-2, full_output=1)
                  for w in ("cos", "sin")]
    else:
        lo = spec["scale"] if spec.family == "pareto" else 0.0
        pieces = []
        for trig, w in ((np.cos, "cos"), (np.sin, "sin")):
            # plain adaptive rule on a smooth head, Fourier-weighted rule on the
            # tail; QUADPACK's weighted finite-interval rule overstates its error
            head = integrate.quad(lambda x: spec.pdf(x) * trig(x), lo, lo + 10.0,
                                  epsabs=tol * 1e-3, epsrel=1e-13, limit=400)
            tail = integrate.quad(spec.pdf, lo + 10.0, np.inf, weight=w, wvar=1.0,
                                  epsabs=tol * 1e-2, limlst=200, full_output=1)
            pieces.append((head[0] + tail[0], head[1] + tail[1]))
    (re, ere), (im, eim) = pieces[0][:2], pieces[1][:2]
    err = abs(ere) + abs(eim)
    if not err <= tol:
        raise QuadratureError(
            f"E exp(iX) quadrature reached only {err:.2e} for {spec}", err)
    return complex(re, im)


def char_value(spec):
    """``z = E exp(iX)``; closed form where one exists, else quadrature."""
    p = dict(spec.params)
    f = spec.family
    if f == "exponential":
        lam = p["rate"]
        return lam / complex(lam, -1.0)
    if f == "gamma":
        return complex(1.0, -1.0 / p["rate"]) ** (-p["shape"])
    if f == "deterministic":
        v = p["value"]
        return complex(math.cos(v), math.sin(v))
    if f == "uniform":
        lo, hi = p["lo"], p["hi"]
        return (np.exp(1j * hi) - np.exp(1j * lo)) / (1j * (hi - lo))
    return char_value_quadrature(spec)


def cz_constant(spec_or_z):
    """``c_z = 1 + 2 Re z/(1-z)``, the growth rate of ``E|Z_n|^2``.

    Accepts either a spec or the complex value ``z`` itself.
    """
    z = spec_or_z if isinstance(spec_or_z, (complex, float, int)) else char_value(spec_or_z)
    z = complex(z)
    if abs(z) >= 1.0 - 1e-15:
        raise DegenerateError(f"|z| = {abs(z):.17g}; the law is degenerate")
    return 1.0 + 2.0 * (z / (1.0 - z)).real


# ---------------------------------------------------------------------------
# marker densities

_MARKERS = ("pareto_tail", "exponential_unit", "uniform_unit")


@dataclass(frozen=True)
class MarkerDensity:
    """Auxiliary density ``p`` of the LePage markers ``V``.

    ``pareto_tail`` with ``unnormalized=True`` evaluates ``p(v) = v**-r``, so
    that ``q(1/s) = s**(1/r)``; sampling always uses the normalized law
    ``(r-1) x0**(r-1) v**-r`` on ``[x0, inf)``.
    """

    family: str
    r: float = 2.0
    x0: float = 1.0
    unnormalized: bool = False

    def __post_init__(self):
        if self.family not in _MARKERS:
            raise ParameterError(f"unknown marker family {self.family!r}")
        if self.family == "pareto_tail":
            if not self.r > 1:
                raise ParameterError(f"pareto_tail: r must exceed 1, got {self.r}")
            if not self.x0 > 0:
                raise ParameterError("pareto_tail: x0 must be positive")

    @classmethod
    def pareto_tail(cls, r, x0=1.0, unnormalized=False):
        return cls("pareto_tail", float(r), float(x0), bool(unnormalized))

    @classmethod
    def exponential_unit(cls):
        return cls("exponential_unit")

    @classmethod
    def uniform_unit(cls):
        return cls("uniform_unit")

    @property
    def constant(self):
        if self.family != "pareto_tail" or self.unnormalized:
            return 1.0
        return (self.r - 1.0) * self.x0 ** (self.r - 1.0)

    @property
    def support(self):
        if self.family == "pareto_tail":
            return (self.x0, math.inf)
        if self.family == "exponential_unit":
            return (0.0, math.inf)
        return (0.0, 1.0)

    @property
    def decreasing(self):
        return self.family != "uniform_unit"

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        if self.family == "pareto_tail":
            with np.errstate(divide="ignore"):
                return np.where(v >= self.x0, self.constant * v ** (-self.r), 0.0)
        if self.family == "exponential_unit":
            return np.where(v >= 0, np.exp(-v), 0.0)
        return np.where((v >= 0) & (v <= 1), 1.0, 0.0)

    def inverse(self, y):
        """Decreasing-branch inverse ``q = p^{-1}``."""
        y = np.asarray(y, dtype=float)
        if self.family == "pareto_tail":
            return (self.constant / y) ** (1.0 / self.r)
        if self.family == "exponential_unit":
            return -np.log(y)
        raise ParameterError("uniform_unit density is not strictly decreasing")

    def s_of_a(self, a):
        """Arrival level ``s = 1/p(a)`` at which ``a = q(1/s)``."""
        return 1.0 / self.pdf(a)

    def ds_da(self, a):
        a = np.asarray(a, dtype=float)
        if self.family == "pareto_tail":
            return self.r * a ** (self.r - 1.0) / self.constant
        if self.family == "exponential_unit":
            return np.exp(a)
        raise ParameterError("uniform_unit density is not strictly decreasing")

    def cdf_inverse(self, u):
        u = np.asarray(u, dtype=float)
        if self.family == "pareto_tail":
            return self.x0 * (1.0 - u) ** (-1.0 / (self.r - 1.0))
        if self.family == "exponential_unit":
            return -np.log1p(-u)
        return u

    def sample(self, n, stream):
        return marker_sample(self, n, stream)

    def __str__(self):
        if self.family == "pareto_tail":
            return format_call(self.family, {"r": self.r, "x0": self.x0,
                                             "unnormalized": self.unnormalized})
        return self.family


def parse_marker(text):
    name, params = parse_call(text)
    if name == "pareto_tail":
        return MarkerDensity.pareto_tail(params.get("r", 2.0), params.get("x0", 1.0),
                                         params.get("unnormalized", False))
    if name in ("exponential_unit", "uniform_unit") and not params:
        return MarkerDensity(name)
    raise ParameterError(f"cannot build marker from {text!r}")


def marker_sample(md, n, stream):
    """Inverse-CDF draws of the marker ``V``."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    gen = stream.generator if hasattr(stream, "generator") else stream
    return md.cdf_inverse(gen.random(n))
