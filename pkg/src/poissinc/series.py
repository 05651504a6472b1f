"""Random series ``sum_n f(S_n)``: direct, Abel, permuted and blocked summation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._numerics import ParameterError, compensated_cumsum, compensated_sum, loglog_slope
from ._parse import parse_call
from .rng import RngStream

__all__ = [
    "SeriesFunction", "SeriesEvaluation", "TailReport", "ExtensionRequired",
    "partial_sum", "direct_evaluate", "abel_evaluate", "permuted_sum",
    "block_sum", "half_period_partition", "tail_diagnostics", "dyadic_windows",
    "parse_function", "AMPLITUDES",
]


class ExtensionRequired(RuntimeError):
    """The arrival stream has not been realized far enough."""


def _inv_log(x):
    return 1.0 / np.log(x + 2.0)


def _inv_log_prime(x):
    return -1.0 / ((x + 2.0) * np.log(x + 2.0) ** 2)


AMPLITUDES = {
    "one": (lambda x: np.ones_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float))),
    "inv_log": (_inv_log, _inv_log_prime),
    "identity": (lambda x: np.asarray(x, dtype=float),
                 lambda x: np.ones_like(np.asarray(x, dtype=float))),
}

_KINDS = ("sinc", "cis_over_x", "cos_over_x", "amplitude_sin", "indicator",
          "truncated", "zero")


@dataclass(frozen=True, eq=False)
class SeriesFunction:
    """A function ``f`` on ``[0, inf)`` summed over arrivals.

    Kinds: ``sinc`` (sin x / x, equal to 1 at 0), ``cis_over_x``
    (exp(ix)/x), ``cos_over_x``, ``amplitude_sin`` (A(x) sin x),
    ``indicator`` (1 on [lo, hi)), ``truncated`` (base f times 1{x < cutoff})
    and ``zero``.
    """

    kind: str
    lo: float = 0.0
    hi: float = 1.0
    cutoff: float = math.inf
    base: "SeriesFunction | None" = None
    amplitude: object = None
    amplitude_prime: object = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown function kind {self.kind!r}")
        if self.kind == "indicator" and not self.hi > self.lo:
            raise ParameterError("indicator window needs hi > lo")
        if self.kind == "truncated" and self.base is None:
            raise ParameterError("truncated kind needs a base function")

    @classmethod
    def sinc(cls):
        return cls("sinc")

    @classmethod
    def cis_over_x(cls):
        return cls("cis_over_x")

    @classmethod
    def cos_over_x(cls):
        return cls("cos_over_x")

    @classmethod
    def indicator(cls, lo, hi):
        return cls("indicator", lo=float(lo), hi=float(hi))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def truncated(cls, base, cutoff):
        return cls("truncated", base=base, cutoff=float(cutoff))

    @classmethod
    def amplitude_sin(cls, A, Aprime=None, label=""):
        if isinstance(A, str):
            label = A
            A, Aprime = AMPLITUDES[A]
        return cls("amplitude_sin", amplitude=A, amplitude_prime=Aprime, label=label)

    @property
    def is_complex(self):
        if self.kind == "truncated":
            return self.base.is_complex
        return self.kind == "cis_over_x"

    @property
    def singular_at_zero(self):
        if self.kind == "truncated":
            return self.base.singular_at_zero
        return self.kind in ("cis_over_x", "cos_over_x")

    @property
    def support(self):
        if self.kind == "indicator":
            return (self.lo, self.hi)
        if self.kind == "truncated":
            lo, hi = self.base.support
            return (lo, min(hi, self.cutoff))
        if self.kind == "zero":
            return (0.0, 0.0)
        return (0.0, math.inf)

    @property
    def breakpoints(self):
        if self.kind == "indicator":
            return (self.lo, self.hi)
        if self.kind == "truncated":
            return tuple(self.base.breakpoints) + (self.cutoff,)
        return ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "sinc":
            return np.sinc(x / np.pi)
        if k in ("cis_over_x", "cos_over_x"):
            if np.any(x == 0):
                raise ZeroDivisionError(f"{k} is singular at 0")
            if k == "cis_over_x":
                return np.exp(1j * x) / x
            return np.cos(x) / x
        if k == "indicator":
            return ((x >= self.lo) & (x < self.hi)).astype(float)
        if k == "truncated":
            return np.where(x < self.cutoff, self.base(x), 0.0)
        if k == "amplitude_sin":
            return self.amplitude(x) * np.sin(x)
        return np.zeros_like(x)

    def __str__(self):
        if self.kind == "indicator":
            return f"indicator(lo={self.lo}, hi={self.hi})"
        if self.kind == "truncated":
            return f"truncated(base={self.base}, cutoff={self.cutoff})"
        if self.kind == "amplitude_sin":
            return f"amplitude_sin(amplitude={self.label or 'custom'})"
        return self.kind


def parse_function(text):
    name, params = parse_call(text)
    if name == "indicator":
        return SeriesFunction.indicator(params.get("lo", 0.0), params.get("hi", 1.0))
    if name == "truncated":
        return SeriesFunction.truncated(parse_function(str(params.get("base", "sinc"))),
                                        params["cutoff"])
    if name == "amplitude_sin":
        return SeriesFunction.amplitude_sin(str(params.get("amplitude", "one")))
    if name in _KINDS and not params:
        return SeriesFunction(name)
    raise ParameterError(f"cannot build function from {text!r}")


@dataclass
class SeriesEvaluation:
    """Prefix data of one evaluation.

    ``partial[n-1]`` is the sum of the first ``n`` terms in the order used by
    ``method``. Abel evaluations also fill ``boundary`` (``R_n Z_n``) and
    ``abel_series`` (``sum_{k<n} D_k Z_k``).
    """

    method: str
    partial: np.ndarray
    boundary: np.ndarray | None = None
    abel_series: np.ndarray | None = None
    order: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.partial[-1] if len(self.partial) else 0.0

    def fluctuation(self):
        """``max_n |P_n - P_N|`` over the walk."""
        if len(self.partial) == 0:
            return 0.0
        return float(np.max(np.abs(self.partial - self.partial[-1])))

    def trace_rows(self):
        p = np.asarray(self.partial, dtype=complex)
        for i, v in enumerate(p, 1):
            yield (self.method, i, float(v.real), float(v.imag))

    def to_csv(self, path, header=()):
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["method", "n_or_k", "partial_real", "partial_imag"])
            for m, i, re, im in self.trace_rows():
                w.writerow([m, i, repr(re), repr(im)])


def _terms(f, arrivals, N):
    if N > len(arrivals):
        arrivals.extend(N)
    S = arrivals.arrivals[:N]
    if f.singular_at_zero and np.any(S == 0):
        raise ZeroDivisionError(f"{f} is singular at an arrival equal to 0")
    return f(S)


def partial_sum(f, arrivals, N):
    """``sum_{n<=N} f(S_n)`` with compensated summation."""
    if N == 0:
        return 0.0
    return compensated_sum(_terms(f, arrivals, N))


def direct_evaluate(f, arrivals, N):
    return SeriesEvaluation("direct", compensated_cumsum(_terms(f, arrivals, N)))


def abel_evaluate(arrivals, N, f=None):
    """Summation by parts of ``sum exp(i S_n)/S_n``.

    ``sum_{n<=N} zeta_n R_n = R_N Z_N + sum_{n<N} D_n Z_n`` with
    ``R_n = 1/S_n`` and ``D_n = R_n - R_{n+1}``. The returned ``partial`` is
    the Abel-side prefix; the direct prefix sits in ``extras["direct"]``.
    """
    if f is not None and f.kind != "cis_over_x":
        raise ParameterError("Abel evaluation is defined for cis_over_x only")
    if N < 1:
        raise ParameterError("N must be at least 1")
    if N > len(arrivals):
        arrivals.extend(N)
    S = arrivals.arrivals[:N]
    R, D = arrivals.reciprocals(N)
    zeta = np.exp(1j * S)
    Z = compensated_cumsum(zeta)
    boundary = R * Z
    series = np.zeros(N, dtype=complex)
    if N > 1:
        series[1:] = compensated_cumsum(D * Z[:-1])
    ev = SeriesEvaluation("abel", boundary + series, boundary=boundary,
                          abel_series=series)
    ev.extras["direct"] = compensated_cumsum(zeta * R)
    ev.extras["Z"] = Z
    ev.extras["D"] = D
    return ev


def permuted_sum(f, arrivals, N, perm_seed=None):
    """Partial sums along a uniformly random permutation of ``1..N``.

    ``perm_seed`` is an integer seed or an :class:`~poissinc.rng.RngStream`;
    ``None`` uses the identity permutation.
    """
    terms = _terms(f, arrivals, N)
    if perm_seed is None:
        order = np.arange(N)
        tag = "permuted(identity)"
    elif isinstance(perm_seed, RngStream):
        order = perm_seed.generator.permutation(N)
        tag = f"permuted({perm_seed.seed}:{'/'.join(map(str, perm_seed.key))})"
    else:
        order = RngStream(perm_seed, "permutation").generator.permutation(N)
        tag = f"permuted({perm_seed})"
    return SeriesEvaluation(tag, compensated_cumsum(terms[order]), order=order)


def half_period_partition(K, period=math.pi):
    """Endpoints ``0, pi, 2 pi, ..., K pi``."""
    return np.arange(K + 1) * period


def _block_integral(f, lo, hi):
    pts = [b for b in f.breakpoints if lo < b < hi] or None
    lim = max(50, int((hi - lo) / math.pi) * 10 + 50)

    def q(g):
        return integrate.quad(g, lo, hi, points=pts, limit=lim, epsabs=1e-13,
                              epsrel=1e-12)[0]

    if f.is_complex:
        return complex(q(lambda x: f(x).real), q(lambda x: f(x).imag))
    return q(lambda x: float(f(x)))


def block_sum(f, arrivals, partition, K=None, integrals=True):
    """Block values ``X_k = sum_n f(S_n) 1{S_n in I_k}`` and their running sum.

    ``partition`` lists endpoints ``e_0 < e_1 < ... < e_K`` with
    ``I_k = [e_{k-1}, e_k)``. The running sum shares its term order with the
    direct prefix, so at each block boundary the two agree exactly.
    ``extras["block_integrals"]`` holds the Lebesgue integrals of ``f`` on
    each block unless ``integrals`` is false.
    """
    e = np.asarray(partition, dtype=float)
    if K is not None:
        e = e[:K + 1]
    if np.any(np.diff(e) <= 0):
        raise ParameterError("partition endpoints must increase")
    if len(arrivals) == 0 or arrivals.arrivals[-1] < e[-1]:
        raise ExtensionRequired(
            f"arrivals must be realized past {e[-1]}; call extend_past first")
    S = arrivals.arrivals
    n_end = int(np.searchsorted(S, e[-1], side="left"))
    n_start = int(np.searchsorted(S, e[0], side="left"))
    terms = f(S[:n_end]) if n_end else np.zeros(0)
    if n_start:
        terms = terms.copy()
        terms[:n_start] = 0
    prefix = compensated_cumsum(terms)
    idx = np.searchsorted(S[:n_end], e, side="left")
    zero = 0j if f.is_complex else 0.0
    running = np.array([prefix[i - 1] if i > 0 else zero for i in idx[1:]])
    X = np.array([compensated_sum(terms[a:b]) if b > a else zero
                  for a, b in zip(idx[:-1], idx[1:])])
    ev = SeriesEvaluation("blocked", running)
    ev.extras.update(blocks=X, endpoints=e, counts=np.diff(idx))
    if integrals:
        ev.extras["block_integrals"] = np.array([_block_integral(f, a, b)
                                                 for a, b in zip(e[:-1], e[1:])])
    return ev


def dyadic_windows(jmin, jmax):
    return [(2 ** j, 2 ** (j + 1)) for j in range(jmin, jmax + 1)]


@dataclass
class TailReport:
    windows: list
    oscillation: np.ndarray
    exponent: float

    def to_csv(self, path, header=()):
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["window_lo", "window_hi", "oscillation"])
            for (lo, hi), o in zip(self.windows, self.oscillation):
                w.writerow([lo, hi, repr(float(o))])


def window_oscillation(partial, lo, hi):
    """Spread of ``P_n`` for ``lo <= n <= hi``: max - min, or for complex
    prefixes the diagonal of their bounding box."""
    seg = np.asarray(partial)[lo - 1:hi]
    if np.iscomplexobj(seg):
        return float(math.hypot(np.ptp(seg.real), np.ptp(seg.imag)))
    return float(np.ptp(seg))


def tail_diagnostics(evaluation, windows):
    """Oscillation of the prefix in each window and its decay exponent.

    The exponent is minus the log-log slope of oscillation against the
    window start; it is ``nan`` when some oscillation vanishes.
    """
    partial = evaluation.partial if hasattr(evaluation, "partial") else evaluation
    windows = [(int(a), int(b)) for a, b in windows]
    if len(windows) < 2:
        raise ParameterError("need at least two windows")
    if windows[-1][1] > len(partial):
        raise ExtensionRequired(f"prefix has {len(partial)} terms, window needs {windows[-1][1]}")
    osc = np.array([window_oscillation(partial, a, b) for a, b in windows])
    if np.all(osc > 0):
        exponent = -loglog_slope([a for a, _ in windows], osc)
    else:
        exponent = float("nan")
    return TailReport(windows, osc, exponent)
