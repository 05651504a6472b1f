"""Improper integrals ``lim_n int_{A_n} f`` over exhausting windows of ``[0, inf)``.

Two tools live here:

* :func:`improper_integral` sums per-window quadratures along half periods
  (or custom endpoints) and accelerates alternating window sums with the
  Euler transform (repeated averaging of partial sums).
* :func:`dyadic_tail_integral` integrates a nonnegative function over dyadic
  windows and classifies the integral as finite, divergent or inconclusive.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._numerics import compensated_sum, gl_panels

__all__ = ["ImproperScheme", "ImproperResult", "improper_integral",
           "euler_estimate", "DyadicResult", "dyadic_tail_integral",
           "classify_tail"]


@dataclass(frozen=True)
class ImproperScheme:
    """Exhaustion rule and stopping controls.

    ``rule`` is ``"half_periods"`` (endpoints ``anchor + k * period``) or
    ``"windows"`` (explicit increasing ``endpoints``).
    """

    rule: str = "half_periods"
    period: float = math.pi
    anchor: float = 0.0
    endpoints: tuple = ()
    acceleration: str = "euler"
    tol: float = 1e-10
    window_tol: float = 1e-13
    max_windows: int = 200
    min_windows: int = 8

    def __post_init__(self):
        if self.rule not in ("half_periods", "windows"):
            raise ValueError(f"unknown exhaustion rule {self.rule!r}")
        if self.acceleration not in ("euler", "none"):
            raise ValueError(f"unknown acceleration {self.acceleration!r}")
        if self.rule == "windows":
            e = np.asarray(self.endpoints, dtype=float)
            if len(e) < 2 or np.any(np.diff(e) <= 0):
                raise ValueError("window endpoints must be strictly increasing")

    def edges(self, lower):
        """Endpoint generator starting at ``lower``."""
        if self.rule == "windows":
            for e in self.endpoints:
                if e >= lower:
                    yield float(e)
            return
        yield float(lower)
        k = math.floor((lower - self.anchor) / self.period) + 1
        while True:
            yield self.anchor + k * self.period
            k += 1


@dataclass
class ImproperResult:
    value: complex | float | None
    converged: bool
    achieved: float
    method: str
    endpoints: np.ndarray
    window_values: np.ndarray
    message: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def windows_used(self):
        return len(self.window_values)

    @property
    def partials(self):
        return np.cumsum(self.window_values)

    def rows(self):
        for i, (e, p) in enumerate(zip(self.endpoints[1:], self.partials), 1):
            yield i, float(e), p

    def to_csv(self, path, header=()):
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["window_index", "endpoint", "partial_value"])
            for i, e, p in self.rows():
                w.writerow([i, repr(e), repr(complex(p)) if np.iscomplexobj(p) else repr(float(p))])


def euler_estimate(partials, start):
    """Repeated averaging of ``partials[start:]`` down to a single value."""
    p = np.asarray(partials[start:], dtype=float)
    while len(p) > 1:
        p = 0.5 * (p[1:] + p[:-1])
    return float(p[0])


def _window(f, lo, hi, breaks, tol):
    # the error estimate feeds the reported tolerance, so QUADPACK's
    # roundoff warnings carry no extra information here
    pts = [b for b in breaks if lo < b < hi] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, lo, hi, points=pts, epsabs=tol, epsrel=0.0,
                                  limit=200)
    return val, err


def _alternating(vals, m=6):
    tail = np.asarray(vals[-m:])
    if len(tail) < m or np.any(tail == 0):
        return False
    s = np.sign(tail)
    return bool(np.all(s[1:] == -s[:-1]))


def _dyadic_groups(vals):
    groups = []
    j = 0
    while 2 ** (j + 1) - 1 <= len(vals):
        groups.append(float(np.sum(vals[2 ** j - 1:2 ** (j + 1) - 1])))
        j += 1
    return groups


def _real_improper(f, scheme, lower, hi_support, breaks):
    edges_iter = scheme.edges(lower)
    edges = [next(edges_iter)]
    vals, errs = [], []
    estimates = []
    method, value, achieved, msg, converged = "direct", None, math.inf, "", False
    for e in edges_iter:
        lo = edges[-1]
        hi = min(e, hi_support)
        if hi <= lo:
            break
        v, err = _window(f, lo, hi, breaks, scheme.window_tol)
        edges.append(hi)
        vals.append(v)
        errs.append(err)
        if hi >= hi_support:
            value = compensated_sum(vals)
            achieved = float(np.sum(errs))
            converged, method, msg = True, "finite-support", "support exhausted"
            break
        k = len(vals)
        if k < scheme.min_windows:
            if k >= scheme.max_windows:
                break
            continue
        if scheme.acceleration == "euler" and _alternating(vals):
            partials = np.cumsum(vals)
            est = euler_estimate(partials, k // 2)
            estimates.append(est)
            if len(estimates) >= 3:
                achieved = max(abs(estimates[-1] - estimates[-2]),
                               abs(estimates[-2] - estimates[-3])) + float(np.sum(errs))
                if achieved < scheme.tol:
                    value, converged, method = est, True, "euler"
                    msg = "alternating window sums, Euler transform"
                    break
        else:
            estimates.clear()
            groups = _dyadic_groups(vals)
            if len(groups) >= 3 and all(g == 0 for g in groups[-3:]):
                value, converged, method = compensated_sum(vals), True, "direct"
                achieved = float(np.sum(errs))
                msg = "vanishing tail"
                break
        if k >= scheme.max_windows:
            break
    if not converged:
        groups = _dyadic_groups(vals)
        g = np.abs(groups)
        if len(g) >= 4 and np.all(g[-3:] > 0):
            ratios = g[-3:] / g[-4:-1]
            rho = float(np.max(ratios))
            if rho <= 0.75:
                r1, r2 = ratios[-1], ratios[-2]
                tail = g[-1] * r1 / (1.0 - r1)
                alt = g[-1] * r2 / (1.0 - r2)
                # the tail estimate starts where the last full group ends
                covered = 2 ** len(groups) - 1
                value = compensated_sum(vals[:covered]) + math.copysign(tail, groups[-1])
                achieved = abs(tail - alt) + float(np.sum(errs))
                converged = achieved < scheme.tol
                method = "geometric-tail"
                msg = f"dyadic window groups decay with ratio {r1:.3f}"
            elif np.all(ratios >= 0.5):
                msg = "no sign alternation and no Cauchy decay: dyadic window groups do not shrink"
        elif estimates:
            value = estimates[-1]
            msg = f"Euler estimate not settled to {scheme.tol:g} (achieved {achieved:.2e})"
        if not converged:
            value = None
            if not msg:
                msg = "no convergence within the window budget"
    return ImproperResult(value, converged, achieved, method, np.array(edges),
                          np.array(vals), msg)


def improper_integral(f, scheme=None, lower=0.0):
    """``int_lower^inf f`` as a limit over the scheme's windows.

    ``f`` is any vectorized callable; ``SeriesFunction`` instances also supply
    ``support`` and ``breakpoints``. Complex-valued ``f`` is split into real
    and imaginary parts. A non-convergent integral is returned with
    ``value=None`` and an explanatory ``message``.
    """
    scheme = scheme or ImproperScheme()
    support = getattr(f, "support", (0.0, math.inf))
    breaks = tuple(getattr(f, "breakpoints", ()))
    hi_support = support[1]
    if hi_support <= lower:
        return ImproperResult(0.0, True, 0.0, "finite-support", np.array([lower]),
                              np.zeros(0), "empty support")
    if getattr(f, "is_complex", False):
        re = _real_improper(lambda x: np.real(f(x)), scheme, lower, hi_support, breaks)
        im = _real_improper(lambda x: np.imag(f(x)), scheme, lower, hi_support, breaks)
        ok = re.converged and im.converged
        n = max(len(re.endpoints), len(im.endpoints))
        edges = re.endpoints if len(re.endpoints) == n else im.endpoints
        wv = np.zeros(n - 1, dtype=complex)
        wv[:len(re.window_values)] += re.window_values
        wv[:len(im.window_values)] += 1j * im.window_values
        return ImproperResult(complex(re.value, im.value) if ok else None, ok,
                              re.achieved + im.achieved, f"{re.method}/{im.method}",
                              edges, wv, "; ".join(m for m in (re.message, im.message) if m),
                              extras={"real": re, "imag": im})
    return _real_improper(lambda x: np.asarray(f(x), dtype=float), scheme, lower,
                          hi_support, breaks)


# ---------------------------------------------------------------------------
# dyadic classification for nonnegative integrands

@dataclass
class DyadicResult:
    value: float
    verdict: str
    windows: list
    contributions: np.ndarray
    tail_estimate: float = 0.0

    @property
    def finite(self):
        return self.verdict == "finite"


def dyadic_tail_integral(g, x0=1.0, jmax=16, period=math.pi, breaks=(),
                         quad_until=64.0, decay_ratio=0.9, stall_ratio=0.5):
    """Integrate nonnegative ``g`` over ``[0, x0]`` and windows ``[x0 2^j, x0 2^(j+1)]``.

    Verdicts:

    * ``"finite"``: a geometric rate fitted to the last eight contributions is
      below ``decay_ratio``; the value includes the matching tail estimate.
    * ``"divergent"``: over the last eight windows the contribution shrank by
      less than ``stall_ratio``, i.e. it stays bounded below.
    * ``"inconclusive"``: neither; the value is the computed partial integral.

    Windows up to ``quad_until`` use adaptive quadrature; later ones use
    composite Gauss-Legendre with panels of width ``period / 2``.
    """
    windows = [(0.0, x0)] + [(x0 * 2.0 ** j, x0 * 2.0 ** (j + 1)) for j in range(jmax + 1)]
    contrib = []
    for lo, hi in windows:
        if hi <= quad_until:
            pts = [b for b in breaks if lo < b < hi] or None
            v = integrate.quad(g, lo, hi, points=pts, limit=500, epsabs=1e-13,
                               epsrel=1e-11)[0]
        else:
            v = gl_panels(g, lo, hi, period / 2.0)
        contrib.append(v)
    contrib = np.array(contrib)
    verdict, extra = classify_tail(contrib[1:], decay_ratio, stall_ratio)
    total = compensated_sum(contrib)
    if verdict == "divergent":
        return DyadicResult(math.inf, verdict, windows, contrib)
    return DyadicResult(total + extra, verdict, windows, contrib, extra)


def classify_tail(contributions, decay_ratio=0.9, stall_ratio=0.5):
    """Verdict on nonnegative dyadic window contributions.

    Returns ``(verdict, tail_estimate)``; see :func:`dyadic_tail_integral`.
    """
    tail = np.asarray(contributions, dtype=float)
    if len(tail) >= 4 and np.all(tail[-4:] == 0):
        return "finite", 0.0
    last = tail[-8:]
    if len(last) >= 5 and np.all(last > 0):
        j = np.arange(len(last))
        rho = float(2.0 ** np.polyfit(j, np.log2(last), 1)[0])
        if rho < decay_ratio:
            return "finite", float(last[-1] * rho / (1.0 - rho))
    if len(last) == 8 and np.all(last > 0) and last[-1] >= stall_ratio * last[0]:
        return "divergent", math.inf
    return "inconclusive", 0.0
