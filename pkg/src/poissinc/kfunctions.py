"""Three-series functions of the conditioned LePage series.

For a marker density ``p``, Levy model ``nu`` (via ``H = G^{-1}``) and
function ``f``, with ``[x]_c = x 1{|x| <= c}``::

    K1(s) = P(|H(s p(V)) f(V)| > c)
    K2(s) = E [H(s p(V)) f(V)]_c
    K3(s) = E [H(s p(V)) f(V)]_c ** 2

With ``nu = delta_1`` and a decreasing ``p`` the expectation collapses to a
tail integral from ``a(s) = q(1/s)``, e.g. ``K2(s) = int_a^inf [f]_c p``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special as sp

from ._numerics import ParameterError, compensated_cumsum, loglog_slope
from .improper import ImproperScheme, classify_tail, dyadic_tail_integral, improper_integral
from .levy import LevyModel
from .series import SeriesFunction

__all__ = [
    "KFunctionSet", "UnsupportedCombination", "k_functions", "k_sweep",
    "k_envelope", "envelope_slope", "analytic_companion", "three_series_check",
    "ThreeSeriesReport", "amplitude_k_bound", "AmplitudeReport",
    "exp_marker_sinc_k", "exp_marker_envelope", "exp_marker_envelope_check",
]


class UnsupportedCombination(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KFunctionSet:
    marker: object
    model: LevyModel
    f: SeriesFunction
    cutoff: float = 1.0

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ParameterError("cutoff must be positive")

    @property
    def reducible(self):
        return self.model.kind == "poisson_unit" and self.marker.decreasing

    def lower_limit(self, s):
        """``a(s) = q(1/s)``, clipped to the marker support."""
        return max(float(self.marker.inverse(1.0 / s)), self.marker.support[0])


# ---------------------------------------------------------------------------
# pointwise evaluation

def _truncated(x, c):
    return np.where(np.abs(x) <= c, x, 0.0)


def _normalized_tail(g, a, scale, tol=1e-11):
    """``int_a^inf g`` through the half-period engine, integrand scaled to O(1)."""
    scheme = ImproperScheme(tol=tol, window_tol=tol * 1e-2, max_windows=400)

    class _G:
        is_complex = bool(np.iscomplexobj(g(np.array([a + 0.5]))))
        support = (0.0, math.inf)
        breakpoints = ()

        def __call__(self, x):
            return g(x) / scale

    res = improper_integral(_G(), scheme, lower=a)
    if not res.converged:
        raise ArithmeticError(f"tail integral from {a} did not converge: {res.message}")
    return res.value * scale


def _scale(g, a):
    probe = np.abs(g(a + np.linspace(0.0, math.pi, 33)))
    m = float(np.max(probe))
    return m if m > 0 else 1.0


def k_functions(kset, s, reduction="auto"):
    """``(K1(s), K2(s), K3(s))``.

    ``reduction`` selects the tail-integral form valid for
    ``poisson_unit`` with a decreasing marker: ``"auto"`` uses it whenever
    applicable, ``True`` demands it, ``False`` forces the general quadrature.
    """
    if s <= 0:
        raise ParameterError("s must be positive")
    if reduction is True and not kset.reducible:
        raise UnsupportedCombination(
            "the tail-integral reduction needs poisson_unit with a decreasing marker")
    use = kset.reducible if reduction == "auto" else bool(reduction)
    f, c, p = kset.f, kset.cutoff, kset.marker.pdf
    if use:
        a = kset.lower_limit(s)

        def k2g(v):
            return _truncated(f(v), c) * p(v)
        k2 = _normalized_tail(k2g, a, _scale(k2g, a))
        k1 = integrate.quad(lambda v: float(np.abs(f(v)) > c) * p(v), a, np.inf,
                            limit=500)[0]
        k3 = integrate.quad(lambda v: float(np.abs(_truncated(f(v), c)) ** 2 * p(v)),
                            a, np.inf, limit=500)[0]
        return k1, k2, k3
    H = kset.model.inverse_tail
    lo, hi = kset.marker.support

    def hf(v):
        v = np.asarray(v, dtype=float)
        pv = p(v)
        out = np.zeros(v.shape, dtype=complex if f.is_complex else float)
        pos = pv > 0
        fv = f(v[pos])
        # H may overflow to inf where p is tiny; f = 0 still gives 0
        out[pos] = np.where(fv == 0, 0, H(s * pv[pos]) * fv)
        return out, pv

    def k1g(v):
        x, pv = hf(v)
        return (np.abs(x) > c) * pv

    def k2g(v):
        x, pv = hf(v)
        return _truncated(x, c) * pv

    def k3g(v):
        x, pv = hf(v)
        return np.abs(_truncated(x, c)) ** 2 * pv

    if math.isinf(hi):
        k2 = _normalized_tail(k2g, lo, _scale(k2g, lo))
        k1 = integrate.quad(lambda v: float(k1g(v)), lo, np.inf, limit=500)[0]
        k3 = integrate.quad(lambda v: float(k3g(v)), lo, np.inf, limit=500)[0]
    else:
        def q(g):
            return integrate.quad(lambda v: float(np.real(g(v))), lo, hi, limit=500)[0]
        k1, k3 = q(k1g), q(k3g)
        k2 = q(k2g)
        if f.is_complex:
            k2 = complex(k2, integrate.quad(lambda v: float(np.imag(k2g(v))), lo, hi,
                                            limit=500)[0])
    return k1, k2, k3


def k_sweep(kset, s_grid, path=None, header=()):
    """Evaluate the K-functions on ``s_grid``; optionally write the sweep CSV."""
    rows = []
    for s in s_grid:
        k1, k2, k3 = k_functions(kset, float(s))
        k2 = complex(k2)
        rows.append((float(s), k1, k2.real, k2.imag, k3))
    if path is not None:
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["s", "K1", "K2_real", "K2_imag", "K3"])
            for r in rows:
                w.writerow([repr(float(v)) for v in r])
    return np.array(rows)


def analytic_companion(f):
    """Complex function whose imaginary (or real) part is ``f``.

    ``sinc`` and ``cos_over_x`` map to ``cis_over_x``; ``amplitude_sin`` to
    ``A(x) exp(ix)``. The modulus of the companion's K2 is the envelope of
    the oscillating K2 of ``f``.
    """
    if f.kind in ("sinc", "cos_over_x", "cis_over_x"):
        return SeriesFunction.cis_over_x()
    if f.kind == "amplitude_sin":
        A = f.amplitude

        class _AmpCis:
            kind = "amplitude_cis"
            is_complex = True

            def __call__(self, x):
                return A(x) * np.exp(1j * np.asarray(x, dtype=float))
        return _AmpCis()
    raise ParameterError(f"no analytic companion for {f}")


def k_envelope(kset, s):
    """``|K2(s)|`` of the analytic companion of ``f`` (``poisson_unit`` only)."""
    if not kset.reducible:
        raise UnsupportedCombination("envelope needs the poisson_unit reduction")
    g = analytic_companion(kset.f)
    p = kset.marker.pdf
    a = kset.lower_limit(s)

    def gp(v):
        return g(v) * p(v)
    return abs(_normalized_tail(gp, a, _scale(gp, a)))


def envelope_slope(kset, s_grid):
    """Log-log slope of the K2 envelope over ``s_grid``."""
    env = np.array([k_envelope(kset, float(s)) for s in s_grid])
    return loglog_slope(s_grid, env), env


def exp_marker_sinc_k(s):
    """Closed form of ``int_{log s}^inf sinc(v) exp(-v) dv``.

    Equals ``Im E_1((1 - i) a)`` with ``a = log s``; in terms of ``Ei`` with
    principal branches this is ``(i/2)(Ei((-1+i)a) - Ei((-1-i)a)) + pi``.
    """
    a = np.log(np.asarray(s, dtype=float))
    return np.imag(sp.exp1((1.0 - 1.0j) * a))


def exp_marker_envelope(s):
    """``1/(s log s)``, the envelope of ``sin(log s)/(s log s)``."""
    s = np.asarray(s, dtype=float)
    return 1.0 / (s * np.log(s))


def exp_marker_envelope_check(s_lo=1e3, s_hi=1e12, points=4000, factor=2.0):
    """Track ``K(s) s log s`` for the exponential marker against the envelope.

    ``K`` oscillates like ``sin(log s)``, so the comparison is made on its
    local peaks over a log-spaced grid: every peak of ``|K| s log s`` must lie
    in ``[1/factor, factor]``. Returns ``(ok, peaks, max_ratio)``.
    """
    s = np.geomspace(s_lo, s_hi, points)
    ratio = np.abs(exp_marker_sinc_k(s)) / exp_marker_envelope(s)
    inner = ratio[1:-1]
    peaks = inner[(inner >= ratio[:-2]) & (inner >= ratio[2:])]
    ok = bool(len(peaks) and np.all(peaks >= 1.0 / factor) and np.all(ratio <= factor))
    return ok, peaks, float(ratio.max())


# ---------------------------------------------------------------------------
# integrability of the K-functions

@dataclass
class ThreeSeriesReport:
    k1: object
    k3: object
    k2_abs_verdict: str
    k2_abs_contributions: np.ndarray
    k2_partials: np.ndarray
    k2_settling: bool
    notes: list = field(default_factory=list)

    @property
    def verdicts(self):
        return {"K1": self.k1.verdict, "K3": self.k3.verdict, "K2_abs": self.k2_abs_verdict}


def _k2_on_a_grid(kset, a_grid):
    """``K2`` at every point of an increasing grid of lower limits.

    The tail from the last point comes from the engine; the pieces between
    consecutive points use 8-node Gauss-Legendre and are summed backwards.
    """
    f, c, p = kset.f, kset.cutoff, kset.marker.pdf

    def g(v):
        return _truncated(f(v), c) * p(v)
    x, w = np.polynomial.legendre.leggauss(8)
    lo, hi = a_grid[:-1], a_grid[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    pieces = (g(nodes) * w[None, :]).sum(axis=1) * half
    last = _normalized_tail(g, a_grid[-1], _scale(g, a_grid[-1]), tol=1e-9)
    rev = compensated_cumsum(pieces[::-1])[::-1]
    out = np.empty(len(a_grid), dtype=rev.dtype if np.iscomplexobj(rev) else float)
    out[:-1] = rev + last
    out[-1] = last
    return out


def three_series_check(kset, s0=1.0, jmax=16, a_max=5000.0, step=math.pi / 64):
    """Numerical verdicts on the integrability of ``K1``, ``K3`` and ``K2``.

    ``K1`` and ``K3`` integrals are computed in the reduced form
    ``int G(c/|f(v)|) dv`` and ``int f(v)^2 m2(c/|f(v)|) dv`` with
    ``m2(y) = int_0^y x^2 nu(dx)``. For ``K2`` (``poisson_unit`` with a
    decreasing marker) the report gives the dyadic contributions of
    ``int_{s0}^inf |K2(s)| ds``, computed in the variable ``a = q(1/s)``, and
    the signed partial integrals of ``K2`` over the same windows.
    """
    f, c, model = kset.f, kset.cutoff, kset.model
    breaks = tuple(getattr(f, "breakpoints", ()))

    def g1(v):
        y = np.abs(f(v))
        out = np.zeros_like(y, dtype=float)
        pos = y > 0
        out[pos] = model.tail(c / y[pos])
        return out

    def g3(v):
        y = np.abs(f(v))
        out = np.zeros_like(y, dtype=float)
        pos = y > 0
        out[pos] = y[pos] ** 2 * model.moment_below(c / y[pos], 2)
        return out

    k1 = dyadic_tail_integral(g1, jmax=jmax, breaks=breaks)
    k3 = dyadic_tail_integral(g3, jmax=jmax, breaks=breaks)
    notes = []
    if not kset.reducible:
        notes.append("K2 integrability is reported only for poisson_unit with a decreasing marker")
        return ThreeSeriesReport(k1, k3, "not-evaluated", np.zeros(0), np.zeros(0),
                                 False, notes)
    md = kset.marker
    a0 = kset.lower_limit(s0)
    a_end = min(a_max, float(md.inverse(1.0 / (s0 * 2.0 ** (jmax + 1)))))
    a_grid = np.arange(a0, a_end + step, step)
    k2 = _k2_on_a_grid(kset, a_grid)
    weight = md.ds_da(a_grid)
    s_grid = md.s_of_a(a_grid)
    edges = s0 * 2.0 ** np.arange(0, jmax + 2)

    def windows(values):
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (s_grid >= lo) & (s_grid <= hi)
            if sel.sum() < 2:
                break
            out.append(np.trapezoid(values[sel], a_grid[sel]))
        return np.array(out)

    contrib = windows(np.abs(k2) * weight)
    partial = np.cumsum(windows(k2 * weight))
    # |K2| oscillates, so its window contributions jitter; when |f| <= c the
    # modulus of the companion's K2 dominates |K2| and decays smoothly
    env_verdict = None
    try:
        comp = analytic_companion(f)
    except ParameterError:
        comp = None
    if comp is not None and np.all(np.abs(f(a_grid)) <= c):
        ekset = KFunctionSet(md, model, comp, cutoff=math.inf)
        env = windows(np.abs(_k2_on_a_grid(ekset, a_grid)) * weight)
        env_verdict, _ = classify_tail(env)
        notes.append(f"envelope-dominated verdict: {env_verdict}")
    if env_verdict == "finite":
        verdict = "finite"
    elif env_verdict is not None:
        verdict = "inconclusive"
    else:
        verdict, _ = classify_tail(contrib)
        if verdict == "finite":
            verdict = "inconclusive"
            notes.append("raw |K2| windows decay, but without a dominating envelope")
    steps = np.abs(np.diff(partial))
    settling = bool(len(steps) >= 4 and np.all(steps[-3:] <= steps[-4:-1] * 1.05))
    if len(contrib) < jmax + 1:
        notes.append(f"K2 windows truncated at a = {a_end:g} ({len(contrib)} windows)")
    return ThreeSeriesReport(k1, k3, verdict, contrib, partial, settling, notes)


# ---------------------------------------------------------------------------
# amplitude functions A(x) sin x with a Pareto marker

@dataclass
class AmplitudeReport:
    s: np.ndarray
    boundary: np.ndarray
    integral_dA: np.ndarray
    integral_A: np.ndarray
    direct: np.ndarray
    max_mismatch: float
    abs_k_integral: float
    abs_k_verdict: str
    amplitude_in_l2: str
    derivative_in_l1: str


def amplitude_k_bound(A, Aprime, r, s_grid, tol=1e-8):
    """Check the integration-by-parts split of ``K(s) = int_a^inf A e^{ix} x^-r dx``.

    With ``a = s^(1/r)``::

        K = i A(a) e^{ia} a^-r + i int_a^inf A' e^{ix} x^-r
            - i r int_a^inf A e^{ix} x^-(r+1)

    Each term and the direct integral are evaluated separately; a mismatch
    above ``tol`` raises ``ArithmeticError``. Amplitudes that grow, or whose
    derivative is not integrable on the tail, are rejected with
    ``ParameterError``.
    """
    if not r > 1:
        raise ParameterError("r must exceed 1")
    dA = dyadic_tail_integral(lambda x: np.abs(Aprime(x)), x0=1.0, jmax=16)
    big = np.abs(A(2.0 ** np.arange(8, 21)))
    grows = bool(np.all(big[1:] >= 1.2 * big[:-1]) and big[-1] > 0)
    if dA.verdict == "divergent" or grows:
        raise ParameterError("amplitude fails the tail checks (A bounded, A' integrable)")
    l2 = dyadic_tail_integral(lambda x: np.abs(A(x)) ** 2, x0=1.0, jmax=16).verdict

    def tail(g, a):
        return _normalized_tail(g, a, _scale(g, a), tol=1e-12)

    s_grid = np.asarray(s_grid, dtype=float)
    rows = []
    for s in s_grid:
        a = s ** (1.0 / r)
        b = 1j * A(np.array(a)) * np.exp(1j * a) * a ** (-r)
        i1 = 1j * tail(lambda x: Aprime(x) * np.exp(1j * x) * x ** (-r), a) \
            if np.any(Aprime(a + np.linspace(0, math.pi, 9)) != 0) else 0j
        i2 = -1j * r * tail(lambda x: A(x) * np.exp(1j * x) * x ** (-r - 1.0), a)
        d = tail(lambda x: A(x) * np.exp(1j * x) * x ** (-r), a)
        rows.append((complex(b), complex(i1), complex(i2), complex(d)))
    rows = np.array(rows)
    mismatch = float(np.max(np.abs(rows[:, :3].sum(axis=1) - rows[:, 3])))
    if mismatch > tol:
        raise ArithmeticError(f"integration-by-parts identity violated by {mismatch:.3e}")

    from .distributions import MarkerDensity

    class _Amp:
        kind = "amplitude_cis"
        is_complex = True
        breakpoints = ()

        def __call__(self, x):
            return A(x) * np.exp(1j * np.asarray(x, dtype=float))

    kset = KFunctionSet(MarkerDensity.pareto_tail(r, 1.0, unnormalized=True),
                        LevyModel.poisson_unit(), _Amp(), cutoff=math.inf)
    a_end = min(2000.0, 2.0 ** (16 / r))
    a_grid = np.arange(1.0, a_end, math.pi / 32)
    k = _k2_on_a_grid(kset, a_grid)
    integrand = np.abs(k) * kset.marker.ds_da(a_grid)
    s_vals = a_grid ** r
    edges = 2.0 ** np.arange(0, 17)
    contrib = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (s_vals >= lo) & (s_vals <= hi)
        if sel.sum() < 2:
            break
        contrib.append(np.trapezoid(integrand[sel], a_grid[sel]))
    verdict, extra = classify_tail(contrib)
    return AmplitudeReport(s_grid, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3],
                           mismatch, float(np.sum(contrib) + extra), verdict, l2, dA.verdict)
