"""Empirical versus analytic characteristic functionals of ``Nf`` and ``Xf``.

For a unit-rate Poisson measure on ``[0, inf)``::

    E exp(i t Nf) = exp( -int (1 - cos(t f)) + i int sin(t f) )

where the second integral may exist only as an improper limit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .improper import ImproperScheme, improper_integral
from .pointprocess import ArrivalStream
from .rng import map_replicates
from .series import partial_sum

__all__ = ["EmpiricalChf", "ChfComparison", "NonConvergence", "empirical_chf",
           "analytic_chf_Nf", "analytic_chf_Xf", "compare", "sample_series_values"]


class NonConvergence(ArithmeticError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class EmpiricalChf:
    t: np.ndarray
    values: np.ndarray
    se_re: np.ndarray
    se_im: np.ndarray
    n: int
    wide_ci: bool = False


@dataclass
class ChfComparison:
    t: np.ndarray
    empirical: np.ndarray
    se_re: np.ndarray
    se_im: np.ndarray
    analytic: np.ndarray
    zscore: np.ndarray
    threshold: float
    passed: bool
    notes: list = field(default_factory=list)

    @property
    def max_discrepancy(self):
        return float(np.max(np.abs(self.empirical - self.analytic)))

    def to_csv(self, path, header=()):
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["t", "emp_re", "emp_im", "ci", "ana_re", "ana_im", "zscore"])
            for i, t in enumerate(self.t):
                ci = 1.96 * max(self.se_re[i], self.se_im[i])
                w.writerow([repr(float(t)), repr(float(self.empirical[i].real)),
                            repr(float(self.empirical[i].imag)), repr(float(ci)),
                            repr(float(self.analytic[i].real)),
                            repr(float(self.analytic[i].imag)), repr(float(self.zscore[i]))])


def empirical_chf(samples, t_grid, min_samples=1000):
    """Mean of ``exp(i t W)`` with componentwise CLT standard errors."""
    w = np.asarray(samples)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    n = w.shape[0]
    phase = np.exp(1j * np.multiply.outer(t, w))
    vals = phase.mean(axis=1)
    ddof = 1 if n > 1 else 0
    se_re = phase.real.std(axis=1, ddof=ddof) / math.sqrt(n)
    se_im = phase.imag.std(axis=1, ddof=ddof) / math.sqrt(n)
    return EmpiricalChf(t, vals, se_re, se_im, n, wide_ci=n < min_samples)


def _improper_value(g, scheme):
    res = improper_integral(g, scheme)
    if not res.converged:
        raise NonConvergence(f"improper integral did not converge: {res.message}", res)
    return res.value


class _Composite:
    """``h(f(x))`` carrying ``f``'s support and breakpoints."""

    is_complex = False

    def __init__(self, h, f):
        self.h, self.f = h, f
        self.support = getattr(f, "support", (0.0, math.inf))
        self.breakpoints = tuple(getattr(f, "breakpoints", ()))

    def __call__(self, x):
        return self.h(self.f(x))


def analytic_chf_Nf(f, t_grid, scheme=None, intensity=1.0):
    """``exp(-lam int (1 - cos t f) + i lam int sin t f)`` for each ``t``.

    Both integrals come from the improper-integral engine; a non-convergent
    one raises :class:`NonConvergence` carrying the engine report.
    """
    scheme = scheme or ImproperScheme(tol=1e-6, max_windows=4000)
    out = []
    for t in np.atleast_1d(np.asarray(t_grid, dtype=float)):
        if t == 0:
            out.append(1.0 + 0j)
            continue
        re = _improper_value(_Composite(lambda y, t=t: 1.0 - np.cos(t * y), f), scheme)
        im = _improper_value(_Composite(lambda y, t=t: np.sin(t * y), f), scheme)
        out.append(np.exp(intensity * (-re + 1j * im)))
    return np.array(out)


def analytic_chf_Xf(model, f, t_grid, scheme=None):
    """``exp(-int psi_r(t f) + i int psi_i(t f))`` for a Levy model."""
    scheme = scheme or ImproperScheme(tol=1e-6, max_windows=4000)
    out = []
    for t in np.atleast_1d(np.asarray(t_grid, dtype=float)):
        if t == 0:
            out.append(1.0 + 0j)
            continue
        re = _improper_value(_Composite(lambda y, t=t: model.psi(t * y)[0], f), scheme)
        im = _improper_value(_Composite(lambda y, t=t: model.psi(t * y)[1], f), scheme)
        out.append(np.exp(-re + 1j * im))
    return np.array(out)


def compare(empirical, analytic, z_threshold=4.0):
    """Pointwise z-scores, the larger of the real and imaginary ones.

    Passes when every point stays within ``z_threshold``. The notes record
    the Bonferroni level implied for the whole grid.
    """
    a = np.asarray(analytic, dtype=complex)
    if len(a) != len(empirical.t):
        raise ValueError("analytic values do not match the t grid")
    d = empirical.values - a

    def z(diff, se):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.abs(diff) / se
        return np.where(se > 0, out, np.where(np.abs(diff) > 1e-12, np.inf, 0.0))

    zs = np.maximum(z(d.real, empirical.se_re), z(d.imag, empirical.se_im))
    m = 2 * len(zs)
    level = min(1.0, m * 2 * stats.norm.sf(z_threshold))
    notes = [f"{m} component tests at {z_threshold} sigma: familywise level <= {level:.2e}"]
    if empirical.wide_ci:
        notes.append("fewer samples than recommended; intervals are wide")
    return ChfComparison(empirical.t, empirical.values, empirical.se_re, empirical.se_im,
                         a, zs, z_threshold, bool(np.all(zs <= z_threshold)), notes)


def sample_series_values(f, spec, replicates, seed, N=None, experiment="chf",
                         workers=1):
    """Replicates of ``sum f(S_n)``.

    With compact support every arrival inside it is used; otherwise the first
    ``N`` arrivals.
    """
    hi = getattr(f, "support", (0.0, math.inf))[1]

    def one(stream):
        arr = ArrivalStream(spec, stream)
        if math.isfinite(hi):
            arr.extend_past(hi)
            n = int(np.searchsorted(arr.arrivals, hi, side="left"))
        else:
            if N is None:
                raise ValueError("N is required for functions without compact support")
            n = N
        return partial_sum(f, arr, n)

    return np.array(map_replicates(one, replicates, seed, experiment, workers))
