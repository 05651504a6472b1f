"""Exponential sums ``Z_n = sum_k exp(i S_k)`` along renewal paths.

Conventions
-----------
``M`` and ``A`` follow the one-step recursion ``Z_n = M_n + z Z_{n-1}``, i.e.
``A_n = z Z_{n-1}`` and ``M_n = Z_n - z Z_{n-1}``. Its increments
``zeta_n - z zeta_{n-1}`` are martingale differences for ``n >= 2``; the first
one, ``zeta_1``, has mean ``z``. The centered Doob pair, with
``E[dZ_n | F_{n-1}] = z zeta_{n-1}`` and ``zeta_0 = 1``, is available as
:attr:`TrigSumPath.doob_martingale` and :attr:`TrigSumPath.doob_compensator`.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._numerics import compensated_cumsum, loglog_slope
from .distributions import DegenerateError, char_value, cz_constant
from .pointprocess import ArrivalStream
from .rng import RngStream, map_replicates

__all__ = [
    "TrigSumPath", "NormGrowthReport", "build_trig_path", "mean_of_Z",
    "second_moment_of_Z", "convolve_martingale", "sample_trig_moduli",
    "norm_growth_report", "estimate_norm_growth", "lyons_partial_sums",
]


@dataclass
class TrigSumPath:
    S: np.ndarray
    Z: np.ndarray
    M: np.ndarray
    A: np.ndarray
    z: complex

    @property
    def N(self):
        return len(self.Z) - 1

    @property
    def zeta(self):
        return np.diff(self.Z)

    @property
    def doob_compensator(self):
        out = self.A.copy()
        out[1:] += self.z
        return out

    @property
    def doob_martingale(self):
        return self.Z - self.doob_compensator


def build_trig_path(arrivals, N, z=None):
    """Build ``Z``, ``M``, ``A`` (each of length ``N + 1``) along ``arrivals``."""
    if z is None:
        z = char_value(arrivals.spec)
    z = complex(z)
    if abs(z) >= 1.0 - 1e-15:
        raise DegenerateError(f"|z| = {abs(z):.17g}; Doob pieces need |z| < 1")
    if len(arrivals) < N:
        arrivals.extend(N)
    S = arrivals.arrivals[:N]
    Z = np.empty(N + 1, dtype=complex)
    Z[0] = 0.0
    Z[1:] = compensated_cumsum(np.exp(1j * S))
    A = np.empty(N + 1, dtype=complex)
    A[0] = 0.0
    A[1:] = z * Z[:-1]
    M = Z - A
    return TrigSumPath(S=S, Z=Z, M=M, A=A, z=z)


def mean_of_Z(n, z):
    """``E Z_n = z (1 - z**n) / (1 - z)``."""
    z = complex(z)
    n = np.asarray(n)
    out = z * (1.0 - z ** n) / (1.0 - z)
    return complex(out) if out.ndim == 0 else out


def second_moment_of_Z(n, z):
    """Exact ``E|Z_n|^2`` from ``E|Z_k|^2 = 1 + 2 Re E Z_{k-1} + E|Z_{k-1}|^2``.

    Summed in closed form: ``n c_z - 2 Re[z (1 - z**n) / (1 - z)**2]``.
    """
    z = complex(z)
    n = np.asarray(n)
    c = cz_constant(z)
    return n * c - 2.0 * (z * (1.0 - z ** n) / (1.0 - z) ** 2).real


def convolve_martingale(M, z):
    """Explicit ``sum_{k=0}^{N} z**(N-k) M_k`` for ``N = len(M) - 1``."""
    N = len(M) - 1
    powers = complex(z) ** np.arange(N, -1, -1)
    return np.sum(powers * M)


# ---------------------------------------------------------------------------
# Monte Carlo norm growth

@dataclass
class NormGrowthReport:
    p: float
    n_grid: np.ndarray
    norm: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    slope: float
    slope_ci: tuple
    cz: float
    replicates: int
    wide_ci: bool = False
    extras: dict = field(default_factory=dict)

    def rows(self):
        out = [(self.p, int(n), v, lo, hi)
               for n, v, lo, hi in zip(self.n_grid, self.norm, self.ci_lo, self.ci_hi)]
        out.append((self.p, "slope", self.slope, self.slope_ci[0], self.slope_ci[1]))
        return out

    def to_csv(self, path, header=()):
        with open(path, "w", newline="") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["p", "n", "norm_est", "ci_lo", "ci_hi"])
            for row in self.rows():
                w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def sample_trig_moduli(spec, n_grid, replicates, seed, experiment="trig",
                       workers=1):
    """``|Z_n|`` at each grid point for ``replicates`` independent paths.

    Returns an array of shape ``(replicates, len(n_grid))``.
    """
    n_grid = np.asarray(n_grid, dtype=int)
    nmax = int(n_grid.max())

    def one(stream):
        arr = ArrivalStream(spec, stream).extend(nmax)
        Z = np.cumsum(np.exp(1j * arr.arrivals))
        return np.abs(Z[n_grid - 1])

    return np.array(map_replicates(one, replicates, seed, experiment, workers))


def _bootstrap_means(values, resamples, stream, chunk=100):
    n = values.shape[0]
    gen = stream.generator
    pvals = np.full(n, 1.0 / n)
    out = []
    for start in range(0, resamples, chunk):
        k = min(chunk, resamples - start)
        counts = gen.multinomial(n, pvals, size=k)
        out.append(counts @ values / n)
    return np.vstack(out)


def norm_growth_report(moduli, n_grid, p, z, seed=0, resamples=2000, level=0.95):
    """Summarize ``(E|Z_n|^p)^(1/p)`` over the grid with bootstrap intervals."""
    n_grid = np.asarray(n_grid, dtype=int)
    if np.any(np.diff(n_grid) <= 0):
        raise ValueError("n grid must be strictly increasing")
    reps = moduli.shape[0]
    powered = moduli ** p
    norm = powered.mean(axis=0) ** (1.0 / p)
    boot = _bootstrap_means(powered, resamples,
                            RngStream(seed, "bootstrap", int(round(1000 * p)))) ** (1.0 / p)
    q = [(1 - level) / 2 * 100, (1 + level) / 2 * 100]
    lo, hi = np.percentile(boot, q, axis=0)
    slopes = np.array([loglog_slope(n_grid, b) for b in boot])
    s_lo, s_hi = np.percentile(slopes, q)
    rel_width = np.max((hi - lo) / norm)
    wide = bool(reps < 1000 or not np.all(np.isfinite(hi - lo)) or rel_width > 0.2)
    if wide:
        warnings.warn(f"norm-growth CIs are wide (replicates={reps}, "
                      f"max relative width={rel_width:.3f})", RuntimeWarning)
    try:
        cz = cz_constant(z)
    except DegenerateError:
        cz = float("nan")
    return NormGrowthReport(p=float(p), n_grid=n_grid, norm=norm, ci_lo=lo, ci_hi=hi,
                            slope=loglog_slope(n_grid, norm), slope_ci=(s_lo, s_hi),
                            cz=cz, replicates=reps, wide_ci=wide)


def estimate_norm_growth(spec, p, n_grid, replicates, seed, workers=1,
                         resamples=2000):
    """Monte Carlo ``L^p`` norms of ``Z_n`` and their log-log slope."""
    if p <= 0:
        raise ValueError("p must be positive")
    z = char_value(spec)
    moduli = sample_trig_moduli(spec, n_grid, replicates, seed, workers=workers)
    return norm_growth_report(moduli, n_grid, p, z, seed=seed, resamples=resamples)


def lyons_partial_sums(n_grid, second_moments):
    """Partial sums of ``E|Z_N|^2 / N^3`` along ``n_grid``."""
    n = np.asarray(n_grid, dtype=float)
    return np.cumsum(np.asarray(second_moments) / n ** 3)
