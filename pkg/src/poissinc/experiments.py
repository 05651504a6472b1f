"""Experiment runners behind the command line.

Each runner takes an :class:`~poissinc.config.ExperimentConfig` and an output
directory, writes its CSV files and returns an :class:`ExperimentResult`.
Every CSV begins with ``#`` comment lines carrying the library version and
the config digest; nothing time-dependent is written, so identical configs
give identical bytes.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import __version__
from ._numerics import compensated_cumsum
from .chf import analytic_chf_Nf, analytic_chf_Xf, compare, empirical_chf, sample_series_values
from .config import ConfigError
from .distributions import char_value, cz_constant
from .improper import ImproperScheme, improper_integral
from .kfunctions import (KFunctionSet, envelope_slope, exp_marker_envelope_check,
                         exp_marker_sinc_k, k_sweep, three_series_check)
from .levy import sample_lepage_values
from .pointprocess import ArrivalStream
from .rng import RngStream, map_replicates
from .series import (abel_evaluate, block_sum, direct_evaluate, half_period_partition,
                     permuted_sum)
from .trigsums import norm_growth_report, sample_trig_moduli

__all__ = ["Metric", "ExperimentResult", "run_experiment", "RUNNERS"]


@dataclass
class Metric:
    name: str
    value: float
    ci_lo: float = math.nan
    ci_hi: float = math.nan
    verdict: str = ""


@dataclass
class ExperimentResult:
    kind: str
    config: str
    digest: str
    seed: int
    metrics: list = field(default_factory=list)
    files: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def status(self):
        verdicts = [m.verdict for m in self.metrics]
        if "fail" in verdicts:
            return "fail"
        if "pass" in verdicts:
            return "pass"
        return "report"

    def metric(self, name):
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)


class _Writer:
    def __init__(self, cfg, out):
        self.cfg, self.out = cfg, out
        self.files = []
        os.makedirs(out, exist_ok=True)

    @property
    def header(self):
        return (f"poissinc {__version__}", f"config {self.cfg.digest}",
                f"experiment {self.cfg.kind} seed {self.cfg.seed}")

    def path(self, name):
        p = os.path.join(self.out, name)
        self.files.append(p)
        return p

    def table(self, name, columns, rows):
        with open(self.path(name), "w", newline="") as fh:
            for line in self.header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _mean_ci(x):
    x = np.asarray(x, dtype=float)
    m = float(x.mean())
    h = 1.96 * float(x.std(ddof=1)) / math.sqrt(len(x)) if len(x) > 1 else math.nan
    return m, m - h, m + h


def _var_ci(x):
    """Sample variance with a normal-approximation interval from the fourth
    central moment."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    v = float(x.var(ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    h = 1.96 * math.sqrt(max(m4 - v * v, 0.0) / n)
    return v, v - h, v + h


def _need(cfg, minimum=1):
    if cfg.replicates < minimum:
        raise ConfigError(f"kind {cfg.kind!r} needs replicates >= {minimum}")


def _optional_n(cfg):
    n = cfg.number("n", int)
    return n if n > 0 else None


# ---------------------------------------------------------------------------

def run_series(cfg, w):
    _need(cfg, 2)
    f, spec = cfg.spec("f"), cfg.spec("increments")
    vals = sample_series_values(f, spec, cfg.replicates, cfg.seed, N=_optional_n(cfg),
                                experiment="series", workers=cfg.workers)
    vals = np.asarray(vals, dtype=complex)
    w.table("values.csv", ["replicate", "value_real", "value_imag"],
            ((i, v.real, v.imag) for i, v in enumerate(vals)))
    metrics = [Metric("mean_real", *_mean_ci(vals.real)),
               Metric("variance_real", *_var_ci(vals.real))]
    if np.any(vals.imag != 0):
        metrics += [Metric("mean_imag", *_mean_ci(vals.imag)),
                    Metric("variance_imag", *_var_ci(vals.imag))]
    return metrics, []


def run_abel(cfg, w):
    _need(cfg)
    spec, N = cfg.spec("increments"), cfg.number("n", int)
    stride = max(1, cfg.number("trace_stride", int))

    def rel_gap(ev):
        d = ev.extras["direct"]
        return float(np.max(np.abs(ev.partial - d) / np.maximum(np.abs(d), 1e-300)))

    def one(stream):
        ev = abel_evaluate(ArrivalStream(spec, stream), N)
        return rel_gap(ev), ev if stream.replicate == 0 else None

    out = map_replicates(one, cfg.replicates, cfg.seed, "abel", cfg.workers)
    gaps = np.array([g for g, _ in out])
    ev0 = out[0][1]
    rows = []
    for i in range(0, N, stride):
        d = ev0.extras["direct"][i]
        rows.append(("direct", i + 1, d.real, d.imag))
        rows.append(("abel", i + 1, ev0.partial[i].real, ev0.partial[i].imag))
    w.table("abel_trace.csv", ["method", "n_or_k", "partial_real", "partial_imag"], rows)
    metrics = [Metric("max_relative_gap", float(gaps.max()),
                      verdict="pass" if gaps.max() <= 1e-9 else "fail")]
    s1 = cfg.number("adversarial_s1")
    if s1 > 0:
        inc = RngStream(cfg.seed, "abel-adversarial").generator.standard_exponential(N)
        inc[0] = s1
        g = rel_gap(abel_evaluate(ArrivalStream.from_increments(inc), N))
        metrics.append(Metric("adversarial_relative_gap", g,
                              verdict="pass" if g <= 1e-9 else "fail"))
    metrics.append(Metric("boundary_term_abs", float(abs(ev0.boundary[-1]))))
    return metrics, []


def run_permute(cfg, w):
    f, spec = cfg.spec("f"), cfg.spec("increments")
    N, m, band = cfg.number("n", int), cfg.number("permutations", int), cfg.number("band")
    arr = ArrivalStream(spec, RngStream(cfg.seed, "permute", 0))
    base = direct_evaluate(f, arr, N)
    base_fluct = base.fluctuation()
    root = RngStream(cfg.seed, "permutation")

    def one(stream):
        ev = permuted_sum(f, arr, N, root.split(stream.replicate))
        return ev.fluctuation(), abs(ev.total - base.total)

    res = map_replicates(one, m, cfg.seed, "permute", cfg.workers)
    fl = np.array([r[0] for r in res])
    diffs = np.array([r[1] for r in res])
    w.table("permutations.csv", ["permutation", "fluctuation", "total_gap"],
            ((i, a, b) for i, (a, b) in enumerate(res)))
    p95 = float(np.percentile(fl, 95))
    scale = max(1.0, abs(base.total))
    return [
        Metric("max_total_gap", float(diffs.max()),
               verdict="pass" if diffs.max() <= 1e-9 * scale else "fail"),
        Metric("unpermuted_fluctuation", base_fluct),
        Metric("permuted_fluctuation_p95", p95,
               verdict="pass" if p95 <= band * base_fluct else "fail"),
        Metric("fluctuation_ratio_p95", p95 / base_fluct),
    ], []


def run_blocks(cfg, w):
    _need(cfg, 2)
    f, spec = cfg.spec("f"), cfg.spec("increments")
    K, period, tol = cfg.number("blocks", int), cfg.number("period"), cfg.number("tolerance")
    part = half_period_partition(K, period)
    T = part[-1]

    def one(stream):
        arr = ArrivalStream(spec, stream).extend_past(T)
        ev = block_sum(f, arr, part, integrals=False)
        S = arr.arrivals
        direct = compensated_cumsum(f(S))
        idx = np.searchsorted(S, part[1:], side="left")
        ref = np.where(idx > 0, direct[np.maximum(idx - 1, 0)], 0.0)
        mismatch = int(np.count_nonzero(ev.partial != ref))
        return ev.extras["blocks"], mismatch

    res = map_replicates(one, cfg.replicates, cfg.seed, "blocks", cfg.workers)
    X = np.array([r[0] for r in res])
    mismatches = sum(r[1] for r in res)
    total = np.real(X.sum(axis=1)) if not np.iscomplexobj(X) else X.sum(axis=1).real
    rate = 1.0 / spec.mean()
    edges = part
    integ = np.array([integrate.quad(lambda x: float(np.real(f(x))), a, b, limit=200,
                                     epsabs=1e-13)[0] for a, b in zip(edges[:-1], edges[1:])])
    sq = np.array([integrate.quad(lambda x: float(np.abs(f(x)) ** 2), a, b, limit=200,
                                  epsabs=1e-13)[0] for a, b in zip(edges[:-1], edges[1:])])
    target_var = rate * math.fsum(sq)
    target_mean = rate * math.fsum(integ)
    v, vlo, vhi = _var_ci(total)
    w.table("blocks.csv", ["k", "lo", "hi", "block_integral", "mean_X", "var_X"],
            ((k + 1, edges[k], edges[k + 1], rate * integ[k], X[:, k].real.mean(),
              X[:, k].real.var(ddof=1)) for k in range(K)))
    signs = np.sign(integ)
    alternating = bool(np.all(signs[1:] == -signs[:-1]))
    shrinking = bool(np.all(np.abs(integ[1:]) < np.abs(integ[:-1])))
    rel = abs(v - target_var) / target_var
    return [
        Metric("boundary_mismatches", mismatches, verdict="pass" if mismatches == 0 else "fail"),
        Metric("variance_total", v, vlo, vhi),
        Metric("variance_target", target_var),
        Metric("variance_relative_error", rel, verdict="pass" if rel <= tol else "fail"),
        Metric("mean_total", *_mean_ci(total)),
        Metric("mean_target", target_mean),
        Metric("block_integrals_alternate", float(alternating)),
        Metric("block_integrals_shrink", float(shrinking)),
    ], []


def run_norm_growth(cfg, w):
    _need(cfg, 2)
    spec = cfg.spec("increments")
    grid = 2 ** np.arange(cfg.number("jmin", int), cfg.number("jmax", int) + 1)
    z = char_value(spec)
    moduli = sample_trig_moduli(spec, grid, cfg.replicates, cfg.seed, experiment="norm-growth",
                                workers=cfg.workers)
    metrics = []
    for p in cfg.grid("p"):
        rep = norm_growth_report(moduli, grid, p, z, seed=cfg.seed,
                                 resamples=cfg.number("resamples", int))
        rep.to_csv(w.path(f"norm_growth_p{p:g}.csv"), header=w.header)
        lo, hi = (0.45, 0.55) if p >= 2 else (-math.inf, 0.55)
        metrics.append(Metric(f"slope_p{p:g}", rep.slope, *rep.slope_ci,
                              verdict="pass" if lo <= rep.slope <= hi else "fail"))
    m2 = np.mean(moduli[:, -1] ** 2)
    ratio = m2 / (grid[-1] * cz_constant(z))
    metrics.append(Metric("second_moment_over_n_cz", float(ratio),
                          verdict="pass" if 0.9 <= ratio <= 1.1 else "fail"))
    return metrics, []


def _chf_metrics(cfg, w, samples, analytic, t):
    emp = empirical_chf(samples, t)
    cmp = compare(emp, analytic, cfg.number("z_threshold"))
    cmp.to_csv(w.path("chf.csv"), header=w.header)
    metrics = [Metric("max_zscore", float(np.max(cmp.zscore)),
                      verdict="pass" if cmp.passed else "fail"),
               Metric("max_discrepancy", cmp.max_discrepancy)]
    return metrics, emp, cmp


def run_chf(cfg, w):
    _need(cfg, 2)
    f, spec = cfg.spec("f"), cfg.spec("increments")
    if spec.family != "exponential":
        raise ConfigError("the analytic functional needs Poisson arrivals (exponential increments)")
    t = cfg.grid("t_grid")
    samples = sample_series_values(f, spec, cfg.replicates, cfg.seed, N=_optional_n(cfg),
                                   experiment="chf", workers=cfg.workers)
    analytic = analytic_chf_Nf(f, t, intensity=dict(spec.params)["rate"])
    metrics, emp, cmp = _chf_metrics(cfg, w, samples, analytic, t)
    shift = cfg.number("control_shift")
    if shift > 0:
        control = analytic + shift * emp.se_re
        c2 = compare(emp, control, cfg.number("z_threshold"))
        metrics.append(Metric("control_max_zscore", float(np.max(c2.zscore)),
                              verdict="pass" if not c2.passed else "fail"))
    return metrics, cmp.notes


def run_lepage(cfg, w):
    _need(cfg, 2)
    model, marker, f = cfg.spec("model"), cfg.spec("marker"), cfg.spec("f")
    t = cfg.grid("t_grid")
    samples = sample_lepage_values(model, marker, f, cfg.replicates, cfg.seed,
                                   N=_optional_n(cfg), workers=cfg.workers)
    analytic = analytic_chf_Xf(model, f, t)
    metrics, _, cmp = _chf_metrics(cfg, w, samples, analytic, t)
    if model.kind == "poisson_unit":
        metrics.append(Metric("mean", *_mean_ci(np.real(samples))))
    return metrics, cmp.notes


def run_kfun(cfg, w):
    kset = KFunctionSet(cfg.spec("marker"), cfg.spec("model"), cfg.spec("f"),
                        cfg.number("cutoff"))
    s = np.array(cfg.grid("s_grid"))
    rows = k_sweep(kset, s, path=w.path("kfunctions.csv"), header=w.header)
    metrics, notes = [], []
    md = kset.marker
    if kset.reducible and kset.f.kind in ("sinc", "cos_over_x", "cis_over_x") and len(s) >= 2:
        slope, _ = envelope_slope(kset, s)
        if md.family == "pareto_tail":
            target = -(1.0 + 1.0 / md.r)
            metrics.append(Metric("envelope_slope", slope, verdict="pass"
                                  if abs(slope - target) <= 0.05 * abs(target) else "fail"))
            metrics.append(Metric("envelope_slope_target", target))
        else:
            metrics.append(Metric("envelope_slope", slope))
    if (md.family == "exponential_unit" and kset.f.kind == "sinc"
            and kset.model.kind == "poisson_unit" and math.isinf(kset.cutoff)):
        gap = float(np.max(np.abs(rows[:, 2] - exp_marker_sinc_k(s))))
        metrics.append(Metric("closed_form_gap", gap, verdict="pass" if gap <= 1e-8 else "fail"))
        ok, peaks, top = exp_marker_envelope_check()
        metrics.append(Metric("envelope_peak_min", float(peaks.min()), verdict="pass" if ok else "fail"))
        metrics.append(Metric("envelope_ratio_max", top))
    elif md.family == "exponential_unit" and kset.f.kind == "sinc":
        notes.append("closed-form comparison applies with cutoff = inf")
    return metrics, notes


def run_three_series(cfg, w):
    kset = KFunctionSet(cfg.spec("marker"), cfg.spec("model"), cfg.spec("f"),
                        cfg.number("cutoff"))
    rep = three_series_check(kset)
    rows = [("K1", j, v) for j, v in enumerate(rep.k1.contributions)]
    rows += [("K3", j, v) for j, v in enumerate(rep.k3.contributions)]
    rows += [("K2_abs", j, v) for j, v in enumerate(rep.k2_abs_contributions)]
    w.table("three_series.csv", ["quantity", "window", "contribution"], rows)
    code = {"finite": 1.0, "divergent": math.inf, "inconclusive": math.nan}
    metrics = [Metric("K1_integral", rep.k1.value, verdict=rep.k1.verdict),
               Metric("K3_integral", rep.k3.value, verdict=rep.k3.verdict),
               Metric("K2_abs_integrable", code.get(rep.k2_abs_verdict, math.nan),
                      verdict=rep.k2_abs_verdict),
               Metric("K2_partials_settling", float(rep.k2_settling))]
    return metrics, list(rep.notes)


def run_improper(cfg, w):
    f = cfg.spec("f")
    scheme = ImproperScheme(rule=cfg.get("rule"), period=cfg.number("period"),
                            acceleration=cfg.get("acceleration"), tol=cfg.number("tol"),
                            max_windows=cfg.number("max_windows", int))
    res = improper_integral(f, scheme)
    res.to_csv(w.path("improper.csv"), header=w.header)
    v = res.value
    metrics = [Metric("converged", float(res.converged),
                      verdict="report" if res.converged else "non-convergent"),
               Metric("windows_used", res.windows_used),
               Metric("achieved", res.achieved)]
    if v is not None:
        v = complex(v)
        metrics.insert(0, Metric("value_real", v.real, v.real - res.achieved,
                                 v.real + res.achieved))
        if v.imag:
            metrics.insert(1, Metric("value_imag", v.imag))
    return metrics, [res.message] if res.message else []


RUNNERS = {
    "series": run_series, "abel": run_abel, "permute": run_permute, "blocks": run_blocks,
    "norm-growth": run_norm_growth, "chf": run_chf, "lepage": run_lepage, "kfun": run_kfun,
    "three-series": run_three_series, "improper": run_improper,
}


def run_experiment(cfg, out):
    """Run ``cfg``, write its CSVs into ``out`` and return the result."""
    t0 = time.perf_counter()
    w = _Writer(cfg, out)
    metrics, notes = RUNNERS[cfg.kind](cfg, w)
    w.table("summary.csv", ["metric", "value", "ci_lo", "ci_hi", "verdict"],
            ((m.name, float(m.value), float(m.ci_lo), float(m.ci_hi), m.verdict)
             for m in metrics))
    with open(w.path("config.ini"), "w") as fh:
        fh.write(cfg.canonical())
    return ExperimentResult(cfg.kind, cfg.canonical(), cfg.digest, cfg.seed, metrics,
                            w.files, notes, time.perf_counter() - t0)
