"""
Three-series diagnostics
========================

The LePage series converges a.s. when the integrals of K1, K3 and the
improper integral of K2 over s all exist. The check reports a verdict for each
instead of a proof; an undecided tail is called inconclusive.
"""

from poissinc import KFunctionSet, LevyModel, MarkerDensity, SeriesFunction
from poissinc.kfunctions import three_series_check

sinc = SeriesFunction.sinc()
cases = {
    "delta_1, pareto r=3": KFunctionSet(MarkerDensity.pareto_tail(3.0, 1.0, unnormalized=True),
                                        LevyModel.poisson_unit(), sinc),
    "delta_1, exponential": KFunctionSet(MarkerDensity.exponential_unit(),
                                         LevyModel.poisson_unit(), sinc),
    "gamma, pareto r=3": KFunctionSet(MarkerDensity.pareto_tail(3.0, 1.0),
                                      LevyModel.gamma_unit(), sinc),
}
for name, kset in cases.items():
    rep = three_series_check(kset)
    print(f"{name:22s} {rep.verdicts}")
    print(f"{'':22s} K1 integral {rep.k1.value:.4g}, K3 integral {rep.k3.value:.4g}")
    for note in rep.notes:
        print(f"{'':22s} note: {note}")
