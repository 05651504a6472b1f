"""
K-functions and their decay
===========================

For nu = delta_1 and a decreasing marker density p, the truncated mean of a
LePage term is K(s) = int_{a(s)}^inf f p with p(a(s)) = 1/s. For a Pareto
marker p(v) = v^(-r) and f = sinc, K(s) decays like s^(-1-1/r). For the
exponential marker K(s) = Im E_1((1-i) log s).
"""

import numpy as np

from poissinc import KFunctionSet, LevyModel, MarkerDensity, SeriesFunction
from poissinc.kfunctions import (envelope_slope, exp_marker_envelope_check,
                                 exp_marker_sinc_k, k_functions)

sinc = SeriesFunction.sinc()
s_grid = np.array([1e2, 1e3, 1e4, 1e5, 1e6])

for r in (2.0, 3.0):
    kset = KFunctionSet(MarkerDensity.pareto_tail(r, 1.0, unnormalized=True),
                        LevyModel.poisson_unit(), sinc)
    k2 = [k_functions(kset, s)[1] for s in s_grid]
    slope, env = envelope_slope(kset, s_grid)
    print(f"r = {r:g}: K(s) = {np.array2string(np.array(k2), precision=3)}")
    print(f"        envelope slope {slope:.4f}, expected {-(1 + 1 / r):.4f}")

kexp = KFunctionSet(MarkerDensity.exponential_unit(), LevyModel.poisson_unit(), sinc)
for s in (1e3, 1e6, 1e9):
    print(f"s = {s:.0e}: quadrature {k_functions(kexp, s)[1]: .6e}, "
          f"closed form {exp_marker_sinc_k(s): .6e}")
ok, peaks, top = exp_marker_envelope_check()
print("peaks of |K| s log s:", np.round(peaks[:5], 3), "... within [1/2, 2]:", ok)
