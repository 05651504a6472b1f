"""
LePage series
=============

X f = sum_n H(S_n p(V_n)) f(V_n), with H the inverse of the Levy tail and
V_n i.i.d. markers with density p. Two cases:

* nu = delta_1 gives H = 1_[0,1], and X 1_[0,1] is a Poisson(1) count.
* a stable(1/2) measure with uniform markers gives the classical
  sum S_n^(-2) 1{V_n <= 1}.
"""

import numpy as np

from poissinc import LevyModel, MarkerDensity, SeriesFunction
from poissinc.chf import analytic_chf_Xf, compare, empirical_chf
from poissinc.levy import sample_lepage_values

f = SeriesFunction.indicator(0, 1)

pois = sample_lepage_values(LevyModel.poisson_unit(), MarkerDensity.exponential_unit(), f,
                            10 ** 4, seed=4)
print("delta_1: mean", pois.mean(), " variance", pois.var(), " (both 1 for Poisson(1))")

stable = LevyModel.stable(0.5)
print("stable(1/2): c_alpha =", stable.c_alpha, " s_alpha =", stable.s_alpha)
x = sample_lepage_values(stable, MarkerDensity.uniform_unit(), f, 10 ** 4, seed=5, N=10 ** 4)
t = np.array([0.25, 1.0])
cmp = compare(empirical_chf(x, t), analytic_chf_Xf(stable, f, t), z_threshold=3.0)
print("empirical:", np.round(cmp.empirical, 4))
print("analytic: ", np.round(cmp.analytic, 4))
print("max z:", np.round(cmp.zscore.max(), 2), " passed:", cmp.passed)
