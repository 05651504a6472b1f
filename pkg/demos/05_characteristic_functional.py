"""
Characteristic functional of a Poisson sum
==========================================

For unit-rate Poisson arrivals,

    E exp(i t Nf) = exp(-int (1 - cos t f) + i int sin t f).

For f = 1_[0,1] this is the Poisson(1) ch.f. exp(e^{it} - 1). For f = sinc
the sine integral exists only as an improper limit.
"""

import numpy as np

from poissinc import DistributionSpec, SeriesFunction
from poissinc.chf import analytic_chf_Nf, compare, empirical_chf, sample_series_values

spec = DistributionSpec.exponential(1.0)
t = np.array([0.5, 1.0, 2.0])

window = SeriesFunction.indicator(0, 1)
w = sample_series_values(window, spec, 10 ** 4, seed=19)
cmp = compare(empirical_chf(w, t), analytic_chf_Nf(window, t))
print("indicator: max z =", np.round(cmp.zscore.max(), 2), "passed:", cmp.passed)
print("  analytic:", np.round(cmp.analytic, 5))
print("  poisson: ", np.round(np.exp(np.exp(1j * t) - 1), 5))

# a negative control: move the analytic values by 10 standard errors
emp = empirical_chf(w, t)
shifted = compare(emp, cmp.analytic + 10 * (emp.se_re + 1j * emp.se_im))
print("shifted control passed:", shifted.passed)

# sinc: partial sums over the first 10^4 arrivals stand in for the limit
sinc = SeriesFunction.sinc()
ws = sample_series_values(sinc, spec, 4000, seed=23, N=10 ** 4)
cs = compare(empirical_chf(ws, [1.0]), analytic_chf_Nf(sinc, [1.0]))
print("sinc at t=1: analytic", np.round(cs.analytic[0], 5), " empirical",
      np.round(cs.empirical[0], 5), " z =", np.round(cs.zscore[0], 2))
