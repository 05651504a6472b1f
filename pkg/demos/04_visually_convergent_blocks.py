"""
Blocked sums over half periods
==============================

Grouping the terms of sum sinc(S_n) by the blocks [k pi, (k+1) pi) gives a
series whose block values X_k look convergent. The blocked running sum agrees
exactly with the direct partial sums at block ends, and the variance of the
total matches Campbell's formula: the integral of f^2.
"""

import math

import numpy as np
from scipy import integrate

from poissinc import ArrivalStream, DistributionSpec, RngStream, SeriesFunction
from poissinc.rng import map_replicates
from poissinc.series import block_sum, half_period_partition

sinc = SeriesFunction.sinc()
spec = DistributionSpec.exponential(1.0)
K = 200
edges = half_period_partition(K)


def total(stream):
    a = ArrivalStream(spec, stream).extend_past(edges[-1])
    return block_sum(sinc, a, edges, integrals=False).partial[-1]


path = ArrivalStream(spec, RngStream(5, "demo-blocks-path")).extend_past(edges[20])
one = block_sum(sinc, path, edges[:21])
print("block integrals:", np.round(one.extras["block_integrals"][:6], 4))
print("block values X_k:", np.round(one.extras["blocks"][:6], 4))

totals = np.array(map_replicates(total, 4000, 11, "demo-blocks"))
target = integrate.quad(lambda x: sinc(x) ** 2, 0, K * math.pi, limit=2000)[0]
print(f"Var(sum X_k) = {totals.var(ddof=1):.4f}, integral of sinc^2 = {target:.4f}")
print(f"mean = {totals.mean():.4f}, integral of sinc = "
      f"{integrate.quad(sinc, 0, K * math.pi, limit=2000)[0]:.4f}")
