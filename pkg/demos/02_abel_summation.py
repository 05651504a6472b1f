"""
Summation by parts for sum exp(i S_n) / S_n
===========================================

With R_n = 1/S_n and D_n = R_n - R_{n+1},

    sum_{n<=N} exp(i S_n) R_n = R_N Z_N + sum_{n<N} D_n Z_n

The boundary term shrinks like N^(-1/2) and the second series converges
absolutely, which is where the random series gets its convergence.
"""

import numpy as np

from poissinc import ArrivalStream, DistributionSpec, RngStream
from poissinc.series import abel_evaluate

arr = ArrivalStream(DistributionSpec.exponential(1.0), RngStream(3, "demo-abel"))
ev = abel_evaluate(arr, 10 ** 5)
direct = ev.extras["direct"]

print("direct total:", direct[-1])
print("abel total:  ", ev.partial[-1])
print("max relative gap over all prefixes:",
      np.max(np.abs(ev.partial - direct) / np.abs(direct)))

for N in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5):
    print(f"N = {N:>6}: |R_N Z_N| = {abs(ev.boundary[N - 1]):.4f}")

# tail of the absolutely convergent part
D, Z = ev.extras["D"], ev.extras["Z"]
print("sum_{n>=1000} |D_n Z_n| =", np.sum(np.abs(D[999:] * Z[999:-1])))
