"""
Renewal arrivals and the trigonometric walk
===========================================

Arrivals S_n are partial sums of i.i.d. positive increments. The walk
Z_n = sum_k exp(i S_k) grows like sqrt(n) once the increments are not lattice.
"""

import numpy as np

from poissinc import ArrivalStream, DistributionSpec, RngStream, char_value, cz_constant
from poissinc.trigsums import build_trig_path, mean_of_Z, second_moment_of_Z

spec = DistributionSpec.exponential(1.0)
arr = ArrivalStream(spec, RngStream(7, "demo-arrivals")).extend(10 ** 5)
print("first arrivals:", np.round(arr.arrivals[:5], 4))
print("S_n / n at n = 1e5:", arr.arrivals[-1] / 10 ** 5)

# streams are prefix-stable: asking for more never changes what is there
again = ArrivalStream(spec, RngStream(7, "demo-arrivals")).extend(10)
print("prefix stable:", np.array_equal(again.arrivals, arr.arrivals[:10]))

z = char_value(spec)
print("z = E exp(iX) =", z, " c_z =", cz_constant(z))

path = build_trig_path(arr, 2 ** 14)
n = np.array([2 ** 8, 2 ** 11, 2 ** 14])
print("|Z_n| on one path:   ", np.round(np.abs(path.Z[n]), 2))
print("sqrt(E|Z_n|^2) exact:", np.round(np.sqrt(second_moment_of_Z(n, z)), 2))
print("E Z_n (bounded):     ", np.round(mean_of_Z(n, z), 4))

# the Doob split Z_n = M_n + z Z_{n-1} holds pathwise
print("Doob identity error:", np.max(np.abs(path.Z - path.M - path.A)))

# a lattice increment would make the walk degenerate
print("deterministic(pi) is nondegenerate:", DistributionSpec.deterministic(np.pi).nondegenerate)
