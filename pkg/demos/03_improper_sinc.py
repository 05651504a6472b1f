"""
The improper integral of sinc
=============================

sin(x)/x is not Lebesgue integrable on (0, inf), but the limit over half
periods exists. The window integrals alternate in sign, so averaging the
partial sums repeatedly (the Euler transform) settles quickly.
"""

import math

import numpy as np

from poissinc import ImproperScheme, SeriesFunction, improper_integral

sinc = SeriesFunction.sinc()
res = improper_integral(sinc, ImproperScheme(max_windows=200))
print("value:", res.value, " error:", res.value - math.pi / 2)
print("windows used:", res.windows_used, " method:", res.method)
print("first window values:", np.round(res.window_values[:6], 5))

# plain partial sums are still off by about 1/(k pi) after k windows
print("raw partial after", res.windows_used, "windows:", res.partials[-1])

# 1/x has neither alternation nor decay, so the value is withheld
bad = improper_integral(lambda x: 1.0 / x, ImproperScheme(max_windows=200))
print("1/x converged:", bad.converged, "|", bad.message)

# the same engine handles complex integrands such as exp(ix)/x from 1
cis = improper_integral(SeriesFunction.cis_over_x(), lower=1.0)
print("int_1^inf exp(ix)/x dx =", cis.value)
