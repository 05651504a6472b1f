"""Random series over Poisson and renewal arrivals, improper oscillatory
integrals, LePage series and three-series diagnostics."""

__version__ = "0.1.0"

from .distributions import (DistributionSpec, MarkerDensity, char_value, cz_constant,
                            marker_sample, parse_distribution, parse_marker, sample)
from .pointprocess import ArrivalStream
from .rng import RngStream
from .series import (SeriesFunction, abel_evaluate, block_sum, parse_function,
                     partial_sum, permuted_sum, tail_diagnostics)
from .trigsums import build_trig_path, estimate_norm_growth, mean_of_Z
from .improper import ImproperScheme, improper_integral
from .levy import LevyModel, lepage_evaluate, modulars, parse_levy, psi, tail_and_inverse
from .kfunctions import KFunctionSet, amplitude_k_bound, k_functions, three_series_check
from .chf import analytic_chf_Nf, compare, empirical_chf

__all__ = [
    "DistributionSpec", "MarkerDensity", "char_value", "cz_constant", "marker_sample",
    "parse_distribution", "parse_marker", "sample", "ArrivalStream", "RngStream",
    "SeriesFunction", "abel_evaluate", "block_sum", "parse_function", "partial_sum",
    "permuted_sum", "tail_diagnostics", "build_trig_path", "estimate_norm_growth",
    "mean_of_Z", "ImproperScheme", "improper_integral", "LevyModel", "lepage_evaluate",
    "modulars", "parse_levy", "psi", "tail_and_inverse", "KFunctionSet",
    "amplitude_k_bound", "k_functions", "three_series_check", "analytic_chf_Nf",
    "compare", "empirical_chf",
]
