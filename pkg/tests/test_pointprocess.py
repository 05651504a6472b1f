import math
from fractions import Fraction

import numpy as np
import pytest

from poissinc._numerics import ParameterError
from poissinc.distributions import DistributionSpec
from poissinc.pointprocess import (ArrivalStream, block_size, count_in, lpr_floor,
                                   poisson_arrivals)
from poissinc.rng import RngStream, map_replicates


def arrivals(spec=None, seed=3, rep=0):
    return ArrivalStream(spec or DistributionSpec.exponential(1.0), RngStream(seed, "pp", rep))


def test_deterministic_progression():
    a = arrivals(DistributionSpec.deterministic(1.0)).extend(5)
    assert np.array_equal(a.arrivals, [1, 2, 3, 4, 5])


def test_prefix_stability():
    a = arrivals().extend(100).extend(200)
    b = arrivals().extend(200)
    assert a.arrivals.tobytes() == b.arrivals.tobytes()
    # requests that cross several block boundaries in odd chunks
    c = arrivals()
    for n in (1, 255, 257, 700, 5000, 70000, 200000):
        c.extend(n)
    d = arrivals().extend(200000)
    assert c.arrivals.tobytes() == d.arrivals.tobytes()


def test_cannot_shrink():
    a = arrivals().extend(10)
    with pytest.raises(ParameterError):
        a.extend(5)


def test_block_schedule():
    assert [block_size(b) for b in range(4)] == [256, 256, 512, 1024]
    assert block_size(40) == 1 << 16


def test_slln_band():
    a = arrivals().extend(10 ** 6)
    assert abs(a.arrivals[-1] / 10 ** 6 - 1) < 0.004


def test_compensated_prefix_sums():
    a = arrivals().extend(10 ** 6)
    import math as m
    assert a.arrivals[-1] == m.fsum(a.increments)
    idx = np.array([1, 1000, 123456, 999999])
    exact = [m.fsum(a.increments[:i + 1]) for i in idx]
    assert np.all(np.abs(a.arrivals[idx] - exact) <= np.spacing(a.arrivals[idx]))


def test_monotone():
    a = arrivals(DistributionSpec.gamma(0.3, 1.0)).extend(50000)
    assert np.all(np.diff(a.arrivals) >= 0)
    r, _ = a.reciprocals(50000)
    assert np.all(np.diff(r) <= 0)


def test_reciprocals_small():
    a = ArrivalStream.from_increments([1.0, 1.0, 1.0])
    r, d = a.reciprocals(3)
    assert np.allclose(r, [1, 1 / 2, 1 / 3], rtol=1e-15)
    assert np.allclose(d, [1 / 2, 1 / 6], rtol=1e-15)


def test_reciprocal_difference_identity_exact_path():
    # dyadic increments keep every S_n exact, so only the final roundings remain
    gen = np.random.default_rng(0)
    inc = gen.integers(1, 4096, size=20000) / 1024.0
    a = ArrivalStream.from_increments(inc)
    _, d = a.reciprocals(20000)
    S = a.arrivals
    for n in range(0, 19999, 97):
        exact = Fraction(1) / Fraction(S[n]) - Fraction(1) / Fraction(S[n + 1])
        assert abs(Fraction(d[n]) - exact) <= Fraction(1, 10 ** 12) * exact


def test_reciprocal_difference_identity_and_bound():
    a = arrivals().extend(10 ** 5)
    r, d = a.reciprocals(10 ** 5)
    # R_n - R_{n+1} cancels; its rounding error is a few ulps of R_n
    assert np.all(np.abs(d - (r[:-1] - r[1:])) <= 4 * np.spacing(r[:-1]))
    x_next = a.increments[1:]
    assert np.all(d <= x_next * r[:-1] ** 2)
    assert np.all(d >= 0)


def test_zero_arrival_rejected():
    a = ArrivalStream.from_increments([0.0, 1.0])
    with pytest.raises(ZeroDivisionError):
        a.reciprocals(2)


def test_fixed_path_cannot_extend():
    a = ArrivalStream.from_increments([1.0, 2.0])
    with pytest.raises(ParameterError):
        a.extend(3)


def test_lpr_floor():
    assert lpr_floor(1) == 5
    assert lpr_floor(2) == 9


@pytest.mark.slow
def test_lemma_lpr_moments():
    # n^p E[R_n^p] approaches (1/EX)^p = 1; averaged only from the floor onwards
    n_grid = [100, 1000, 10000]

    def one(stream):
        s = ArrivalStream(DistributionSpec.exponential(1.0), stream).extend(10000).arrivals
        return [1.0 / s[n - 1] for n in n_grid]

    r = np.array(map_replicates(one, 10000, 99, "lpr"))
    for p in (1, 2):
        assert all(n >= lpr_floor(p) for n in n_grid)
        est = (np.array(n_grid) ** p) * np.mean(r ** p, axis=0)
        assert np.all(est < 1.5)
        assert 0.9 <= est[-1] <= 1.1


@pytest.mark.slow
def test_poisson_counts():
    counts = np.array(map_replicates(lambda s: count_in(
        ArrivalStream(DistributionSpec.exponential(1.0), s), 5.0), 10 ** 5, 5, "count"))
    assert abs(counts.mean() - 5) < 0.07
    assert abs(counts.var() - 5) < 0.07


def test_count_in_small_horizon():
    a = poisson_arrivals(1)
    n = count_in(a, 3.0)
    assert a.arrivals[n - 1] <= 3.0 < a.arrivals[n] if n else a.arrivals[0] > 3.0


def test_csv(tmp_path):
    a = arrivals(DistributionSpec.deterministic(0.5)).extend(3)
    p = tmp_path / "s.csv"
    a.to_csv(p)
    assert p.read_text().splitlines() == ["n,S_n", "1,0.5", "2,1.0", "3,1.5"]
