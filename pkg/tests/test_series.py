import cmath
import math

import numpy as np
import pytest

from poissinc._numerics import ParameterError, loglog_slope
from poissinc.distributions import DistributionSpec
from poissinc.pointprocess import ArrivalStream
from poissinc.rng import RngStream, map_replicates
from poissinc.series import (ExtensionRequired, SeriesFunction, abel_evaluate, block_sum,
                             direct_evaluate, dyadic_windows, half_period_partition,
                             parse_function, partial_sum, permuted_sum, tail_diagnostics)

EXP1 = DistributionSpec.exponential(1.0)
SINC = SeriesFunction.sinc()
CIS = SeriesFunction.cis_over_x()


def exp_path(seed=4, rep=0, name="series-test"):
    return ArrivalStream(EXP1, RngStream(seed, name, rep))


def test_sinc_example():
    a = ArrivalStream.from_increments([math.pi / 2] * 3)
    assert partial_sum(SINC, a, 3) == pytest.approx(2 / math.pi - 2 / (3 * math.pi), abs=1e-15)


def test_cis_example():
    a = ArrivalStream.from_increments([1.0, 1.0, 1.0])
    want = cmath.exp(1j) + cmath.exp(2j) / 2 + cmath.exp(3j) / 3
    assert abs(partial_sum(CIS, a, 3) - want) < 1e-15
    assert partial_sum(CIS, a, 0) == 0


def test_pointwise_relations():
    x = np.linspace(0.1, 200, 4001)
    assert np.allclose(SINC(x), CIS(x).imag, atol=1e-15)
    assert np.allclose(SeriesFunction.cos_over_x()(x), CIS(x).real, atol=1e-15)
    big = x[x >= 1]
    for f in (SINC, CIS, SeriesFunction.cos_over_x()):
        assert np.all(np.abs(f(big)) <= 1 / big + 1e-15)


def test_singularity_at_zero():
    a = ArrivalStream.from_increments([0.0, 1.0])
    assert partial_sum(SINC, a, 2) == pytest.approx(1 + math.sin(1))
    with pytest.raises(ZeroDivisionError):
        partial_sum(CIS, a, 2)


def test_indicator_poisson_count():
    def one(stream):
        a = ArrivalStream(EXP1, stream).extend_past(1.0)
        return partial_sum(SeriesFunction.indicator(0, 1), a, len(a))

    v = np.array(map_replicates(one, 10 ** 5, 8, "indicator"))
    n = len(v)
    # Poisson(1): mean 1, variance 1, fourth central moment 4
    assert abs(v.mean() - 1) < 3 / math.sqrt(n)
    assert abs(v.var() - 1) < 3 * math.sqrt(3 / n)


def test_abel_three_terms():
    a = ArrivalStream.from_increments([1.0, 1.0, 1.0])
    ev = abel_evaluate(a, 3)
    z = np.cumsum(np.exp(1j * np.array([1, 2, 3])))
    want = z[2] / 3 + (1 - 1 / 2) * z[0] + (1 / 2 - 1 / 3) * z[1]
    assert abs(ev.total - want) < 1e-15
    assert abs(ev.total - partial_sum(CIS, a, 3)) < 1e-15
    assert abs(ev.boundary[-1] - z[2] / 3) < 1e-16


def test_abel_matches_direct_every_prefix():
    for rep in range(5):
        ev = abel_evaluate(exp_path(rep=rep), 10 ** 5)
        d = ev.extras["direct"]
        assert np.max(np.abs(ev.partial - d) / np.abs(d)) < 1e-9


def test_abel_adversarial_first_arrival():
    inc = np.concatenate([[1e-9], np.random.default_rng(1).exponential(size=9999)])
    ev = abel_evaluate(ArrivalStream.from_increments(inc), 10 ** 4)
    d = ev.extras["direct"]
    assert np.max(np.abs(ev.partial - d) / np.abs(d)) < 1e-9


def test_abel_rejects_other_kinds():
    with pytest.raises(ParameterError):
        abel_evaluate(exp_path(), 10, f=SINC)
    with pytest.raises(ParameterError):
        abel_evaluate(exp_path(), 0)


@pytest.mark.slow
def test_abel_tail_and_boundary_bounds():
    def one(stream):
        ev = abel_evaluate(ArrivalStream(EXP1, stream), 10 ** 5)
        D, Z = ev.extras["D"], ev.extras["Z"]
        return np.sum(np.abs(D[999:] * Z[999:-1])), abs(ev.boundary[-1])

    r = np.array(map_replicates(one, 1000, 5, "abel-tail"))
    assert np.mean(r[:, 0] < 0.1) >= 0.95
    assert np.mean(r[:, 1] < 0.05) >= 0.95


def test_identity_permutation():
    a = exp_path()
    p = permuted_sum(CIS, a, 1000)
    assert np.array_equal(p.partial, direct_evaluate(CIS, a, 1000).partial)


def test_permutation_keeps_total():
    a = exp_path()
    total = partial_sum(CIS, a, 10 ** 5)
    for j in range(5):
        ev = permuted_sum(CIS, a, 10 ** 5, RngStream(9, "perm").split(j))
        assert abs(ev.total - total) < 1e-9
        assert sorted(ev.order) == list(range(10 ** 5))
    assert permuted_sum(CIS, a, 100, 3).order.tobytes() == permuted_sum(CIS, a, 100, 3).order.tobytes()


def test_sinc_block_integrals_alternate_and_shrink():
    a = exp_path().extend_past(40 * math.pi)
    ev = block_sum(SINC, a, half_period_partition(40))
    b = ev.extras["block_integrals"]
    assert np.all(np.sign(b[1:]) == -np.sign(b[:-1]))
    assert np.all(np.abs(b[1:]) < np.abs(b[:-1]))


def test_single_block_is_partial_sum():
    a = exp_path().extend_past(50.0)
    ev = block_sum(SINC, a, [0.0, 50.0], integrals=False)
    n = int(np.searchsorted(a.arrivals, 50.0))
    assert ev.partial[0] == partial_sum(SINC, a, n)
    assert ev.extras["counts"][0] == n


def test_blocked_equals_direct_at_boundaries():
    a = exp_path().extend_past(200 * math.pi)
    e = half_period_partition(200)
    ev = block_sum(SINC, a, e, integrals=False)
    direct = direct_evaluate(SINC, a, len(a)).partial
    for k, end in enumerate(e[1:]):
        n = int(np.searchsorted(a.arrivals, end))
        assert ev.partial[k] == direct[n - 1]


def test_block_needs_extension():
    a = exp_path().extend(10)
    with pytest.raises(ExtensionRequired):
        block_sum(SINC, a, half_period_partition(100))


def test_tail_diagnostics_zero_and_indicator():
    a = exp_path().extend(4096)
    w = dyadic_windows(4, 10)
    rep = tail_diagnostics(direct_evaluate(SeriesFunction.zero(), a, 2048), w)
    assert np.all(rep.oscillation == 0)
    ind = direct_evaluate(SeriesFunction.indicator(0, 1), a, 2048)
    last = int(np.searchsorted(a.arrivals, 1.0))
    rep = tail_diagnostics(ind, [(lo, hi) for lo, hi in w if lo > last])
    assert np.all(rep.oscillation == 0)
    assert math.isnan(rep.exponent)


def test_tail_diagnostics_errors(tmp_path):
    ev = direct_evaluate(CIS, exp_path(), 100)
    with pytest.raises(ParameterError):
        tail_diagnostics(ev, [(1, 2)])
    with pytest.raises(ExtensionRequired):
        tail_diagnostics(ev, [(10, 20), (64, 128)])
    rep = tail_diagnostics(ev, [(10, 20), (20, 40)])
    rep.to_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "window_lo,window_hi,oscillation"


def test_l2_surrogate_decay():
    grid = 2 ** np.arange(10, 17)

    def one(stream):
        s = ArrivalStream(EXP1, stream).extend(2 * grid[-1]).arrivals
        terms = np.exp(1j * s) / s
        c = np.concatenate([[0], np.cumsum(terms)])
        return [abs(c[2 * n] - c[n]) ** 2 for n in grid]

    m = np.mean(map_replicates(one, 400, 17, "l2"), axis=0)
    assert loglog_slope(grid, m) <= -0.8


def test_trace_csv(tmp_path):
    ev = direct_evaluate(SINC, ArrivalStream.from_increments([1.0, 1.0]), 2)
    ev.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "method,n_or_k,partial_real,partial_imag"
    assert lines[1].startswith("direct,1,")


def test_parse_function():
    assert parse_function("sinc").kind == "sinc"
    f = parse_function("truncated(base=sinc, cutoff=10)")
    assert f.support == (0.0, 10.0)
    assert parse_function("indicator(lo=0, hi=2)").support == (0.0, 2.0)
    with pytest.raises(ParameterError):
        parse_function("tangent")
