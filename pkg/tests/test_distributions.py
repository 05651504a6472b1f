import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissinc._numerics import ParameterError
from poissinc.distributions import (DegenerateError, DistributionSpec, MarkerDensity,
                                    char_value, char_value_quadrature, cz_constant,
                                    marker_sample, parse_distribution, parse_marker, sample)
from poissinc.rng import RngStream


def stream(seed=1, rep=0):
    return RngStream(seed, "test-dist", rep)


def test_deterministic_sample():
    assert np.array_equal(sample(DistributionSpec.deterministic(1.0), 3, stream()), [1, 1, 1])


def test_exponential_sample_mean():
    x = sample(DistributionSpec.exponential(1.0), 10 ** 6, stream())
    assert abs(x.mean() - 1.0) < 0.004


def test_pareto_sample_mean():
    # mean index*scale/(index-1) = 1.5, variance index/((index-1)^2 (index-2)) = 0.75
    x = sample(DistributionSpec.pareto(3.0, 1.0), 10 ** 6, stream())
    assert abs(x.mean() - 1.5) < 3 * math.sqrt(0.75 / 10 ** 6)
    assert x.min() >= 1.0


def test_sampling_is_bitwise_deterministic():
    spec = DistributionSpec.gamma(2.0, 1.0)
    a = sample(spec, 1000, stream(5, 3))
    b = sample(spec, 1000, stream(5, 3))
    c = sample(spec, 1000, stream(5, 4))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("text", ["pareto(index=1, scale=1)", "exponential(rate=0)",
                                  "gamma(shape=-1, rate=1)", "uniform(lo=2, hi=1)",
                                  "deterministic(value=0)"])
def test_invalid_parameters(text):
    with pytest.raises(ParameterError):
        parse_distribution(text)


def test_char_value_exponential():
    z = char_value(DistributionSpec.exponential(1.0))
    assert abs(z - (1 + 1j) / 2) < 1e-15
    assert abs(char_value_quadrature(DistributionSpec.exponential(1.0)) - z) < 1e-10


def test_char_value_deterministic_is_flagged():
    spec = DistributionSpec.deterministic(math.pi)
    assert abs(char_value(spec) + 1) < 1e-15
    assert not spec.nondegenerate
    with pytest.raises(DegenerateError):
        cz_constant(spec)


def test_char_value_gamma():
    spec = DistributionSpec.gamma(2.0, 1.0)
    z = char_value(spec)
    assert abs(z - (1 - 1j) ** -2) < 1e-15
    assert abs(char_value_quadrature(spec) - z) < 1e-10


def test_char_value_pareto_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    r = 3.0
    ref = mpmath.quadosc(lambda x: r * x ** (-r - 1) * mpmath.exp(1j * x), [1, mpmath.inf],
                         omega=1)
    z = char_value(DistributionSpec.pareto(r, 1.0))
    assert abs(z - complex(ref)) < 1e-10


def test_cz_exponential_is_one():
    assert cz_constant(DistributionSpec.exponential(1.0)) == pytest.approx(1.0, abs=1e-15)
    assert cz_constant(0j) == 1.0


def test_cz_rejects_unit_modulus():
    with pytest.raises(DegenerateError):
        cz_constant(DistributionSpec.deterministic(math.pi / 2))


SPECS = [DistributionSpec.exponential(1.0), DistributionSpec.exponential(3.0),
         DistributionSpec.gamma(0.5, 2.0), DistributionSpec.gamma(2.0, 1.0),
         DistributionSpec.pareto(2.5, 1.0), DistributionSpec.pareto(3.0, 0.5),
         DistributionSpec.uniform(0.0, 1.0), DistributionSpec.uniform(1.0, 4.0)]


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_nondegenerate_modulus_and_cz_identity(spec):
    z = char_value(spec)
    assert abs(z) < 1 - 1e-9
    c = cz_constant(spec)
    assert c > 0
    assert c == pytest.approx((1 - abs(z) ** 2) / abs(1 - z) ** 2, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(rate=st.floats(0.05, 20.0), shape=st.floats(0.2, 10.0))
def test_gamma_cz_identity_property(rate, shape):
    z = char_value(DistributionSpec.gamma(shape, rate))
    c = cz_constant(z)
    assert c == pytest.approx((1 - abs(z) ** 2) / abs(1 - z) ** 2, rel=1e-10)


def test_pareto_marker_inverse_cdf():
    md = MarkerDensity.pareto_tail(2.0, 1.0)
    u = np.linspace(0, 0.99, 50)
    assert np.allclose(md.cdf_inverse(u), 1.0 / (1.0 - u), rtol=1e-15)
    v = marker_sample(md, 20000, stream())
    for q in (1.5, 2.0, 5.0, 20.0):
        # P(V <= q) = 1 - 1/q
        assert abs(np.mean(v <= q) - (1 - 1 / q)) < 4 * math.sqrt(0.25 / 20000)


def test_exponential_marker_mean():
    v = marker_sample(MarkerDensity.exponential_unit(), 10 ** 6, stream())
    assert abs(v.mean() - 1.0) < 3e-3


def test_pareto_marker_support():
    v = marker_sample(MarkerDensity.pareto_tail(3.0, 1.0), 10 ** 5, stream())
    assert v.min() >= 1.0


@pytest.mark.parametrize("md", [MarkerDensity.pareto_tail(2.0, 1.0),
                                MarkerDensity.pareto_tail(3.0, 2.0, unnormalized=True),
                                MarkerDensity.exponential_unit()], ids=str)
def test_marker_inverse_consistency(md):
    x = np.linspace(md.support[0] + 0.5, md.support[0] + 40, 100)
    assert np.allclose(md.inverse(md.pdf(x)), x, rtol=1e-12, atol=0)


@pytest.mark.parametrize("md", [MarkerDensity.pareto_tail(2.0, 1.0),
                                MarkerDensity.pareto_tail(3.5, 2.0),
                                MarkerDensity.exponential_unit(),
                                MarkerDensity.uniform_unit()], ids=str)
def test_marker_normalized(md):
    from scipy import integrate
    lo, hi = md.support
    total = integrate.quad(md.pdf, lo, hi)[0]
    assert total == pytest.approx(1.0, abs=1e-10)


def test_unnormalized_pareto_lower_limit():
    md = MarkerDensity.pareto_tail(2.0, 1.0, unnormalized=True)
    assert md.inverse(1 / 100.0) == pytest.approx(10.0, rel=1e-15)


def test_parse_roundtrip():
    spec = parse_distribution("gamma(shape=2, rate=0.5)")
    assert spec == DistributionSpec.gamma(2.0, 0.5)
    assert parse_distribution(str(spec)) == spec
    md = parse_marker("pareto_tail(r=3, x0=1, unnormalized=true)")
    assert md.unnormalized and md.r == 3.0
