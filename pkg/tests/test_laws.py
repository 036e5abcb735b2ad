"""Coupling-law functionals: moments, a_k coefficients, seminorm, JSON."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from glasslab.errors import (InvalidParameter, QuadratureFailure,
                             UnsupportedLaw)
from glasslab.laws import (CompoundPoisson, ConvolutionMixture, Gaussian,
                           PointMass, Rademacher, Scaled, Uniform,
                           a_coefficient, a_coefficients, law_from_json,
                           law_to_json, lncosh, moments, sample,
                           seminorm_distance, variance)
from glasslab.seeding import SeedPlan


def test_lncosh_matches_naive_on_moderate_arguments():
    x = np.linspace(-20.0, 20.0, 401)
    naive = np.log(np.cosh(x))
    assert np.max(np.abs(lncosh(x) - naive)) < 1e-12


def test_lncosh_stable_for_large_arguments():
    # log(cosh x) ~ |x| - log 2; the naive form would overflow
    for x in (400.0, -750.0, 5e4):
        assert math.isfinite(float(lncosh(x)))
        assert abs(float(lncosh(x)) - (abs(x) - math.log(2.0))) < 1e-12


def test_moment_closed_forms():
    assert moments(Gaussian(0.3, 0.7)) == pytest.approx((0.3, 0.7 + 0.09),
                                                        abs=1e-14)
    assert moments(Rademacher(0.8)) == pytest.approx((0.0, 0.64), abs=1e-14)
    assert moments(Uniform(0.9)) == pytest.approx((0.0, 0.27), abs=1e-14)
    assert moments(PointMass(-1.2)) == pytest.approx((-1.2, 1.44), abs=1e-14)
    assert moments(Scaled(Rademacher(0.8), 4)) == pytest.approx((0.0, 0.16),
                                                                abs=1e-14)
    # compound Poisson: E = rate E[Y], E[X^2] = rate E[Y^2] + (rate E[Y])^2
    cp = CompoundPoisson(2.0, Gaussian(0.0, 0.5))
    assert moments(cp) == pytest.approx((0.0, 1.0), abs=1e-14)
    mix = ConvolutionMixture((0.25, 0.5, 0.25), Rademacher(1.0))
    assert moments(mix) == pytest.approx((0.0, 1.0), abs=1e-14)
    assert variance(Gaussian(0.3, 0.7)) == pytest.approx(0.7, abs=1e-14)


@pytest.mark.parametrize("law", [
    Gaussian(0.2, 0.8), Rademacher(0.7), Uniform(1.1), PointMass(0.4),
    Scaled(Rademacher(1.0), 9), CompoundPoisson(1.5, Gaussian(0.0, 0.3)),
    ConvolutionMixture((0.5, 0.3, 0.2), Rademacher(0.6)),
])
def test_quadrature_reproduces_closed_moments(law):
    x, w = law.quadrature(200)
    mu1, mu2 = moments(law)
    assert float(w.sum()) == pytest.approx(1.0, abs=1e-12)
    assert float(w @ x) == pytest.approx(mu1, abs=1e-9)
    assert float(w @ (x * x)) == pytest.approx(mu2, abs=1e-9)


def test_rademacher_coefficients_frozen():
    # E[ln cosh X] over +-1 and E[tanh^2 X]/2, both in closed form
    assert a_coefficient(Rademacher(1.0), 0) == pytest.approx(
        0.4337808304830272, abs=1e-14)
    assert a_coefficient(Rademacher(1.0), 0) == pytest.approx(
        math.log(math.cosh(1.0)), abs=1e-14)
    assert a_coefficient(Rademacher(1.0), 2) == pytest.approx(
        0.29001282919298693, abs=1e-14)
    assert a_coefficient(Rademacher(1.0), 2) == pytest.approx(
        math.tanh(1.0) ** 2 / 2.0, abs=1e-14)


def test_odd_coefficients_vanish_for_symmetric_laws():
    for law in (Gaussian(0.0, 1.0), Uniform(0.5), Rademacher(0.7)):
        assert abs(a_coefficient(law, 1)) < 1e-14
        assert abs(a_coefficient(law, 3)) < 1e-14
    assert a_coefficient(Gaussian(0.4, 1.0), 1) > 0.01


def test_gaussian_a2_against_adaptive_quadrature():
    def integrand(x):
        return math.tanh(x) ** 2 * math.exp(-x * x / 2.0) / math.sqrt(2 * math.pi)

    ref, _ = integrate.quad(integrand, -np.inf, np.inf)
    assert a_coefficient(Gaussian(0.0, 1.0), 2) == pytest.approx(ref / 2.0,
                                                                 abs=1e-10)


def test_coefficient_vector_matches_singles():
    law = Gaussian(0.2, 0.8)
    vec = a_coefficients(law, 12)
    for k in range(13):
        assert vec[k] == pytest.approx(a_coefficient(law, k), abs=1e-12)


def test_quadrature_failure_on_underresolved_law():
    # ln cosh under a very wide Gaussian needs many Hermite nodes
    with pytest.raises(QuadratureFailure):
        a_coefficient(Gaussian(0.0, 100.0), 0, n_nodes=30, tolerance=1e-12)
    assert a_coefficient(Gaussian(0.0, 1.0), 0, tolerance=1e-8) == \
        pytest.approx(0.3745672074914382, abs=1e-12)


def test_coefficient_index_validation():
    with pytest.raises(InvalidParameter):
        a_coefficient(Gaussian(0.0, 1.0), -1)
    with pytest.raises(InvalidParameter):
        a_coefficients(Gaussian(0.0, 1.0), -3)


def test_seminorm_against_point_mass_frozen():
    # sum_k |a_k| over a symmetric law telescopes to 2 E[ln cosh]
    truncated, tail = seminorm_distance(Rademacher(0.7), PointMass(0.0))
    assert tail >= 0.0
    assert tail < 1e-10
    assert truncated + tail == pytest.approx(0.45454045871701126, abs=1e-12)
    assert truncated + tail == pytest.approx(2 * math.log(math.cosh(0.7)),
                                             abs=1e-12)


def test_seminorm_identical_and_symmetric_in_arguments():
    t0, tail0 = seminorm_distance(Rademacher(0.7), Rademacher(0.7))
    assert t0 == 0.0
    assert 0.0 <= tail0 < 1e-10
    ab = seminorm_distance(Gaussian(0.5, 0.3), PointMass(0.5))
    ba = seminorm_distance(PointMass(0.5), Gaussian(0.5, 0.3))
    assert ab == pytest.approx(ba, abs=1e-14)
    assert ab[0] > 0.0 and ab[1] >= 0.0


def test_convolution_powers():
    r3 = Rademacher(0.9).convolution_power(3)
    assert moments(r3) == pytest.approx((0.0, 3 * 0.81), abs=1e-12)
    r0 = Rademacher(0.9).convolution_power(0)
    assert moments(r0) == pytest.approx((0.0, 0.0), abs=1e-14)
    assert not Uniform(1.0).can_convolve
    assert Gaussian(0.0, 1.0).can_convolve


def test_mixture_validation():
    with pytest.raises(InvalidParameter):
        ConvolutionMixture((0.5, 0.6), Rademacher(1.0))
    with pytest.raises(UnsupportedLaw):
        ConvolutionMixture((0.5, 0.5), Uniform(1.0))
    with pytest.raises(UnsupportedLaw):
        CompoundPoisson(1.0, Uniform(2.0))


@pytest.mark.parametrize("law", [
    PointMass(-0.3), Rademacher(1.2), Gaussian(0.1, 2.0), Uniform(0.7),
    Scaled(Rademacher(0.5), 16),
    ConvolutionMixture((0.7, 0.3), Rademacher(0.4)),
    CompoundPoisson(0.7, Gaussian(0.0, 0.3)),
])
def test_law_json_round_trip(law):
    assert law_from_json(law_to_json(law)) == law


def test_law_json_unknown_kind():
    with pytest.raises(UnsupportedLaw):
        law_from_json({"kind": "cauchy", "params": {}})
    with pytest.raises(UnsupportedLaw):
        law_from_json({"params": {}})


def test_sampling_matches_moments():
    rng = SeedPlan(31).generator()
    x = sample(Rademacher(0.8), rng, size=40000)
    assert set(np.unique(x)) == {-0.8, 0.8}
    assert abs(x.mean()) < 4 * 0.8 / math.sqrt(40000)
    y = sample(CompoundPoisson(1.5, Rademacher(0.5)), rng, size=40000)
    assert y.var() == pytest.approx(1.5 * 0.25, rel=0.05)
    assert isinstance(sample(Gaussian(0.0, 1.0), rng), float)


@settings(derandomize=True, max_examples=25, deadline=None)
@given(mean=st.floats(-2.0, 2.0), var=st.floats(0.01, 4.0))
def test_gaussian_quadrature_mean_property(mean, var):
    x, w = Gaussian(mean, var).quadrature(80)
    assert float(w @ x) == pytest.approx(mean, abs=1e-8)


@settings(derandomize=True, max_examples=25, deadline=None)
@given(b=st.floats(0.01, 3.0))
def test_rademacher_json_property(b):
    law = Rademacher(b)
    assert law_from_json(law_to_json(law)) == law
