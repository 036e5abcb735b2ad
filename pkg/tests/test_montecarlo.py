"""Disorder Monte Carlo: determinism, summation, estimates, couplings."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glasslab.errors import InvalidParameter, UnsupportedModel
from glasslab.laws import PointMass, Rademacher
from glasslab.models import (couple, sk, universal_sk, vb_edge_canonical,
                             vb_edge_grand)
from glasslab.montecarlo import (THREADS_ENV_VAR, difference_estimate,
                                 difference_for_plan, pairwise_sum,
                                 quenched_pressure, resolve_threads,
                                 variance_check)
from glasslab.seeding import SeedPlan


def test_pairwise_sum_matches_fsum():
    rng = SeedPlan(61).generator()
    for size in (1, 2, 31, 32, 33, 600):
        v = rng.normal(size=size) * 10.0 ** rng.integers(-3, 4, size=size)
        assert pairwise_sum(v) == pytest.approx(math.fsum(v), abs=1e-10)
    assert pairwise_sum(np.array([])) == 0.0


@settings(derandomize=True, max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_pairwise_sum_property(values):
    v = np.asarray(values)
    assert pairwise_sum(v) == pytest.approx(math.fsum(values),
                                            rel=1e-12, abs=1e-9)


def test_quenched_pressure_thread_count_invariant():
    model = sk(1.0, 6)
    one = quenched_pressure(model, 64, SeedPlan(3), threads=1)
    four = quenched_pressure(model, 64, SeedPlan(3), threads=4)
    assert one.mean == four.mean
    assert one.stderr == four.stderr
    assert one.variance == four.variance


def test_quenched_pressure_point_mass_is_exact():
    model = universal_sk(PointMass(0.0), 6, h=0.3)
    est = quenched_pressure(model, 8, SeedPlan(5))
    assert est.mean == pytest.approx(math.log(2 * math.cosh(0.3)), abs=1e-12)
    assert est.stderr == 0.0
    assert est.count == 8


def test_realization_streams_are_stable_under_extension():
    # realization i depends only on (seed path, i): a longer run must
    # reproduce a shorter one as its prefix
    model = sk(1.0, 5)
    short = quenched_pressure(model, 32, SeedPlan(11), keep_values=True)
    long = quenched_pressure(model, 64, SeedPlan(11), keep_values=True)
    assert np.array_equal(long.values[:32], short.values)
    assert quenched_pressure(model, 32, SeedPlan(11)).values is None


def test_variance_check_sk():
    rep = variance_check(sk(1.0, 8), 400, SeedPlan(6))
    assert rep.bound == pytest.approx(1.0 / 16.0, abs=1e-14)
    assert rep.sample_variance == pytest.approx(0.010908529472580926,
                                                rel=1e-9)
    assert rep.passed


def test_variance_check_needs_entry_law():
    with pytest.raises(UnsupportedModel):
        variance_check(vb_edge_grand(2.0, 1.0, 4), 10, SeedPlan(0))


def test_crn_cancels_shared_noise():
    a = vb_edge_grand(2.0, 1.0, 6)
    b = vb_edge_canonical(2.0, 1.0, 6)
    ind = difference_estimate(a, b, 400, SeedPlan(5), coupling="independent")
    crn = difference_estimate(a, b, 400, SeedPlan(5), coupling="crn")
    assert crn.coupling == "crn"
    assert ind.coupling == "independent"
    assert ind.stderr > 1.3 * crn.stderr
    assert crn.l1_mean > 0.0
    assert ind.l1_mean is None


def test_identical_models_couple_to_zero_difference():
    est = difference_for_plan(couple(sk(1.0, 5), sk(1.0, 5)), 20, SeedPlan(2))
    assert est.mean == 0.0
    assert est.stderr == 0.0
    assert est.l1_mean == 0.0


def test_difference_estimate_validation():
    with pytest.raises(InvalidParameter):
        difference_estimate(sk(1.0, 4), sk(1.0, 4), 10, SeedPlan(0),
                            coupling="quantum")
    with pytest.raises(InvalidParameter):
        quenched_pressure(sk(1.0, 4), 0, SeedPlan(0))


def test_resolve_threads_precedence(monkeypatch):
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert resolve_threads(None) == 1
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.setenv(THREADS_ENV_VAR, "junk")
    with pytest.raises(ValueError):
        resolve_threads(None)
    with pytest.raises(InvalidParameter):
        resolve_threads(0)


def test_keep_values_shape():
    est = difference_estimate(sk(1.0, 4), universal_sk(Rademacher(0.5), 4),
                              12, SeedPlan(9), keep_values=True)
    assert est.values.shape == (12,)
    assert est.count == 12
