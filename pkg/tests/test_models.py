"""Model zoo: entry laws, draw shapes, couplings, thinning equivalence."""

import math

import numpy as np
import pytest
from scipy.stats import norm

from glasslab.errors import (IncompatibleCoupling, InvalidParameter,
                             MomentMismatch)
from glasslab.laws import Gaussian, PointMass, Rademacher, variance
from glasslab.models import (couple, model_from_json, model_to_json, sk,
                             sk_spherical_pair, thinning_equivalence_test,
                             universal_sk, vb_bernoulli, vb_edge_canonical,
                             vb_edge_grand, vb_poissonized)
from glasslab.pressure import naive_random_pressure
from glasslab.seeding import SeedPlan


def test_sk_entry_law_and_draw_shape():
    model = sk(1.5, 6)
    assert model.entry_law == Gaussian(0.0, 1.5 ** 2 / 12.0)
    sample = model.draw(SeedPlan(3).generator())
    assert sample.matrix.shape == (6, 6)
    assert sample.h == 0.0
    with pytest.raises(InvalidParameter):
        sk(-0.5, 4)
    with pytest.raises(InvalidParameter):
        sk(1.0, 0)


def test_universal_sk_scaling_and_validation():
    model = universal_sk(Rademacher(0.9), 9)
    assert variance(model.entry_law) == pytest.approx(0.81 / 9.0, abs=1e-14)
    with pytest.raises(MomentMismatch):
        universal_sk(PointMass(0.3), 4)
    off = universal_sk(PointMass(0.3), 4, validate=False)
    assert off.n_sites == 4


def test_vb_dense_variances_follow_both_conventions():
    alpha, beta, n = 2.0, 1.4, 7
    default = vb_poissonized(alpha, beta, n)
    assert variance(default.entry_law) == pytest.approx(
        alpha * beta * beta / (2.0 * n), rel=1e-13)
    aligned = vb_poissonized(alpha, beta, n, jump_variance=beta * beta)
    assert variance(aligned.entry_law) == pytest.approx(
        alpha * beta * beta / n, rel=1e-13)
    bern = vb_bernoulli(alpha, beta, n)
    assert variance(bern.entry_law) == pytest.approx(
        alpha * beta * beta / (2.0 * n), rel=1e-13)
    with pytest.raises(InvalidParameter):
        vb_bernoulli(8.0, 1.0, 4)  # success probability above one


def test_edge_models_draw_the_advertised_counts():
    rng = SeedPlan(9).generator()
    canonical = vb_edge_canonical(2.0, 1.0, 6)
    for _ in range(5):
        assert canonical.draw(rng).edge_w.size == 12
    grand = vb_edge_grand(2.0, 1.0, 6)
    counts = [grand.draw(rng).edge_w.size for _ in range(400)]
    assert min(counts) != max(counts)
    assert np.mean(counts) == pytest.approx(12.0, abs=1.0)
    assert variance(grand.weight_law) == pytest.approx(1.0, abs=1e-14)


def test_spherical_canonical_radius_is_exact():
    grand, canonical = sk_spherical_pair(1.3, 5)
    rng = SeedPlan(4).generator()
    frob = np.linalg.norm(canonical.draw(rng).matrix)
    assert frob == pytest.approx(2.0554804791094465, abs=1e-12)
    assert frob == pytest.approx(1.3 * 5 / math.sqrt(10.0), abs=1e-12)
    norms = [np.linalg.norm(grand.draw(rng).matrix) for _ in range(6)]
    assert max(norms) - min(norms) > 1e-3


def test_couple_identical_shares_the_draw():
    plan = couple(sk(1.0, 5), sk(1.0, 5))
    sa, sb, l1 = plan.draw_joint(SeedPlan(2).generator())
    assert l1 == 0.0
    assert np.array_equal(sa.matrix, sb.matrix)


def test_couple_edges_is_lipschitz_in_l1():
    plan = couple(vb_edge_grand(2.0, 1.0, 6), vb_edge_canonical(2.0, 1.0, 6))
    rng = SeedPlan(12).generator()
    for _ in range(40):
        sa, sb, l1 = plan.draw_joint(rng)
        gap = abs(naive_random_pressure(sa) - naive_random_pressure(sb))
        assert gap <= l1 / 6 + 1e-9


def test_couple_spherical_l1_matches_matrix_difference():
    plan = couple(*sk_spherical_pair(1.0, 5))
    rng = SeedPlan(8).generator()
    for _ in range(20):
        sa, sb, l1 = plan.draw_joint(rng)
        direct = float(np.abs(sa.matrix - sb.matrix).sum())
        assert l1 == pytest.approx(direct, abs=1e-9)


def test_couple_rejects_mismatched_models():
    with pytest.raises(IncompatibleCoupling):
        couple(sk(1.0, 4), sk(1.0, 6))
    with pytest.raises(IncompatibleCoupling):
        couple(sk(1.0, 4), vb_edge_grand(1.0, 1.0, 4))
    with pytest.raises(IncompatibleCoupling):
        couple(vb_edge_grand(1.0, 1.0, 4), vb_edge_grand(2.0, 1.0, 4))


def test_thinning_report_pinned_seed():
    rep = thinning_equivalence_test(1.5, 3, 20000, SeedPlan(21).generator())
    assert rep.passed
    assert rep.cell_pvalues.shape == (3, 3)
    assert float(rep.cell_pvalues.min()) > rep.significance
    assert rep.independence_pvalue > rep.significance
    assert len(rep.mgf_points) == 3
    assert rep.mgf_z_limit == norm.ppf(1.0 - rep.significance / 2.0)
    lam_cell = 0.5
    exact = {label: pt for (label, _, pt, _, _) in
             [(p[0], None, p[2], None, None) for p in rep.mgf_points]}
    assert exact["single_0.5"] == pytest.approx(
        math.exp(lam_cell * (math.e ** 0.5 - 1.0)), rel=1e-12)
    assert exact["uniform_0.2"] == pytest.approx(
        math.exp(lam_cell * 9 * (math.e ** 0.2 - 1.0)), rel=1e-12)
    assert exact["alternating_0.3"] == pytest.approx(
        math.exp(lam_cell * (5 * (math.e ** 0.3 - 1.0)
                             + 4 * (math.e ** -0.3 - 1.0))), rel=1e-12)
    for _, emp, ex, se, z in rep.mgf_points:
        assert z == pytest.approx((emp - ex) / se, rel=1e-12)


def test_thinning_rejects_small_samples():
    with pytest.raises(InvalidParameter):
        thinning_equivalence_test(1.5, 3, 999, SeedPlan(0).generator())


ZOO_MODELS = [
    sk(1.0, 4),
    universal_sk(Rademacher(1.0 / math.sqrt(2.0)), 4),
    vb_poissonized(2.0, 1.0, 4),
    vb_bernoulli(2.0, 1.0, 8),
    vb_edge_grand(2.0, 1.0, 4),
    vb_edge_canonical(2.0, 1.0, 4),
    *sk_spherical_pair(1.0, 4),
]


@pytest.mark.parametrize("model", ZOO_MODELS, ids=lambda m: m.name)
def test_model_json_round_trip(model):
    assert model_from_json(model_to_json(model)) == model


def test_model_from_json_zoo_specs():
    built = model_from_json({"name": "sk", "params": {"beta": 1.0, "n": 4}})
    assert built == sk(1.0, 4)
    built = model_from_json({
        "name": "vb_poissonized",
        "params": {"alpha": 2.0, "beta": 1.0, "n": 4, "jump_variance": 1.0},
    })
    assert built == vb_poissonized(2.0, 1.0, 4, jump_variance=1.0)
    built = model_from_json({"name": "sk_spherical_canonical",
                             "params": {"beta": 1.0, "n": 4}})
    assert built == sk_spherical_pair(1.0, 4)[1]
    with pytest.raises(InvalidParameter):
        model_from_json({"name": "ising_2d", "params": {}})
    with pytest.raises(InvalidParameter):
        model_from_json(17)
