"""Jump-diffusion pairs: functionals, generator, identities, sweeps."""

import math

import numpy as np
import pytest

from glasslab.errors import InvalidParameter, SizeExceeded, UnsupportedLaw
from glasslab.laws import (CompoundPoisson, Gaussian, Rademacher,
                           a_coefficient, lncosh)
from glasslab.levy import (HalfGaussianDensity, LevyPair, a_star,
                           connectivity_sweep, coupling_law_of_pair,
                           generator_apply, generator_lncosh,
                           interpolation_identity_check, lncosh_second,
                           pair_from_json, pair_to_json, prop_c_residual,
                           psi, sample_levy, star_seminorm_bound)
from glasslab.seeding import SeedPlan

PAIR_A = LevyPair(v=0.5, atoms=((1.0, 2.0),))
PAIR_B = LevyPair(v=0.0, atoms=((0.8, 1.5), (1.6, 0.4)))


def test_a_star_closed_forms():
    assert a_star(PAIR_A, 0) == pytest.approx(1.1175616609660544, abs=1e-14)
    assert a_star(PAIR_A, 0) == pytest.approx(0.25 + 2 * lncosh(1.0),
                                              abs=1e-13)
    assert a_star(PAIR_A, 2) == pytest.approx(0.8300256583859739, abs=1e-14)
    assert a_star(PAIR_A, 2) == pytest.approx(0.25 + math.tanh(1.0) ** 2,
                                              abs=1e-13)
    assert a_star(PAIR_A, 4) == pytest.approx(0.16821488219304123, abs=1e-14)
    assert a_star(PAIR_A, 4) == pytest.approx(math.tanh(1.0) ** 4 / 2.0,
                                              abs=1e-13)
    for bad in (1, 3, -2, 2.0):
        with pytest.raises(InvalidParameter):
            a_star(PAIR_A, bad)


def test_psi_values_and_vectorization():
    assert float(psi(PAIR_A, 0.0)) == 0.0
    assert float(psi(PAIR_A, 2.0)) == pytest.approx(3.8322936730942847,
                                                    abs=1e-13)
    expected = 0.5 * 4 / 2 + 2.0 * (1.0 - math.cos(2.0))
    assert float(psi(PAIR_A, 2.0)) == pytest.approx(expected, abs=1e-13)
    grid = psi(PAIR_A, np.array([0.0, 1.0, 2.0]))
    assert grid.shape == (3,)
    assert grid[0] == 0.0 and grid[2] > grid[1] > 0.0


def test_half_gaussian_discretization_is_tight():
    y, w, mass_err, m2_err = HalfGaussianDensity(1.3, 200, 1.7).discretize()
    assert y.size == 100 and np.all(y > 0)
    assert mass_err <= 1e-12
    assert m2_err <= 1e-12
    assert float(w.sum()) == pytest.approx(1.7, abs=1e-12)


def test_density_pair_matches_compound_poisson_coefficients():
    beta, mass = 1.1, 1.7
    pair = LevyPair(density=HalfGaussianDensity(beta, 200, mass))
    law = Gaussian(0.0, beta * beta / 2.0)
    for k in (0, 2, 4, 6):
        assert a_star(pair, k) == pytest.approx(
            mass * a_coefficient(law, k), rel=1e-10)


def test_scale_and_mix_algebra():
    assert PAIR_A.scale(0.0) == LevyPair()
    doubled = PAIR_A.scale(2.0)
    assert doubled.v == 1.0 and doubled.atoms == ((1.0, 4.0),)
    assert PAIR_A.mix(PAIR_B, 0.0) == PAIR_A
    assert PAIR_A.mix(PAIR_B, 1.0) == PAIR_B
    half = PAIR_A.mix(PAIR_B, 0.5)
    assert half.v == 0.25 and half.total_mass == pytest.approx(
        0.5 * PAIR_A.total_mass + 0.5 * PAIR_B.total_mass)
    with pytest.raises(InvalidParameter):
        PAIR_A.mix(PAIR_B, 1.5)
    with pytest.raises(InvalidParameter):
        PAIR_A.scale(-1.0)


def test_pair_validation():
    with pytest.raises(InvalidParameter):
        LevyPair(v=-0.1)
    with pytest.raises(InvalidParameter):
        LevyPair(atoms=((0.0, 1.0),))
    with pytest.raises(InvalidParameter):
        LevyPair(atoms=((1.0, -1.0),))
    with pytest.raises(InvalidParameter):
        HalfGaussianDensity(1.0, 201)  # odd node count
    with pytest.raises(InvalidParameter):
        HalfGaussianDensity(1.0, 600)
    with pytest.raises(InvalidParameter):
        HalfGaussianDensity(-1.0, 200)
    with pytest.raises(InvalidParameter):
        HalfGaussianDensity(1.0, 200, mass=0.0)


def test_sample_levy_moments_pinned_seed():
    rng = SeedPlan(8).generator()
    x1 = sample_levy(PAIR_A, 1.0, rng, size=60000)
    xq = sample_levy(PAIR_A, 0.25, rng, size=60000)
    # Var X_t = t (v + sum w y^2) = 2.5 t for PAIR_A
    assert float(x1.var()) == pytest.approx(2.5, abs=0.05)
    assert float(xq.var()) == pytest.approx(0.625, abs=0.02)
    assert abs(float(x1.mean())) < 0.02
    scalar = sample_levy(PAIR_A, 1.0, SeedPlan(8).generator())
    assert isinstance(scalar, float)
    with pytest.raises(InvalidParameter):
        sample_levy(PAIR_A, -1.0, rng)


def test_absolute_moment_stays_under_exp_budget():
    # E|X_1| <= (1 + a*_0) e for every pair
    for pair in (PAIR_A, PAIR_B):
        draws = np.abs(sample_levy(pair, 1.0, SeedPlan(14).generator(),
                                   size=40000))
        assert float(draws.mean()) <= (1.0 + a_star(pair, 0)) * math.e


def test_generator_closed_form_matches_generic():
    grid = np.linspace(-3.0, 3.0, 41)
    closed = generator_lncosh(PAIR_A, grid)
    generic = generator_apply(PAIR_A, lncosh, grid,
                              second_derivative=lncosh_second)
    assert np.max(np.abs(closed - generic)) <= 1e-12
    # the generator of ln cosh peaks at the origin with value a*_0
    assert float(generator_lncosh(PAIR_A, 0.0)) == pytest.approx(
        a_star(PAIR_A, 0), abs=1e-13)
    assert float(closed.max()) <= a_star(PAIR_A, 0) + 1e-13
    with pytest.raises(InvalidParameter):
        generator_apply(PAIR_A, lncosh, grid)  # diffusion needs f''
    pure_jump = generator_apply(PAIR_B, lncosh, grid)
    assert np.all(np.isfinite(pure_jump))


def test_interpolation_identity_pinned_seed():
    check = interpolation_identity_check(PAIR_A, PAIR_B, lncosh, 30000,
                                         SeedPlan(11),
                                         second_derivative=lncosh_second)
    assert check.passed
    assert abs(check.z) < 3.0
    assert check.stderr > 0.0
    with pytest.raises(InvalidParameter):
        interpolation_identity_check(PAIR_A, PAIR_B, lncosh, 1, SeedPlan(0),
                                     second_derivative=lncosh_second)
    with pytest.raises(InvalidParameter):
        interpolation_identity_check(PAIR_A, PAIR_B, lncosh, 100, SeedPlan(0),
                                     second_derivative=lncosh_second,
                                     t_nodes=4)


def test_star_seminorm_frozen_connectivity_values():
    sk_pair = LevyPair(v=0.5)
    frozen = {1.0: 0.22632369206326097,
              10.0: 0.04397898856678791,
              1000.0: 0.0004992929554837702}
    values = []
    for alpha, expect in frozen.items():
        vb = LevyPair(density=HalfGaussianDensity(
            beta=1.0 / math.sqrt(alpha), n_nodes=200, mass=alpha))
        got = star_seminorm_bound(sk_pair, vb)
        assert got == pytest.approx(expect, rel=1e-12)
        values.append(got)
    assert values[0] > values[1] > values[2] > 0.0
    assert star_seminorm_bound(PAIR_A, PAIR_A) == 0.0
    with pytest.raises(InvalidParameter):
        star_seminorm_bound(PAIR_A, PAIR_B, k_max=1)


def test_coupling_law_of_pair_cases():
    assert coupling_law_of_pair(LevyPair(v=0.7)) == Gaussian(0.0, 0.7)
    got = coupling_law_of_pair(LevyPair(atoms=((1.2, 0.4),)))
    assert got == CompoundPoisson(0.4, Rademacher(1.2))
    dens = LevyPair(density=HalfGaussianDensity(1.3, 200, 1.7))
    assert coupling_law_of_pair(dens) == CompoundPoisson(
        1.7, Gaussian(0.0, 1.3 ** 2 / 2.0))
    with pytest.raises(UnsupportedLaw):
        coupling_law_of_pair(PAIR_A)  # diffusion plus jumps


def test_pair_json_round_trips():
    for pair in (PAIR_A, PAIR_B,
                 LevyPair(v=0.2, density=HalfGaussianDensity(1.1, 64, 0.9)),
                 LevyPair()):
        assert pair_from_json(pair_to_json(pair)) == pair
    with pytest.raises(UnsupportedLaw):
        pair_from_json({"v": 0.0, "atoms": [], "density": {"name": "cauchy"}})
    with pytest.raises(InvalidParameter):
        pair_from_json({"v": 0.0, "atoms": [[1.0]]})


def test_connectivity_sweep_small():
    rows = connectivity_sweep(1.0, (1.0, 4.0), 4, 500, SeedPlan(3), threads=1)
    assert [r.alpha for r in rows] == [1.0, 4.0]
    assert all(r.verdict for r in rows)
    assert rows[0].bound > rows[1].bound > 0.0
    assert rows[0].bound == pytest.approx(0.22632369206326097, rel=1e-12)
    with pytest.raises(InvalidParameter):
        connectivity_sweep(1.0, (0.0,), 4, 10, SeedPlan(0))


def test_prop_c_residual_pinned_seed():
    rep = prop_c_residual(PAIR_A.scale(0.25), PAIR_B.scale(0.25), 2, 0.0, 8,
                          20000, SeedPlan(5))
    assert rep.passed
    assert abs(rep.z) < 3.0
    assert rep.terms[0][0] == 2
    expect = a_star(PAIR_B.scale(0.25), 2) - a_star(PAIR_A.scale(0.25), 2)
    assert rep.terms[0][1] == pytest.approx(expect, abs=1e-13)


def test_prop_c_residual_limits():
    with pytest.raises(SizeExceeded):
        prop_c_residual(PAIR_A, PAIR_B, 4, 0.0, 8, 100, SeedPlan(0))
    with pytest.raises(InvalidParameter):
        prop_c_residual(PAIR_A, PAIR_B, 2, 0.0, 1, 100, SeedPlan(0))
