"""glasslab: a desk-scale laboratory for two-body mean-field spin glasses.

Exact 2^N enumeration of random pressures for arbitrary coupling
distributions, disorder Monte Carlo with reproducible counter-based
streams, and the closed-form bounds, universality defects, and
infinitely-divisible interpolation identities that tie the model families
together.
"""

from .errors import (ConfigInvalid, GlasslabError, IncompatibleCoupling,
                     InvalidParameter, MomentMismatch, NonFiniteCoupling,
                     QuadratureFailure, SizeExceeded, UnsupportedLaw,
                     UnsupportedModel)
from .laws import (CompoundPoisson, ConvolutionMixture, CouplingLaw, Gaussian,
                   PointMass, Rademacher, Scaled, Uniform, a_coefficient,
                   a_coefficients, law_from_json, law_to_json, moments,
                   sample, seminorm_distance)
from .pressure import (DisorderSample, gibbs_expectation, multi_overlap_moment,
                       naive_random_pressure, random_pressure, sample_from_json,
                       sample_to_json)
from .seeding import SeedPlan
from .montecarlo import (DifferenceEstimate, PressureEstimate, VarianceReport,
                         difference_estimate, quenched_pressure, variance_check)
from .bounds import (BoundReport, canonical_sk_bound, canonical_vb_bound,
                     delta_n, prop_a_bound, prop_b_bound)
from .models import (couple, model_from_json, model_to_json, sk,
                     sk_spherical_pair, thinning_equivalence_test, universal_sk,
                     vb_bernoulli, vb_edge_canonical, vb_edge_grand,
                     vb_poissonized)
from .levy import (HalfGaussianDensity, LevyPair, a_star, connectivity_sweep,
                   generator_apply, interpolation_identity_check, pair_from_json,
                   pair_to_json, prop_c_residual, psi, sample_levy,
                   star_seminorm_bound)
from .verify import (COLUMNS, all_passed, config_hash, rows_to_csv,
                     rows_to_jsonl, run_all, run_criterion)

__version__ = "0.1.0"
