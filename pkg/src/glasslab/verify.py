"""Built-in verification suite.

Twelve numbered experiment families, each producing fixed-schema verdict
rows; run_all executes them all under one master seed.  The thirteenth
check, byte-identical output across thread counts, is a property of the
renderers here and is exercised by the CLI `verify` command and the test
suite rather than by a row-producing family.

Row schema is frozen (see COLUMNS); floats are rendered with repr so the
CSV is a bit-faithful record of the run.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Optional

import numpy as np

from .bounds import (canonical_sk_bound, canonical_sk_radicand,
                     canonical_vb_bound, delta_n, prop_a_bound)
from .errors import GlasslabError
from .laws import Rademacher, lncosh
from .levy import (LevyPair, connectivity_sweep, interpolation_identity_check,
                   lncosh_second, prop_c_residual)
from .models import (sk, sk_spherical_pair, thinning_equivalence_test,
                     universal_sk, vb_edge_canonical, vb_edge_grand,
                     vb_poissonized)
from .montecarlo import difference_estimate, resolve_threads, variance_check
from .pressure import DisorderSample, naive_random_pressure, random_pressure
from .seeding import SeedPlan

LN2 = math.log(2.0)

COLUMNS = ("experiment", "name", "model", "N", "alpha", "beta", "h", "M",
           "k_max", "mean", "stderr", "bound", "slack", "verdict", "seed",
           "config_hash")


def config_hash(config: dict, exclude=("out", "format", "threads")) -> str:
    """12-hex-digit digest of the semantic part of a config.

    Presentation keys (output path, format, thread count) are excluded so
    that replays of the same experiment hash identically.
    """
    clean = {k: config[k] for k in sorted(config) if k not in exclude}
    blob = json.dumps(clean, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _row(experiment: str, name: str, *, model: str = "", n=None, alpha=None,
         beta=None, h=None, m=None, k_max=None, mean=None, stderr=None,
         bound=None, slack=None, verdict=None) -> dict:
    return {"experiment": experiment, "name": name, "model": model, "N": n,
            "alpha": alpha, "beta": beta, "h": h, "M": m, "k_max": k_max,
            "mean": mean, "stderr": stderr, "bound": bound, "slack": slack,
            "verdict": bool(verdict)}


def _bound_row(experiment: str, name: str, *, mean: float, bound: float,
               stderr: Optional[float] = None, **kw) -> dict:
    """Row for checks of the form |mean| <= bound (+ 3 stderr if given)."""
    sigma = 0.0 if stderr is None else 3.0 * stderr
    slack = bound + sigma - abs(mean)
    return _row(experiment, name, mean=mean, stderr=stderr, bound=bound,
                slack=slack, verdict=slack >= 0.0, **kw)


# ---------------------------------------------------------------------------
# experiment families


def _exact_small(seeds: SeedPlan, threads: int):
    """N=1 closed form and the zero-coupling pure-field form, N <= 16."""
    rng = seeds.generator()
    trials = 25
    worst1 = 0.0
    for _ in range(trials):
        j11 = float(rng.normal())
        h = float(rng.normal())
        got = random_pressure(DisorderSample.dense(np.array([[j11]]), h=h))
        worst1 = max(worst1, abs(got - (j11 + LN2 + float(lncosh(h)))))
    rows = [_bound_row("exact_small", "n1_closed_form", mean=worst1,
                       bound=1e-12, n=1, m=trials)]
    worst0 = 0.0
    for n in range(1, 17):
        h = float(rng.normal())
        got = random_pressure(DisorderSample.dense(np.zeros((n, n)), h=h))
        worst0 = max(worst0, abs(got - (LN2 + float(lncosh(h)))))
    rows.append(_bound_row("exact_small", "zero_coupling", mean=worst0,
                           bound=1e-12, n=16, m=16))
    return rows


def _enumerator_pair(seeds: SeedPlan, threads: int):
    """Incremental Gray-code route against the recompute-everything route."""
    rng = seeds.generator()
    worst = {"dense": 0.0, "edges": 0.0}
    for trial in range(200):
        n = int(rng.integers(2, 11))
        h = 0.5 * float(rng.normal())
        if trial % 2 == 0:
            sample = DisorderSample.dense(rng.normal(size=(n, n)), h=h)
        else:
            m_edges = int(rng.integers(0, 4 * n + 1))
            sample = DisorderSample.edges(
                n, rng.integers(1, n + 1, size=m_edges),
                rng.integers(1, n + 1, size=m_edges),
                rng.normal(size=m_edges), h=h)
        err = abs(random_pressure(sample) - naive_random_pressure(sample))
        worst[sample.form] = max(worst[sample.form], err)
    return [_bound_row("enumerator_pair", f"gray_vs_naive_{form}", mean=err,
                       bound=1e-12, m=100) for form, err in worst.items()]


def _lipschitz(seeds: SeedPlan, threads: int):
    """|p_hat(J) - p_hat(J')| <= (1/N) sum |J - J'| on random perturbations."""
    rng = seeds.generator()
    trials = 1000
    worst = -math.inf
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        h = 0.3 * float(rng.normal())
        a = rng.normal(size=(n, n))
        b = a + float(rng.uniform(0.01, 1.0)) * rng.normal(size=(n, n))
        gap = abs(random_pressure(DisorderSample.dense(a, h=h))
                  - random_pressure(DisorderSample.dense(b, h=h)))
        worst = max(worst, gap - float(np.abs(a - b).sum()) / n)
    # worst excess is signed; any negative value means the budget held
    return [_row("lipschitz", "per_trial_excess", mean=worst, bound=1e-9,
                 slack=1e-9 - worst, verdict=worst <= 1e-9, m=trials)]


def _universality_gap(seeds: SeedPlan, threads: int):
    """Gaussian vs matched scaled-Rademacher quenched pressures vs the
    seminorm bound, independent estimates at several sizes."""
    base = Rademacher(1.0 / math.sqrt(2.0))
    rows = []
    for idx, n in enumerate((2, 4, 6, 8)):
        model_a = sk(1.0, n)
        model_b = universal_sk(base, n)
        est = difference_estimate(model_a, model_b, 10000, seeds.child(idx),
                                  coupling="independent", threads=threads)
        bnd = prop_a_bound(model_a.entry_law, model_b.entry_law, n)
        rows.append(_bound_row("universality_gap", f"gauss_vs_rademacher_N{n}",
                               model="sk/universal_sk", n=n, beta=1.0,
                               m=10000, k_max=60, mean=est.mean,
                               stderr=est.stderr, bound=bnd))
    return rows


def _defect_rate(seeds: SeedPlan, threads: int):
    """delta_N along N = 4, 16, 64, 256: strictly decreasing with log-log
    slope -1 (finite fourth moment rate)."""
    base = Rademacher(1.0 / math.sqrt(2.0))
    sizes = (4, 16, 64, 256)
    values = [delta_n(base, 1.0, n) for n in sizes]
    rows = []
    prev = None
    for n, value in zip(sizes, values):
        rows.append(_row("defect_rate", f"delta_N{n}", model="rademacher_base",
                         n=n, beta=1.0, mean=value, bound=prev,
                         slack=None if prev is None else prev - value,
                         verdict=prev is None or value < prev))
        prev = value
    slope = float(np.polyfit(np.log(sizes), np.log(values), 1)[0])
    rows.append(_row("defect_rate", "loglog_slope", model="rademacher_base",
                     beta=1.0, mean=slope, bound=0.15,
                     slack=0.15 - abs(slope + 1.0),
                     verdict=abs(slope + 1.0) <= 0.15))
    return rows


def _variance_bound(seeds: SeedPlan, threads: int):
    """Sample variance of p_hat stays under the entry-law variance, worst
    case over 20 independent repetitions."""
    repeats = 20
    worst = -math.inf
    bound = 0.0
    for i in range(repeats):
        rep = variance_check(sk(1.0, 8), 2000, seeds.child(i), threads=threads)
        worst = max(worst, rep.sample_variance)
        bound = rep.bound
    return [_bound_row("variance_bound", f"sk_n8_worst_of_{repeats}",
                       model="sk", n=8, beta=1.0, m=2000, mean=worst,
                       bound=bound)]


def _vb_count_coupling(seeds: SeedPlan, threads: int):
    """Poisson vs fixed edge count under shared randomness: pressure gap and
    realized L1/N both under the closed-form budget."""
    rows = []
    for idx, n in enumerate((4, 8, 16)):
        est = difference_estimate(vb_edge_grand(2.0, 1.0, n),
                                  vb_edge_canonical(2.0, 1.0, n),
                                  10000, seeds.child(idx), coupling="crn",
                                  threads=threads)
        bnd = canonical_vb_bound(2.0, 1.0, n)
        rows.append(_bound_row("vb_count_coupling", f"gap_N{n}",
                               model="vb_edge", n=n, alpha=2.0, beta=1.0,
                               m=10000, mean=est.mean, stderr=est.stderr,
                               bound=bnd))
        rows.append(_bound_row("vb_count_coupling", f"l1_over_n_N{n}",
                               model="vb_edge", n=n, alpha=2.0, beta=1.0,
                               m=10000, mean=est.l1_mean / n,
                               stderr=est.l1_stderr / n, bound=bnd))
    return rows


def _spherical_coupling(seeds: SeedPlan, threads: int):
    """Chi-distributed vs fixed coupling-vector radius under a shared
    direction, plus the deterministic radicand cap."""
    rows = []
    for idx, n in enumerate((4, 8, 16)):
        grand, canonical = sk_spherical_pair(1.0, n)
        est = difference_estimate(grand, canonical, 10000, seeds.child(idx),
                                  coupling="crn", threads=threads)
        rows.append(_bound_row("spherical_coupling", f"gap_N{n}",
                               model="sk_spherical", n=n, beta=1.0, m=10000,
                               mean=est.mean, stderr=est.stderr,
                               bound=canonical_sk_bound(1.0, n)))
    worst = max(canonical_sk_radicand(n) for n in range(1, 65))
    rows.append(_bound_row("spherical_coupling", "radicand_max_to_N64", n=64,
                           mean=worst, bound=2.0))
    return rows


def _thinning(seeds: SeedPlan, threads: int):
    """Uniform binning of a Poisson edge stream is i.i.d. Poisson per cell;
    the edge-list and per-cell constructions agree in quenched pressure."""
    alpha, n, draws = 1.5, 3, 100000
    rep = thinning_equivalence_test(alpha, n, draws, seeds.child(0).generator())
    sig = rep.significance
    min_p = float(rep.cell_pvalues.min())
    rows = [
        _row("thinning", "cell_chi2_min_p", n=n, alpha=alpha, m=draws,
             mean=min_p, bound=sig, slack=min_p - sig, verdict=min_p > sig),
        _row("thinning", "independence_p", n=n, alpha=alpha, m=draws,
             mean=rep.independence_pvalue, bound=sig,
             slack=rep.independence_pvalue - sig,
             verdict=rep.independence_pvalue > sig),
    ]
    zmax = max(abs(z) for _, _, _, _, z in rep.mgf_points)
    rows.append(_bound_row("thinning", "mgf_max_abs_z", n=n, alpha=alpha,
                           m=draws, mean=zmax, bound=rep.mgf_z_limit))
    est = difference_estimate(vb_edge_grand(alpha, 1.0, n),
                              vb_poissonized(alpha, 1.0, n, jump_variance=1.0),
                              10000, seeds.child(1), coupling="independent",
                              threads=threads)
    rows.append(_bound_row("thinning", "edge_vs_cell_pressure_gap", n=n,
                           alpha=alpha, beta=1.0, m=10000, mean=est.mean,
                           stderr=est.stderr, bound=0.0))
    return rows


def _connectivity(seeds: SeedPlan, threads: int):
    """Diluted models approach the dense Gaussian model as connectivity
    grows; the seminorm budget shrinks monotonically."""
    m = 5000
    table = connectivity_sweep(1.0, (1.0, 2.0, 4.0, 8.0, 16.0), 6, m, seeds,
                               threads=threads)
    rows = [_bound_row("connectivity", f"gap_alpha_{row.alpha:g}",
                       model="vb_poissonized/sk", n=6, alpha=row.alpha,
                       beta=1.0, m=m, k_max=60, mean=row.gap,
                       stderr=row.gap_stderr, bound=row.bound)
            for row in table]
    bounds = [row.bound for row in table]
    worst_step = max(b2 - b1 for b1, b2 in zip(bounds, bounds[1:]))
    rows.append(_row("connectivity", "bound_strictly_decreasing", n=6,
                     beta=1.0, mean=worst_step, bound=0.0, slack=-worst_step,
                     verdict=worst_step < 0.0))
    return rows


def _generator_identity(seeds: SeedPlan, threads: int):
    """Semigroup interpolation identity for ln cosh between the pure
    diffusion pair and the single-atom pair."""
    chk = interpolation_identity_check(LevyPair(v=1.0),
                                       LevyPair(atoms=((1.0, 1.0),)),
                                       lncosh, 1000000, seeds,
                                       second_derivative=lncosh_second,
                                       t_nodes=21)
    return [_bound_row("generator_identity", "diffusion_vs_atom_lncosh",
                       m=1000000, mean=chk.residual, stderr=chk.stderr,
                       bound=0.0)]


def _overlap_residual(seeds: SeedPlan, threads: int):
    """Pressure difference of two infinitely divisible models equals the
    coefficient gap minus the replica-overlap correction."""
    pair_a = LevyPair(v=1.0).scale(0.25)
    pair_b = LevyPair(atoms=((1.0, 1.0),)).scale(0.25)
    rep = prop_c_residual(pair_a, pair_b, 2, 0.0, 8, 100000, seeds, t_nodes=9)
    return [_bound_row("overlap_residual", "diffusion_vs_atom_N2", n=2, h=0.0,
                       k_max=8, m=100000, mean=rep.residual,
                       stderr=rep.stderr, bound=0.0)]


CRITERIA = (
    (1, "exact_small", _exact_small),
    (2, "enumerator_pair", _enumerator_pair),
    (3, "lipschitz", _lipschitz),
    (4, "universality_gap", _universality_gap),
    (5, "defect_rate", _defect_rate),
    (6, "variance_bound", _variance_bound),
    (7, "vb_count_coupling", _vb_count_coupling),
    (8, "spherical_coupling", _spherical_coupling),
    (9, "thinning", _thinning),
    (10, "connectivity", _connectivity),
    (11, "generator_identity", _generator_identity),
    (12, "overlap_residual", _overlap_residual),
)


def run_criterion(index: int, seeds: SeedPlan, threads: Optional[int] = None):
    """Run one numbered family against its own seed subtree."""
    threads = resolve_threads(threads)
    for number, slug, fn in CRITERIA:
        if number == index:
            return fn(seeds, threads)
    raise ValueError(f"no experiment family numbered {index}")


def run_all(master_seed: int, threads: Optional[int] = None) -> list:
    """Every family under one master seed; failures surface as rows."""
    threads = resolve_threads(threads)
    digest = config_hash({"command": "verify", "master_seed": int(master_seed)})
    plan = SeedPlan(int(master_seed))
    rows = []
    for number, slug, fn in CRITERIA:
        try:
            produced = fn(plan.child(number), threads)
        except GlasslabError as exc:
            produced = [_row(slug, f"error_{type(exc).__name__}",
                             verdict=False)]
        for row in produced:
            row["seed"] = int(master_seed)
            row["config_hash"] = digest
            rows.append(row)
    return rows


def all_passed(rows) -> bool:
    return all(row.get("verdict") for row in rows)


# ---------------------------------------------------------------------------
# renderers


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "pass" if value else "fail"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows) -> str:
    lines = [",".join(COLUMNS)]
    for row in rows:
        cells = [_cell(row.get(col)) for col in COLUMNS]
        if any("," in c or "\n" in c for c in cells):
            raise ValueError("row values must not contain separators")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_jsonl(rows) -> str:
    lines = []
    for row in rows:
        obj = {}
        for col in COLUMNS:
            value = row.get(col)
            if isinstance(value, (bool, np.bool_)):
                value = "pass" if value else "fail"
            elif isinstance(value, np.integer):
                value = int(value)
            elif isinstance(value, np.floating):
                value = float(value)
            obj[col] = value
        lines.append(json.dumps(obj))
    return "\n".join(lines) + "\n"
