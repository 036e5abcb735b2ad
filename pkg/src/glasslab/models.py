"""Model zoo: disorder generators for the pressure laboratory.

Three families:

  - DenseModel: N^2 i.i.d. entries from a coupling law (diagonal included);
  - EdgeModel: a random or fixed number of directed multigraph edges with
    uniform independent endpoints on {1..N}^2 and i.i.d. weights;
  - SphericalModel: couplings beta * radius * V / sqrt(2N) for a shared
    uniform direction V on the unit sphere of R^(N^2); the radius is either
    a chi draw with N^2 degrees of freedom or the fixed value sqrt(N^2),
    which puts the fixed-radius couplings exactly on the sphere of radius
    beta * sqrt(N/2).

Two jump-size conventions coexist for the diluted models and both appear in
the literature this lab reproduces: dense Poissonized entries default to
Gaussian jumps of variance beta^2/2, whereas edge weights default to
variance beta^2.  Every constructor takes an explicit override so the two
conventions can be aligned when comparing constructions.

couple() recognizes the shared-randomness pairings used by the coupling
bounds: grand-canonical vs canonical edge models (shared weight and
endpoint streams, differing only in how many edges are kept), the two
spherical radius rules (shared direction), and identical specifications
(shared draw).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.stats import chi2_contingency, chisquare, norm

from .errors import IncompatibleCoupling, InvalidParameter, MomentMismatch
from .laws import (CompoundPoisson, ConvolutionMixture, CouplingLaw, Gaussian,
                   Scaled, law_from_json, law_to_json, moments)
from .pressure import DisorderSample

__all__ = [
    "DenseModel",
    "EdgeModel",
    "SphericalModel",
    "CoupledPlan",
    "sk",
    "universal_sk",
    "vb_poissonized",
    "vb_bernoulli",
    "vb_edge_grand",
    "vb_edge_canonical",
    "sk_spherical_pair",
    "couple",
    "thinning_equivalence_test",
    "ThinningReport",
    "model_to_json",
    "model_from_json",
]


@dataclass(frozen=True)
class DenseModel:
    name: str
    n_sites: int
    h: float
    entry_law: CouplingLaw

    def draw(self, rng) -> DisorderSample:
        n = self.n_sites
        flat = self.entry_law.sample_array(n * n, rng)
        return DisorderSample.dense(flat.reshape(n, n), self.h)


@dataclass(frozen=True)
class EdgeModel:
    """count_kind "poisson" draws K ~ Poisson(count_mean); "fixed" keeps
    floor(count_mean) edges.  Draw order: count, weights, i-endpoints,
    j-endpoints."""

    name: str
    n_sites: int
    h: float
    weight_law: CouplingLaw
    count_kind: str
    count_mean: float

    def edge_count(self, rng) -> int:
        if self.count_kind == "poisson":
            return int(rng.poisson(self.count_mean))
        return int(math.floor(self.count_mean))

    def draw(self, rng) -> DisorderSample:
        k = self.edge_count(rng)
        w = self.weight_law.sample_array(k, rng)
        i = rng.integers(1, self.n_sites + 1, size=k)
        j = rng.integers(1, self.n_sites + 1, size=k)
        return DisorderSample.edges(self.n_sites, i, j, w, self.h)


@dataclass(frozen=True)
class SphericalModel:
    name: str
    n_sites: int
    h: float
    beta: float
    radius: str  # "chi" or "fixed"

    def _direction(self, rng) -> np.ndarray:
        g = rng.standard_normal(self.n_sites ** 2)
        return g / np.sqrt((g * g).sum())

    def _radius(self, rng) -> float:
        if self.radius == "chi":
            g = rng.standard_normal(self.n_sites ** 2)
            return float(np.sqrt((g * g).sum()))
        return float(self.n_sites)  # sqrt(N^2)

    def draw(self, rng) -> DisorderSample:
        n = self.n_sites
        v = self._direction(rng)
        x = self._radius(rng)
        mat = (self.beta * x / math.sqrt(2 * n)) * v
        return DisorderSample.dense(mat.reshape(n, n), self.h)


@dataclass(frozen=True)
class CoupledPlan:
    """A joint draw for two models sharing underlying randomness.

    draw_joint(rng) returns (sample_a, sample_b, l1) with l1 the summed
    absolute difference of the aligned coupling sequences.
    """

    model_a: object
    model_b: object
    draw_joint: Callable


def _check_site_count(n_sites: int):
    if not (isinstance(n_sites, (int, np.integer)) and n_sites >= 1):
        raise InvalidParameter("n_sites must be an integer >= 1")


# ---------------------------------------------------------------------------
# zoo constructors


def sk(beta: float, n_sites: int, h: float = 0.0) -> DenseModel:
    """Dense Gaussian entries of variance beta^2 / (2N)."""
    _check_site_count(n_sites)
    if beta < 0:
        raise InvalidParameter("beta must be >= 0")
    law = Gaussian(0.0, beta * beta / (2 * n_sites))
    return DenseModel("sk", int(n_sites), float(h), law)


def universal_sk(base: CouplingLaw, n_sites: int, h: float = 0.0, *,
                 validate: bool = True) -> DenseModel:
    """Dense entries base / sqrt(N); base must be centered."""
    _check_site_count(n_sites)
    if validate:
        mu1, mu2 = moments(base)
        if abs(mu1) > 1e-10:
            raise MomentMismatch(f"base law mean {mu1!r} must vanish")
        if not math.isfinite(mu2):
            raise MomentMismatch("base law needs a finite second moment")
    return DenseModel("universal_sk", int(n_sites), float(h), Scaled(base, int(n_sites)))


def vb_poissonized(alpha: float, beta: float, n_sites: int, h: float = 0.0, *,
                   jump_variance: Optional[float] = None) -> DenseModel:
    """Dense entries: compound Poisson, rate alpha/N, Gaussian jumps.

    Default jump variance beta^2/2 (the dense convention); pass an explicit
    jump_variance to align with the edge convention beta^2.
    """
    _check_site_count(n_sites)
    if alpha < 0:
        raise InvalidParameter("alpha must be >= 0")
    jv = beta * beta / 2.0 if jump_variance is None else float(jump_variance)
    law = CompoundPoisson(alpha / n_sites, Gaussian(0.0, jv))
    return DenseModel("vb_poissonized", int(n_sites), float(h), law)


def vb_bernoulli(alpha: float, beta: float, n_sites: int, h: float = 0.0, *,
                 jump_variance: Optional[float] = None) -> DenseModel:
    """Dense entries: one Gaussian jump with probability alpha/N, else 0."""
    _check_site_count(n_sites)
    p = alpha / n_sites
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter("alpha/N must lie in [0, 1] for the Bernoulli form")
    jv = beta * beta / 2.0 if jump_variance is None else float(jump_variance)
    law = ConvolutionMixture((1.0 - p, p), Gaussian(0.0, jv))
    return DenseModel("vb_bernoulli", int(n_sites), float(h), law)


def _edge_weight_law(beta: float, weight_variance: Optional[float]) -> CouplingLaw:
    wv = beta * beta if weight_variance is None else float(weight_variance)
    return Gaussian(0.0, wv)


def vb_edge_grand(alpha: float, beta: float, n_sites: int, h: float = 0.0, *,
                  weight_variance: Optional[float] = None) -> EdgeModel:
    """Poisson(alpha N) edges, uniform endpoints, Gaussian weights.

    Default weight variance beta^2 (the edge convention)."""
    _check_site_count(n_sites)
    if alpha < 0:
        raise InvalidParameter("alpha must be >= 0")
    return EdgeModel("vb_edge_grand", int(n_sites), float(h),
                     _edge_weight_law(beta, weight_variance),
                     "poisson", alpha * n_sites)


def vb_edge_canonical(alpha: float, beta: float, n_sites: int, h: float = 0.0, *,
                      weight_variance: Optional[float] = None) -> EdgeModel:
    """Exactly floor(alpha N) edges, otherwise as vb_edge_grand."""
    _check_site_count(n_sites)
    if alpha < 0:
        raise InvalidParameter("alpha must be >= 0")
    return EdgeModel("vb_edge_canonical", int(n_sites), float(h),
                     _edge_weight_law(beta, weight_variance),
                     "fixed", alpha * n_sites)


def sk_spherical_pair(beta: float, n_sites: int, h: float = 0.0
                      ) -> Tuple[SphericalModel, SphericalModel]:
    """(chi-radius, fixed-radius) spherical models sharing their law family."""
    _check_site_count(n_sites)
    grand = SphericalModel("sk_spherical_grand", int(n_sites), float(h),
                           float(beta), "chi")
    canonical = SphericalModel("sk_spherical_canonical", int(n_sites), float(h),
                               float(beta), "fixed")
    return grand, canonical


# ---------------------------------------------------------------------------
# shared-randomness couplings


def _couple_edges(a: EdgeModel, b: EdgeModel) -> CoupledPlan:
    poisson, fixed = (a, b) if a.count_kind == "poisson" else (b, a)
    flip = a.count_kind != "poisson"

    def draw_joint(rng):
        k_rand = int(rng.poisson(poisson.count_mean))
        k_fixed = int(math.floor(fixed.count_mean))
        top = max(k_rand, k_fixed)
        w = poisson.weight_law.sample_array(top, rng)
        i = rng.integers(1, poisson.n_sites + 1, size=top)
        j = rng.integers(1, poisson.n_sites + 1, size=top)
        sp = DisorderSample.edges(poisson.n_sites, i[:k_rand], j[:k_rand],
                                  w[:k_rand], poisson.h)
        sf = DisorderSample.edges(fixed.n_sites, i[:k_fixed], j[:k_fixed],
                                  w[:k_fixed], fixed.h)
        l1 = float(np.abs(w[min(k_rand, k_fixed):top]).sum())
        if flip:
            return sf, sp, l1
        return sp, sf, l1

    return CoupledPlan(a, b, draw_joint)


def _couple_spherical(a: SphericalModel, b: SphericalModel) -> CoupledPlan:
    chi, fixed = (a, b) if a.radius == "chi" else (b, a)
    flip = a.radius != "chi"
    n = a.n_sites

    def draw_joint(rng):
        v = chi._direction(rng)
        x = chi._radius(rng)
        scale = a.beta / math.sqrt(2 * n)
        mat_chi = (scale * x) * v
        mat_fix = (scale * n) * v
        sc = DisorderSample.dense(mat_chi.reshape(n, n), chi.h)
        sf = DisorderSample.dense(mat_fix.reshape(n, n), fixed.h)
        l1 = scale * abs(x - n) * float(np.abs(v).sum())
        if flip:
            return sf, sc, l1
        return sc, sf, l1

    return CoupledPlan(a, b, draw_joint)


def _couple_identical(a, b) -> CoupledPlan:
    def draw_joint(rng):
        s = a.draw(rng)
        return s, s, 0.0

    return CoupledPlan(a, b, draw_joint)


def couple(model_a, model_b) -> CoupledPlan:
    """Build a shared-randomness plan for a recognized model pairing."""
    if model_a == model_b:
        return _couple_identical(model_a, model_b)
    if (isinstance(model_a, EdgeModel) and isinstance(model_b, EdgeModel)
            and model_a.n_sites == model_b.n_sites and model_a.h == model_b.h
            and model_a.weight_law == model_b.weight_law
            and model_a.count_mean == model_b.count_mean
            and {model_a.count_kind, model_b.count_kind} == {"poisson", "fixed"}):
        return _couple_edges(model_a, model_b)
    if (isinstance(model_a, SphericalModel) and isinstance(model_b, SphericalModel)
            and model_a.n_sites == model_b.n_sites and model_a.h == model_b.h
            and model_a.beta == model_b.beta
            and {model_a.radius, model_b.radius} == {"chi", "fixed"}):
        return _couple_spherical(model_a, model_b)
    raise IncompatibleCoupling(
        "no shared-randomness construction for "
        f"{getattr(model_a, 'name', model_a)!r} vs {getattr(model_b, 'name', model_b)!r}"
    )


# ---------------------------------------------------------------------------
# Poisson thinning equivalence


@dataclass(frozen=True)
class ThinningReport:
    """Statistics comparing binned edge counts to i.i.d. Poisson cells."""

    alpha: float
    n_sites: int
    samples: int
    significance: float
    cell_pvalues: np.ndarray          # (N, N)
    independence_pvalue: float
    independence_cells: tuple
    mgf_points: tuple                 # (label, empirical, exact, stderr, z)

    @property
    def mgf_z_limit(self) -> float:
        return float(norm.ppf(1.0 - self.significance / 2.0))

    @property
    def passed(self) -> bool:
        return (bool(np.all(self.cell_pvalues > self.significance))
                and self.independence_pvalue > self.significance
                and all(abs(z) <= self.mgf_z_limit
                        for _, _, _, _, z in self.mgf_points))


def _poisson_pmf_bins(lam: float, samples: int):
    """Counts histogram bins 0..cap with a pooled tail, expected >= ~5 each."""
    probs = []
    p = math.exp(-lam)
    k = 0
    cum = p
    while samples * (1.0 - cum) >= 5.0 and k < 200:
        probs.append(p)
        k += 1
        p *= lam / k
        cum += p
    probs.append(1.0 - sum(probs))  # pooled tail
    return np.asarray(probs)


def _mgf_lambdas(n_cells: int):
    lam1 = np.full(n_cells, 0.2)
    lam2 = 0.3 * np.where(np.arange(n_cells) % 2 == 0, 1.0, -1.0)
    lam3 = np.zeros(n_cells)
    lam3[0] = 0.5
    return (("uniform_0.2", lam1), ("alternating_0.3", lam2), ("single_0.5", lam3))


def thinning_equivalence_test(alpha: float, n_sites: int, samples: int, rng, *,
                              significance: float = 1e-3) -> ThinningReport:
    """Bin Poisson(alpha N) uniform edges into N^2 cells and test the cells.

    Checks per draw: cell counts should be i.i.d. Poisson(alpha/N).  Reports
    per-cell chi-squared goodness-of-fit p-values, one contingency-table
    independence p-value for the fixed cell pair ((1,1), (N,N)), and the
    joint moment generating function at three fixed argument vectors against
    prod_cells exp(lam_cell * (e^t - 1)).
    """
    _check_site_count(n_sites)
    if samples < 1000:
        raise InvalidParameter("need at least 1000 draws for the cell tests")
    n2 = n_sites * n_sites
    lam_cell = alpha / n_sites
    ks = rng.poisson(alpha * n_sites, size=samples)
    total = int(ks.sum())
    ii = rng.integers(0, n_sites, size=total)
    jj = rng.integers(0, n_sites, size=total)
    cell = ii * n_sites + jj
    owner = np.repeat(np.arange(samples), ks)
    counts = np.bincount(owner * n2 + cell, minlength=samples * n2)
    counts = counts.reshape(samples, n2)

    probs = _poisson_pmf_bins(lam_cell, samples)
    cap = probs.size - 1
    expected = probs * samples
    pvals = np.empty(n2)
    for c in range(n2):
        obs = np.bincount(np.minimum(counts[:, c], cap), minlength=cap + 1)
        pvals[c] = chisquare(obs, expected).pvalue

    cell_a, cell_b = 0, n2 - 1
    table = np.zeros((cap + 1, cap + 1))
    np.add.at(table, (np.minimum(counts[:, cell_a], cap),
                      np.minimum(counts[:, cell_b], cap)), 1.0)
    # drop empty rows/columns so the contingency test is well posed
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    ind_p = float(chi2_contingency(table, correction=False).pvalue)

    mgf = []
    for label, lam in _mgf_lambdas(n2):
        vals = np.exp(counts @ lam)
        emp = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(samples))
        exact = float(np.exp(lam_cell * (np.exp(lam) - 1.0).sum()))
        mgf.append((label, emp, exact, se, (emp - exact) / se))

    return ThinningReport(alpha=float(alpha), n_sites=int(n_sites),
                          samples=int(samples), significance=float(significance),
                          cell_pvalues=pvals.reshape(n_sites, n_sites),
                          independence_pvalue=ind_p,
                          independence_cells=((1, 1), (n_sites, n_sites)),
                          mgf_points=tuple(mgf))


# ---------------------------------------------------------------------------
# JSON dispatch for the zoo


_ZOO = {
    "sk": sk,
    "universal_sk": universal_sk,
    "vb_poissonized": vb_poissonized,
    "vb_bernoulli": vb_bernoulli,
    "vb_edge_grand": vb_edge_grand,
    "vb_edge_canonical": vb_edge_canonical,
}


def model_to_json(model) -> dict:
    if isinstance(model, DenseModel):
        return {"name": model.name, "n": model.n_sites, "h": model.h,
                "entry_law": law_to_json(model.entry_law)}
    if isinstance(model, EdgeModel):
        return {"name": model.name, "n": model.n_sites, "h": model.h,
                "weight_law": law_to_json(model.weight_law),
                "count_kind": model.count_kind, "count_mean": model.count_mean}
    if isinstance(model, SphericalModel):
        return {"name": model.name, "n": model.n_sites, "h": model.h,
                "beta": model.beta, "radius": model.radius}
    raise InvalidParameter(f"not a model: {model!r}")


def model_from_json(obj: dict):
    """Rebuild a model from JSON.

    Accepts either the descriptive form emitted by model_to_json (keyed by
    entry_law / weight_law / radius) or a zoo constructor spec
    {"name": ..., "params": {...}}.  universal_sk expects its base law under
    params["base"] in law JSON form; sk_spherical_pair is addressed as
    sk_spherical_grand / sk_spherical_canonical.
    """
    try:
        name = obj["name"]
        params = dict(obj.get("params", {}))
    except TypeError as exc:
        raise InvalidParameter(f"malformed model object: {obj!r}") from exc
    try:
        if "entry_law" in obj:
            return DenseModel(name=str(name), n_sites=int(obj["n"]),
                              h=float(obj["h"]),
                              entry_law=law_from_json(obj["entry_law"]))
        if "weight_law" in obj:
            return EdgeModel(name=str(name), n_sites=int(obj["n"]),
                             h=float(obj["h"]),
                             weight_law=law_from_json(obj["weight_law"]),
                             count_kind=str(obj["count_kind"]),
                             count_mean=float(obj["count_mean"]))
        if "radius" in obj:
            return SphericalModel(name=str(name), n_sites=int(obj["n"]),
                                  h=float(obj["h"]), beta=float(obj["beta"]),
                                  radius=str(obj["radius"]))
    except KeyError as exc:
        raise InvalidParameter(f"model object missing field {exc}") from exc
    if name in ("sk_spherical_grand", "sk_spherical_canonical"):
        pair = sk_spherical_pair(float(params["beta"]), int(params["n"]),
                                 float(params.get("h", 0.0)))
        return pair[0] if name == "sk_spherical_grand" else pair[1]
    if name not in _ZOO:
        raise InvalidParameter(f"unknown model name {name!r}")
    kw = {}
    if name == "universal_sk":
        args = (law_from_json(params["base"]), int(params["n"]))
    elif name == "sk":
        args = (float(params["beta"]), int(params["n"]))
    else:
        args = (float(params["alpha"]), float(params["beta"]), int(params["n"]))
        if "jump_variance" in params and name.startswith("vb_") and "edge" not in name:
            kw["jump_variance"] = float(params["jump_variance"])
        if "weight_variance" in params and "edge" in name:
            kw["weight_variance"] = float(params["weight_variance"])
    return _ZOO[name](*args, float(params.get("h", 0.0)), **kw)
