"""Infinitely divisible coupling families indexed by (jump measure, diffusion).

A pair (Lambda, v) with v >= 0 and Lambda a finite measure on (0, infinity)
describes the symmetric infinitely divisible law with exponent

    psi(k) = v k^2 / 2 + integral (1 - cos(k y)) Lambda(dy),

i.e. an independent-increments process X_t = sqrt(v) B_t + symmetric jumps
of size y at Poisson rate Lambda(dy), each jump signed by a fair coin.  The
pressure analysis touches such a family only through the even coefficient
functionals

    a*_0 = v/2 + integral ln cosh(y) Lambda(dy)
    a*_2 = v/2 + (1/2) integral tanh^2(y) Lambda(dy)
    a*_{2k} = (1/2k) integral tanh^{2k}(y) Lambda(dy)   (k >= 2),

the generator

    (G f)(x) = (v/2) f''(x)
               + integral [ f(x+y)/2 - f(x) + f(x-y)/2 ] Lambda(dy),

and time-1/N increment sampling.  Continuous jump intensities (the
half-Gaussian family 2 exp(-y^2/beta^2) / sqrt(pi beta^2) on (0, inf),
carrying second moment mass * beta^2/2) are discretized once at
construction into at most 512 quadrature atoms with the discretization
error recorded on the pair.

Scaling t * (Lambda, v) = (t Lambda, t v) multiplies weights only, so it is
exact on the atom representation, and mixtures interpolate two pairs the
same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameter, SizeExceeded, UnsupportedLaw
from .laws import (CompoundPoisson, CouplingLaw, Gaussian, Rademacher,
                   lncosh)
from .montecarlo import pairwise_sum
from .pressure import dense_pressure_batch, spin_matrix
from .quadrature import standard_normal_rule
from .seeding import SeedPlan

__all__ = [
    "HalfGaussianDensity",
    "LevyPair",
    "DENSITY_NODE_LIMIT",
    "psi",
    "a_star",
    "sample_levy",
    "generator_apply",
    "generator_lncosh",
    "lncosh_second",
    "interpolation_identity_check",
    "IdentityCheck",
    "star_seminorm_bound",
    "coupling_law_of_pair",
    "connectivity_sweep",
    "ConnectivityRow",
    "prop_c_residual",
    "ResidualReport",
    "pair_to_json",
    "pair_from_json",
]

DENSITY_NODE_LIMIT = 512


@dataclass(frozen=True)
class HalfGaussianDensity:
    """Jump intensity mass * 2 exp(-y^2/beta^2)/sqrt(pi beta^2) on (0, inf).

    This is mass times the density of |Z| with Z ~ N(0, beta^2/2), so the
    second moment is mass * beta^2 / 2.
    """

    beta: float
    n_nodes: int = 200
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameter("half-gaussian beta must be finite and > 0")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise InvalidParameter("density mass must be finite and > 0")
        n = int(self.n_nodes)
        if not 2 <= n <= DENSITY_NODE_LIMIT:
            raise InvalidParameter(
                f"density discretization needs 2..{DENSITY_NODE_LIMIT} nodes")
        if n % 2 == 1:
            raise InvalidParameter("use an even node count (no node at y = 0)")

    def discretize(self):
        """(positions, weights, mass_error, second_moment_error)."""
        z, w = standard_normal_rule(self.n_nodes)
        keep = z > 0
        y = z[keep] * (self.beta / math.sqrt(2.0))
        wt = 2.0 * self.mass * w[keep]
        mass_err = abs(float(wt.sum()) - self.mass)
        m2_err = abs(float(wt @ (y * y)) - self.mass * self.beta ** 2 / 2.0)
        return y, wt, mass_err, m2_err


@dataclass(frozen=True)
class LevyPair:
    """Diffusion coefficient v plus jump atoms ((y, w), ...), y > 0, w > 0.

    A continuous density is discretized at construction; the resulting atoms
    are appended and the discretization errors recorded.
    """

    v: float = 0.0
    atoms: tuple = ()
    density: Optional[HalfGaussianDensity] = None
    mass_error: float = field(default=0.0, compare=False)
    second_moment_error: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v >= 0.0):
            raise InvalidParameter("diffusion coefficient must be finite and >= 0")
        cleaned = []
        for y, w in self.atoms:
            y = float(y)
            w = float(w)
            if not (math.isfinite(y) and y > 0.0):
                raise InvalidParameter("jump positions must be finite and > 0")
            if not (math.isfinite(w) and w > 0.0):
                raise InvalidParameter("jump weights must be finite and > 0")
            cleaned.append((y, w))
        mass_err = m2_err = 0.0
        if self.density is not None:
            y, wt, mass_err, m2_err = self.density.discretize()
            cleaned.extend(zip(y.tolist(), wt.tolist()))
        object.__setattr__(self, "atoms", tuple(cleaned))
        object.__setattr__(self, "mass_error", mass_err)
        object.__setattr__(self, "second_moment_error", m2_err)

    def atom_arrays(self):
        if not self.atoms:
            return np.empty(0), np.empty(0)
        arr = np.asarray(self.atoms, dtype=float)
        return arr[:, 0].copy(), arr[:, 1].copy()

    @property
    def total_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def scale(self, t: float) -> "LevyPair":
        """t * (Lambda, v): weights and v scale, positions do not."""
        if not (math.isfinite(t) and t >= 0.0):
            raise InvalidParameter("scale factor must be finite and >= 0")
        return LevyPair(t * self.v,
                        tuple((y, t * w) for y, w in self.atoms if t * w > 0.0))

    def mix(self, other: "LevyPair", t: float) -> "LevyPair":
        """(1 - t) * self + t * other."""
        if not 0.0 <= t <= 1.0:
            raise InvalidParameter("mixture parameter must lie in [0, 1]")
        left = self.scale(1.0 - t)
        right = other.scale(t)
        return LevyPair(left.v + right.v, left.atoms + right.atoms)


def pair_to_json(pair: LevyPair) -> dict:
    out = {"v": pair.v, "atoms": [[y, w] for y, w in pair.atoms], "density": None}
    if pair.density is not None:
        # discretized atoms were appended at construction; serialize the
        # original intensity and the explicit atoms separately
        n_density = len(pair.density.discretize()[0])
        out["atoms"] = out["atoms"][:len(pair.atoms) - n_density]
        out["density"] = {"name": "half_gaussian", "beta": pair.density.beta,
                          "nodes": pair.density.n_nodes, "mass": pair.density.mass}
    return out


def pair_from_json(obj: dict) -> LevyPair:
    try:
        density = None
        if obj.get("density") is not None:
            d = obj["density"]
            if d.get("name") != "half_gaussian":
                raise UnsupportedLaw(f"unknown density {d.get('name')!r}")
            density = HalfGaussianDensity(float(d["beta"]), int(d.get("nodes", 200)),
                                          float(d.get("mass", 1.0)))
        atoms = tuple((float(y), float(w)) for y, w in obj.get("atoms", []))
        return LevyPair(float(obj.get("v", 0.0)), atoms, density)
    except (TypeError, KeyError, ValueError) as exc:
        raise InvalidParameter(f"malformed pair object: {exc}") from exc


# ---------------------------------------------------------------------------
# functionals


def psi(pair: LevyPair, k) -> np.ndarray:
    """Characteristic exponent v k^2/2 + integral (1 - cos(ky)) Lambda(dy)."""
    k = np.asarray(k, dtype=float)
    y, w = pair.atom_arrays()
    jump = ((1.0 - np.cos(np.multiply.outer(k, y))) @ w) if y.size else 0.0
    return pair.v * k * k / 2.0 + jump


def a_star(pair: LevyPair, k: int) -> float:
    """Even coefficient functionals a*_k; odd indices are identically zero
    by symmetry and are rejected."""
    if not (isinstance(k, int) and k >= 0 and k % 2 == 0):
        raise InvalidParameter("a* is defined for even k >= 0")
    y, w = pair.atom_arrays()
    if k == 0:
        return pair.v / 2.0 + float(w @ lncosh(y)) if y.size else pair.v / 2.0
    t = np.tanh(y) if y.size else np.empty(0)
    jump = float(w @ (t ** k)) / k if y.size else 0.0
    if k == 2:
        return pair.v / 2.0 + jump
    return jump


def _a_star_vector(pair: LevyPair, k_max: int) -> np.ndarray:
    """a*_{2k} for 2k = 0..k_max in one pass (index by 2k//2)."""
    half = k_max // 2
    out = np.zeros(half + 1)
    out[0] = pair.v / 2.0
    if half >= 1:
        out[1] = pair.v / 2.0
    y, w = pair.atom_arrays()
    if y.size:
        out[0] += float(w @ lncosh(y))
        t2 = np.tanh(y) ** 2
        power = np.ones_like(t2)
        for k in range(1, half + 1):
            power = power * t2
            out[k] += float(w @ power) / (2 * k)
    return out


def sample_levy(pair: LevyPair, t: float, rng, size: Optional[int] = None):
    """Draw X_t: sqrt(t v) Gaussian plus fair-signed jumps at rate t w.

    Per atom the signed jump total is y (2 B - c) with c ~ Poisson(t w) and
    B ~ Binomial(c, 1/2).  Scalar when size is None.
    """
    if not (math.isfinite(t) and t >= 0.0):
        raise InvalidParameter("time must be finite and >= 0")
    scalar = size is None
    n = 1 if scalar else int(size)
    out = math.sqrt(t * pair.v) * rng.standard_normal(n) if pair.v > 0 else np.zeros(n)
    y, w = pair.atom_arrays()
    if y.size:
        counts = rng.poisson(t * w, size=(n, y.size))
        heads = rng.binomial(counts, 0.5)
        out = out + (2.0 * heads - counts) @ y
    return float(out[0]) if scalar else out


def lncosh_second(x):
    """Second derivative of ln cosh: 1 / cosh^2."""
    return 1.0 / np.cosh(x) ** 2


def generator_apply(pair: LevyPair, f: Callable, x, *,
                    second_derivative: Optional[Callable] = None):
    """(G f)(x) = (v/2) f'' + sum_atoms w [f(x+y)/2 - f(x) + f(x-y)/2].

    The diffusion part needs an explicit second derivative; omit it only
    for pure-jump pairs.
    """
    x = np.asarray(x, dtype=float)
    if pair.v > 0.0 and second_derivative is None:
        raise InvalidParameter("diffusion part requires the second derivative of f")
    out = np.zeros_like(x)
    if pair.v > 0.0:
        out = out + (pair.v / 2.0) * np.asarray(second_derivative(x), dtype=float)
    y, w = pair.atom_arrays()
    if y.size:
        fx = np.asarray(f(x), dtype=float)
        for yy, ww in zip(y, w):
            out = out + ww * (0.5 * np.asarray(f(x + yy), dtype=float)
                              - fx + 0.5 * np.asarray(f(x - yy), dtype=float))
    return out


def generator_lncosh(pair: LevyPair, x):
    """Closed form of the generator applied to ln cosh:

    v / (2 cosh^2 x) + sum_atoms (w/2) ln(1 + sinh^2 y / cosh^2 x)."""
    x = np.asarray(x, dtype=float)
    out = pair.v / 2.0 * lncosh_second(x)
    y, w = pair.atom_arrays()
    for yy, ww in zip(y, w):
        out = out + (ww / 2.0) * np.log1p((np.sinh(yy) / np.cosh(x)) ** 2)
    return out


def star_seminorm_bound(pair_a: LevyPair, pair_b: LevyPair, k_max: int = 60) -> float:
    """sum over even k of |a*_k(A) - a*_k(B)|, truncated plus rigorous tail.

    Only jump measures enter indices 2k > k_max (the diffusion part stops at
    k = 2), and |a*_k(A) - a*_k(B)| <= integral tanh^k(y)/k d|Lambda_A -
    Lambda_B|(y), so the tail is the per-position remainder

        g(y) = ln cosh y - sum_{2 <= 2k <= k_max} tanh^{2k}(y) / (2k) >= 0

    integrated against the total variation of the atom difference (atoms at
    shared positions cancel; identical pairs get a zero tail).
    """
    if k_max < 2:
        raise InvalidParameter("k_max must be >= 2")
    va = _a_star_vector(pair_a, k_max)
    vb = _a_star_vector(pair_b, k_max)
    total = float(np.abs(va - vb).sum())
    net = {}
    for y, w in pair_a.atoms:
        net[y] = net.get(y, 0.0) + w
    for y, w in pair_b.atoms:
        net[y] = net.get(y, 0.0) - w
    if net:
        ys = np.array(sorted(net))
        dw = np.abs(np.array([net[y] for y in sorted(net)]))
        g = lncosh(ys)
        t2 = np.tanh(ys) ** 2
        power = np.ones_like(t2)
        for k in range(1, k_max // 2 + 1):
            power = power * t2
            g = g - power / (2 * k)
        total += float(dw @ np.maximum(g, 0.0))
    return total


def coupling_law_of_pair(pair: LevyPair) -> CouplingLaw:
    """The time-1 marginal F(Lambda, v) as a coupling law, where expressible.

    Pure diffusion gives Gaussian(0, v).  A pure half-Gaussian intensity
    gives exactly CompoundPoisson(mass, Gaussian(0, beta^2/2)) because the
    fair-signed normalized jump law is N(0, beta^2/2).  A single atom gives
    CompoundPoisson(w, Rademacher(y)).  Other combinations are rejected.
    """
    has_density = pair.density is not None
    explicit_atoms = (len(pair.atoms)
                      - (len(pair.density.discretize()[0]) if has_density else 0))
    if has_density and explicit_atoms == 0 and pair.v == 0.0:
        d = pair.density
        return CompoundPoisson(d.mass, Gaussian(0.0, d.beta ** 2 / 2.0))
    if not has_density and not pair.atoms:
        return Gaussian(0.0, pair.v)
    if not has_density and len(pair.atoms) == 1 and pair.v == 0.0:
        y, w = pair.atoms[0]
        return CompoundPoisson(w, Rademacher(y))
    raise UnsupportedLaw(
        "only pure diffusion, a single atom, or a pure half-Gaussian "
        "intensity translate to a closed coupling law"
    )


# ---------------------------------------------------------------------------
# the interpolation identity


def _simpson(t_nodes: int):
    if t_nodes < 3 or t_nodes % 2 == 0:
        raise InvalidParameter("Simpson integration needs an odd node count >= 3")
    t = np.linspace(0.0, 1.0, t_nodes)
    w = np.ones(t_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (t[1] - t[0]) / 3.0
    return t, w


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)

    @property
    def z(self) -> float:
        return self.residual / self.stderr if self.stderr > 0 else math.inf

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= 3.0 * self.stderr


def _mc_mean(fn_values: np.ndarray):
    m = fn_values.size
    mean = pairwise_sum(fn_values) / m
    var = pairwise_sum((fn_values - mean) ** 2) / (m - 1)
    return mean, math.sqrt(var / m)


def _mean_of_f_at_time_one(pair: LevyPair, f, m_samples, rng, chunk=1 << 17):
    vals = np.empty(m_samples)
    for lo in range(0, m_samples, chunk):
        n = min(chunk, m_samples - lo)
        vals[lo:lo + n] = f(sample_levy(pair, 1.0, rng, size=n))
    return _mc_mean(vals)


def interpolation_identity_check(pair_a: LevyPair, pair_b: LevyPair, f: Callable,
                                 m_samples: int, seeds: SeedPlan, *,
                                 second_derivative: Optional[Callable] = None,
                                 t_nodes: int = 21) -> IdentityCheck:
    """Monte Carlo check of the exact interpolation identity

        E_b[f] - E_a[f] = integral_0^1 E_t[(G_b - G_a) f] dt,

    where E_t averages over the time-1 law of (1-t) pair_a + t pair_b.  The
    left side uses direct sampling of both endpoint pairs; the right side
    evaluates the generator difference on samples of each mixed pair and
    integrates over t with Simpson weights.  Node estimates use independent
    substreams, so stderrs combine in quadrature.
    """
    if m_samples < 2:
        raise InvalidParameter("m_samples must be >= 2")
    mean_b, se_b = _mean_of_f_at_time_one(pair_b, f, m_samples,
                                          seeds.child(0).generator(0))
    mean_a, se_a = _mean_of_f_at_time_one(pair_a, f, m_samples,
                                          seeds.child(1).generator(0))
    lhs = mean_b - mean_a
    lhs_se = math.hypot(se_a, se_b)

    t, w = _simpson(t_nodes)

    def gen_diff(x):
        return (generator_apply(pair_b, f, x, second_derivative=second_derivative)
                - generator_apply(pair_a, f, x, second_derivative=second_derivative))

    rhs = 0.0
    rhs_var = 0.0
    for j, (tj, wj) in enumerate(zip(t, w)):
        mixed = pair_a.mix(pair_b, float(tj))
        mean_j, se_j = _mean_of_f_at_time_one(mixed, gen_diff, m_samples,
                                              seeds.child(2, j).generator(0))
        rhs += wj * mean_j
        rhs_var += (wj * se_j) ** 2
    return IdentityCheck(lhs=float(lhs), lhs_stderr=float(lhs_se),
                         rhs=float(rhs), rhs_stderr=math.sqrt(rhs_var))


# ---------------------------------------------------------------------------
# pressures driven by Lévy pairs


def _pair_pressure_batch(pair: LevyPair, n_sites: int, h: float,
                         m_realizations: int, rng, chunk: int = 8192):
    """Quenched pressure when each of the N^2 couplings is a time-1/N
    increment of the pair; returns (mean, stderr)."""
    n2 = n_sites * n_sites
    vals = np.empty(m_realizations)
    for lo in range(0, m_realizations, chunk):
        b = min(chunk, m_realizations - lo)
        flat = sample_levy(pair, 1.0 / n_sites, rng, size=b * n2)
        vals[lo:lo + b] = dense_pressure_batch(flat.reshape(b, n_sites, n_sites), h)
    return _mc_mean(vals)


@dataclass(frozen=True)
class ConnectivityRow:
    alpha: float
    gap: float
    gap_stderr: float
    bound: float

    @property
    def verdict(self) -> bool:
        return abs(self.gap) <= self.bound + 3.0 * self.gap_stderr


def connectivity_sweep(beta: float, alphas: Sequence[float], n_sites: int,
                       m_realizations: int, seeds: SeedPlan, *,
                       k_max: int = 60, threads: Optional[int] = None,
                       density_nodes: int = 200):
    """Diluted-to-dense convergence: for each connectivity alpha compare the
    Poissonized model at jump scale beta / sqrt(2 alpha) against the dense
    Gaussian model at beta.

    The per-entry jump variance is beta^2 / (2 alpha) so the total entry
    second moment stays beta^2 / (2N); the matching jump-measure pair is the
    half-Gaussian intensity of mass alpha at width parameter beta/sqrt(alpha)
    against the pure diffusion pair (0, beta^2/2).  Reports the Monte Carlo
    pressure gap and the star-seminorm bound per alpha; the bound decreases
    to zero as alpha grows.
    """
    from .models import sk, vb_poissonized
    from .montecarlo import quenched_pressure

    sk_est = quenched_pressure(sk(beta, n_sites), m_realizations,
                               seeds.child(0), threads=threads)
    sk_pair = LevyPair(v=beta * beta / 2.0)
    rows = []
    for idx, alpha in enumerate(alphas):
        if alpha <= 0:
            raise InvalidParameter("connectivities must be > 0")
        jump_var = beta * beta / (2.0 * alpha)
        model = vb_poissonized(alpha, beta, n_sites, jump_variance=jump_var)
        est = quenched_pressure(model, m_realizations, seeds.child(1, idx),
                                threads=threads)
        vb_pair = LevyPair(density=HalfGaussianDensity(
            beta=math.sqrt(2.0 * jump_var), n_nodes=density_nodes, mass=float(alpha)))
        bound = star_seminorm_bound(sk_pair, vb_pair, k_max)
        rows.append(ConnectivityRow(alpha=float(alpha),
                                    gap=est.mean - sk_est.mean,
                                    gap_stderr=math.hypot(est.stderr, sk_est.stderr),
                                    bound=bound))
    return rows


@dataclass(frozen=True)
class ResidualReport:
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    terms: tuple  # (order 2k, coefficient difference) per truncated term

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)

    @property
    def z(self) -> float:
        return self.residual / self.stderr if self.stderr > 0 else math.inf

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= 3.0 * self.stderr


def _overlap_sums_batch(pair: LevyPair, n_sites: int, h: float, orders,
                        coeffs: np.ndarray, m_realizations: int, rng,
                        chunk: int = 8192):
    """Per-realization sum_k coeffs_k <(R_{N,2k})^2> under the pair's
    time-1/N couplings; <.> is the replica-factorized Gibbs average."""
    S = spin_matrix(n_sites)
    n2 = n_sites * n_sites
    vals = np.empty(m_realizations)
    for lo in range(0, m_realizations, chunk):
        b = min(chunk, m_realizations - lo)
        flat = sample_levy(pair, 1.0 / n_sites, rng, size=b * n2)
        mats = flat.reshape(b, n_sites, n_sites)
        e = np.einsum("ci,bij,cj->bc", S, mats, S) + h * S.sum(axis=1)[None, :]
        e -= e.max(axis=1, keepdims=True)
        w = np.exp(e)
        w /= w.sum(axis=1, keepdims=True)
        corr = np.einsum("bc,ci,cj->bij", w, S, S)
        acc = np.zeros(b)
        for order, cf in zip(orders, coeffs):
            acc += cf * (corr ** order).sum(axis=(1, 2)) / n2
        vals[lo:lo + b] = acc
    return _mc_mean(vals)


def prop_c_residual(pair_a: LevyPair, pair_b: LevyPair, n_sites: int, h: float,
                    k_max: int, m_realizations: int, seeds: SeedPlan, *,
                    t_nodes: int = 9) -> ResidualReport:
    """Residual of the pressure-difference expansion

        p*_N(B) - p*_N(A) = a*_0(B) - a*_0(A)
            - sum_{k>=1} [a*_{2k}(B) - a*_{2k}(A)]
              * integral_0^1 E_t<(R_{N,2k})^2> dt,

    truncated at 2k <= k_max.  The left side is a Monte Carlo pressure
    difference with couplings drawn as time-1/N increments; each overlap
    integral is estimated with Simpson nodes in t under the mixed pair.
    Exact for tiny N, so the residual is truncation bias plus noise.
    """
    if n_sites > 3:
        raise SizeExceeded("the residual check is restricted to N <= 3")
    if k_max < 2:
        raise InvalidParameter("k_max must be >= 2")
    mean_b, se_b = _pair_pressure_batch(pair_b, n_sites, h, m_realizations,
                                        seeds.child(0).generator(0))
    mean_a, se_a = _pair_pressure_batch(pair_a, n_sites, h, m_realizations,
                                        seeds.child(1).generator(0))
    lhs = mean_b - mean_a
    lhs_se = math.hypot(se_a, se_b)

    va = _a_star_vector(pair_a, k_max)
    vb = _a_star_vector(pair_b, k_max)
    half = k_max // 2
    orders = [2 * k for k in range(1, half + 1)]
    coeffs = np.array([vb[k] - va[k] for k in range(1, half + 1)])

    t, w = _simpson(t_nodes)
    correction = 0.0
    corr_var = 0.0
    for j, (tj, wj) in enumerate(zip(t, w)):
        mixed = pair_a.mix(pair_b, float(tj))
        mean_j, se_j = _overlap_sums_batch(mixed, n_sites, h, orders, coeffs,
                                           m_realizations,
                                           seeds.child(2, j).generator(0))
        correction += wj * mean_j
        corr_var += (wj * se_j) ** 2
    rhs = float(vb[0] - va[0]) - correction
    terms = tuple((orders[i], float(coeffs[i])) for i in range(len(orders)))
    return ResidualReport(lhs=float(lhs), lhs_stderr=float(lhs_se),
                          rhs=float(rhs), rhs_stderr=math.sqrt(corr_var),
                          terms=terms)
