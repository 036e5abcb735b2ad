"""Coupling distributions and their log-cosh / tanh-power functionals.

A coupling law F enters the pressure analysis only through the coefficient
sequence

    a_0(F) = E[ln cosh X],      a_k(F) = E[tanh^k X] / k   (k >= 1),

and through the first two moments.  Every law kind therefore exposes a
finite quadrature discretization (nodes, weights) against which these
expectations are evaluated in one vectorized pass:

  - point_mass, rademacher: exact atoms;
  - gaussian: Gauss-Hermite (default 200 nodes);
  - uniform: Gauss-Legendre (default 200 nodes);
  - scaled: the base rule with nodes divided by sqrt(n);
  - convolution_mixture, compound_poisson: a weighted union of the rules of
    the convolution powers of the base/jump law, with the Poisson weight
    sequence truncated once its residual mass drops below 1e-14.

Moments use closed forms, never quadrature.  Mixture moments follow
mu1(F^(*k)) = k mu1, mu2(F^(*k)) = k sigma^2 + (k mu1)^2.

The seminorm distance sum_k |a_k(F) - a_k(G)| is reported as a truncated
sum plus a rigorous tail bound built from two identities:

    sum_{k>=1} tanh^{2k}(x)/(2k) = ln cosh x            (even indices),
    sum_{k odd} |tanh x|^k / k   = |x|                  (odd indices),

so the even tail beyond k_max is E[ln cosh] minus the even terms already
counted, and the odd tail is bounded by E[|x| - sum of counted odd powers]
(zero exactly for symmetric laws).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameter, QuadratureFailure, UnsupportedLaw
from .quadrature import standard_normal_rule, uniform_rule

__all__ = [
    "CouplingLaw",
    "PointMass",
    "Rademacher",
    "Gaussian",
    "Uniform",
    "Scaled",
    "ConvolutionMixture",
    "CompoundPoisson",
    "DEFAULT_NODES",
    "POISSON_RESIDUAL",
    "lncosh",
    "moments",
    "variance",
    "a_coefficient",
    "a_coefficients",
    "seminorm_distance",
    "sample",
    "law_to_json",
    "law_from_json",
]

DEFAULT_NODES = 200
POISSON_RESIDUAL = 1e-14


def lncosh(x):
    """ln cosh x, stable for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


class CouplingLaw:
    """Base class; subclasses are small frozen dataclasses."""

    kind = "abstract"
    can_convolve = False

    # (mu1, mu2) in closed form
    def moment_pair(self):
        raise NotImplementedError

    @property
    def is_symmetric(self) -> bool:
        raise NotImplementedError

    def quadrature(self, n_nodes: int = DEFAULT_NODES):
        """Finite (nodes, weights) discretization; weights sum to ~1."""
        raise NotImplementedError

    def sample_array(self, size: int, rng) -> np.ndarray:
        raise NotImplementedError

    def convolution_power(self, j: int) -> "CouplingLaw":
        raise UnsupportedLaw(
            f"{self.kind} has no closed convolution powers; it cannot be the "
            "base of a convolution mixture or compound Poisson law"
        )

    def params_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(CouplingLaw):
    """All mass at a single point c."""

    c: float
    kind = "point_mass"
    can_convolve = True

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise InvalidParameter("point_mass location must be finite")

    def moment_pair(self):
        return self.c, self.c * self.c

    @property
    def is_symmetric(self):
        return self.c == 0.0

    def quadrature(self, n_nodes=DEFAULT_NODES):
        return np.array([self.c]), np.array([1.0])

    def sample_array(self, size, rng):
        return np.full(size, self.c, dtype=float)

    def convolution_power(self, j):
        return PointMass(j * self.c)

    def params_json(self):
        return {"c": self.c}


@dataclass(frozen=True)
class Rademacher(CouplingLaw):
    """Symmetric two-point law: +b or -b with probability 1/2 each."""

    b: float
    kind = "rademacher"
    can_convolve = True

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise InvalidParameter("rademacher magnitude must be finite and >= 0")

    def moment_pair(self):
        return 0.0, self.b * self.b

    @property
    def is_symmetric(self):
        return True

    def quadrature(self, n_nodes=DEFAULT_NODES):
        return np.array([-self.b, self.b]), np.array([0.5, 0.5])

    def sample_array(self, size, rng):
        return self.b * (2.0 * rng.integers(0, 2, size=size) - 1.0)

    def convolution_power(self, j):
        # sum of j independent signs: values (j - 2i) b, binomial weights
        vals = np.array([(j - 2 * i) * self.b for i in range(j + 1)])
        probs = np.array([math.comb(j, i) for i in range(j + 1)], dtype=float)
        return _FiniteAtoms(tuple(vals), tuple(probs / probs.sum()))

    def params_json(self):
        return {"b": self.b}


@dataclass(frozen=True)
class _FiniteAtoms(CouplingLaw):
    """Internal finite discrete law (convolution powers of rademacher)."""

    values: tuple
    probs: tuple
    kind = "_finite_atoms"

    def moment_pair(self):
        v = np.asarray(self.values)
        p = np.asarray(self.probs)
        return float(p @ v), float(p @ (v * v))

    @property
    def is_symmetric(self):
        v = np.asarray(self.values)
        p = np.asarray(self.probs)
        order = np.argsort(v)
        rev = np.argsort(-v)
        return np.allclose(v[order], -v[rev]) and np.allclose(p[order], p[rev])

    def quadrature(self, n_nodes=DEFAULT_NODES):
        return np.asarray(self.values, dtype=float), np.asarray(self.probs, dtype=float)

    def sample_array(self, size, rng):
        idx = rng.choice(len(self.values), size=size, p=np.asarray(self.probs))
        return np.asarray(self.values, dtype=float)[idx]

    def params_json(self):
        raise UnsupportedLaw("internal finite-atom laws are not serializable")


@dataclass(frozen=True)
class Gaussian(CouplingLaw):
    mean: float
    var: float
    kind = "gaussian"
    can_convolve = True

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.var)):
            raise InvalidParameter("gaussian parameters must be finite")
        if self.var < 0.0:
            raise InvalidParameter("gaussian variance must be >= 0")

    def moment_pair(self):
        return self.mean, self.var + self.mean * self.mean

    @property
    def is_symmetric(self):
        return self.mean == 0.0

    def quadrature(self, n_nodes=DEFAULT_NODES):
        z, w = standard_normal_rule(n_nodes)
        return self.mean + math.sqrt(self.var) * z, w

    def sample_array(self, size, rng):
        return self.mean + math.sqrt(self.var) * rng.standard_normal(size)

    def convolution_power(self, j):
        return Gaussian(j * self.mean, j * self.var)

    def params_json(self):
        return {"mean": self.mean, "variance": self.var}


@dataclass(frozen=True)
class Uniform(CouplingLaw):
    """Uniform on [-half_width, half_width]."""

    half_width: float
    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0.0):
            raise InvalidParameter("uniform half width must be finite and > 0")

    def moment_pair(self):
        return 0.0, self.half_width * self.half_width / 3.0

    @property
    def is_symmetric(self):
        return True

    def quadrature(self, n_nodes=DEFAULT_NODES):
        x, w = uniform_rule(n_nodes)
        return self.half_width * x, w

    def sample_array(self, size, rng):
        return rng.uniform(-self.half_width, self.half_width, size=size)

    def params_json(self):
        return {"half_width": self.half_width}


@dataclass(frozen=True)
class Scaled(CouplingLaw):
    """Law of X / sqrt(n) for X ~ base; the c.d.f. is F_base(sqrt(n) x)."""

    base: CouplingLaw
    n: int
    kind = "scaled"

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise InvalidParameter("scaled law size must be an integer >= 1")

    def moment_pair(self):
        mu1, mu2 = self.base.moment_pair()
        return mu1 / math.sqrt(self.n), mu2 / self.n

    @property
    def is_symmetric(self):
        return self.base.is_symmetric

    def quadrature(self, n_nodes=DEFAULT_NODES):
        x, w = self.base.quadrature(n_nodes)
        return x / math.sqrt(self.n), w

    def sample_array(self, size, rng):
        return self.base.sample_array(size, rng) / math.sqrt(self.n)

    def params_json(self):
        return {"base": law_to_json(self.base), "n": self.n}


def _segment_sums(flat: np.ndarray, counts: np.ndarray) -> np.ndarray:
    # sum of consecutive segments of `flat` with the given lengths
    ends = np.cumsum(counts)
    cs = np.concatenate([[0.0], np.cumsum(flat)])
    return cs[ends] - cs[ends - counts]


@dataclass(frozen=True)
class ConvolutionMixture(CouplingLaw):
    """F = sum_j pmf[j] * base^(*j), with base^(*0) the point mass at 0.

    The pmf must be a finite nonnegative sequence summing to 1 within 1e-12;
    the base must have closed-form convolution powers.
    """

    pmf: tuple
    base: CouplingLaw
    kind = "convolution_mixture"

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise InvalidParameter("mixture pmf must be finite, nonnegative, 1-d")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParameter(
                f"mixture pmf must sum to 1 within 1e-12, got {p.sum()!r}"
            )
        if not self.base.can_convolve:
            raise UnsupportedLaw(
                f"mixture base kind {self.base.kind!r} lacks closed convolution powers"
            )
        object.__setattr__(self, "pmf", tuple(float(v) for v in p))

    def _components(self):
        # (weight, law) pairs, skipping zero-probability terms
        out = []
        for j, f in enumerate(self.pmf):
            if f > 0.0:
                law = PointMass(0.0) if j == 0 else self.base.convolution_power(j)
                out.append((f, law))
        return out

    def moment_pair(self):
        b1, b2 = self.base.moment_pair()
        bvar = b2 - b1 * b1
        mu1 = mu2 = 0.0
        for j, f in enumerate(self.pmf):
            mu1 += f * j * b1
            mu2 += f * (j * bvar + (j * b1) ** 2)
        return mu1, mu2

    @property
    def is_symmetric(self):
        return self.base.is_symmetric

    def quadrature(self, n_nodes=DEFAULT_NODES):
        xs, ws = [], []
        for f, law in self._components():
            x, w = law.quadrature(n_nodes)
            xs.append(x)
            ws.append(f * w)
        return np.concatenate(xs), np.concatenate(ws)

    def sample_array(self, size, rng):
        p = np.asarray(self.pmf)
        counts = rng.choice(len(p), size=size, p=p / p.sum())
        flat = self.base.sample_array(int(counts.sum()), rng)
        return _segment_sums(flat, counts)

    def params_json(self):
        return {"pmf": list(self.pmf), "base": law_to_json(self.base)}


def _poisson_weights(rate: float, residual: float = POISSON_RESIDUAL):
    """Poisson(rate) pmf truncated once the remaining mass is < residual."""
    w = math.exp(-rate)
    out = [w]
    total = w
    j = 0
    while 1.0 - total >= residual:
        j += 1
        w *= rate / j
        out.append(w)
        total += w
        if j > 10000:
            raise QuadratureFailure("poisson weight truncation did not converge")
    return np.asarray(out)


@dataclass(frozen=True)
class CompoundPoisson(CouplingLaw):
    """Sum of K i.i.d. jumps with K ~ Poisson(rate).

    Functionals integrate against the Poisson mixture of jump convolution
    powers, truncated at residual mass POISSON_RESIDUAL; the jump law must
    have closed-form convolution powers.
    """

    rate: float
    jump: CouplingLaw
    kind = "compound_poisson"

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate >= 0.0):
            raise InvalidParameter("compound poisson rate must be finite and >= 0")
        if not self.jump.can_convolve:
            raise UnsupportedLaw(
                f"jump kind {self.jump.kind!r} lacks closed convolution powers"
            )

    def moment_pair(self):
        j1, j2 = self.jump.moment_pair()
        mu1 = self.rate * j1
        return mu1, self.rate * j2 + mu1 * mu1

    @property
    def is_symmetric(self):
        return self.jump.is_symmetric

    def quadrature(self, n_nodes=DEFAULT_NODES):
        pw = _poisson_weights(self.rate)
        xs, ws = [], []
        for j, f in enumerate(pw):
            if f <= 0.0:
                continue
            law = PointMass(0.0) if j == 0 else self.jump.convolution_power(j)
            x, w = law.quadrature(n_nodes)
            xs.append(x)
            ws.append(f * w)
        return np.concatenate(xs), np.concatenate(ws)

    def sample_array(self, size, rng):
        counts = rng.poisson(self.rate, size=size)
        flat = self.jump.sample_array(int(counts.sum()), rng)
        return _segment_sums(flat, counts)

    def params_json(self):
        return {"rate": self.rate, "jump": law_to_json(self.jump)}


# ---------------------------------------------------------------------------
# module-level operations


def moments(law: CouplingLaw):
    """(mu1, mu2): first and second moment, closed form per kind."""
    mu1, mu2 = law.moment_pair()
    return float(mu1), float(mu2)


def variance(law: CouplingLaw) -> float:
    mu1, mu2 = law.moment_pair()
    return float(mu2 - mu1 * mu1)


def _phi(x: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return lncosh(x)
    return np.tanh(x) ** k / k


def a_coefficient(law: CouplingLaw, k: int, *, n_nodes: int = DEFAULT_NODES,
                  tolerance: Optional[float] = None) -> float:
    """a_k(law): E[ln cosh X] for k = 0, E[tanh^k X]/k for k >= 1.

    With `tolerance` set, the value is recomputed on a coarser rule and a
    QuadratureFailure is raised if the two disagree by more than tolerance.
    """
    if not (isinstance(k, int) and k >= 0):
        raise InvalidParameter("coefficient index must be an integer >= 0")
    x, w = law.quadrature(n_nodes)
    val = float(w @ _phi(x, k))
    if tolerance is not None:
        coarse = max(31, (2 * n_nodes) // 3)
        xc, wc = law.quadrature(coarse)
        ref = float(wc @ _phi(xc, k))
        if abs(val - ref) > tolerance:
            raise QuadratureFailure(
                f"a_{k} quadrature error estimate {abs(val - ref):.3e} exceeds "
                f"tolerance {tolerance:.3e}"
            )
    return val


def a_coefficients(law: CouplingLaw, k_max: int, *, n_nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Vector (a_0, a_1, ..., a_{k_max}) evaluated in one quadrature pass."""
    if not (isinstance(k_max, int) and k_max >= 0):
        raise InvalidParameter("k_max must be an integer >= 0")
    x, w = law.quadrature(n_nodes)
    out = np.empty(k_max + 1)
    out[0] = w @ lncosh(x)
    t = np.tanh(x)
    power = np.ones_like(t)
    for k in range(1, k_max + 1):
        power = power * t
        out[k] = (w @ power) / k
    return out


def _even_tail(law: CouplingLaw, k_max: int, n_nodes: int) -> float:
    # sum over even k > k_max of a_k, via sum_{k>=1} tanh^{2k}/(2k) = ln cosh
    x, w = law.quadrature(n_nodes)
    total = w @ lncosh(x)
    t2 = np.tanh(x) ** 2
    power = np.ones_like(t2)
    counted = 0.0
    for k in range(2, k_max + 1, 2):
        power = power * t2
        counted += (w @ power) / k
    return max(0.0, float(total - counted))


def _odd_tail(law: CouplingLaw, k_max: int, n_nodes: int) -> float:
    # upper bound on sum over odd k > k_max of |a_k|; exact zero if symmetric
    if law.is_symmetric:
        return 0.0
    x, w = law.quadrature(n_nodes)
    at = np.abs(np.tanh(x))
    rem = np.abs(x).astype(float)
    power = np.ones_like(at)
    for k in range(1, k_max + 1):
        power = power * at
        if k % 2 == 1:
            rem = rem - power / k
    return max(0.0, float(w @ rem))


def seminorm_distance(law_a: CouplingLaw, law_b: CouplingLaw, k_max: int = 60,
                      *, n_nodes: int = DEFAULT_NODES):
    """Distance sum_k |a_k(A) - a_k(B)| as (truncated_sum, tail_bound).

    truncated_sum covers k = 0..k_max; tail_bound is a rigorous upper bound
    on the remainder, from the even-index log-cosh identity and the odd-index
    |x| majorization applied to each law separately.
    """
    va = a_coefficients(law_a, k_max, n_nodes=n_nodes)
    vb = a_coefficients(law_b, k_max, n_nodes=n_nodes)
    truncated = float(np.abs(va - vb).sum())
    tail = (_even_tail(law_a, k_max, n_nodes) + _even_tail(law_b, k_max, n_nodes)
            + _odd_tail(law_a, k_max, n_nodes) + _odd_tail(law_b, k_max, n_nodes))
    return truncated, tail


def sample(law: CouplingLaw, rng, size: Optional[int] = None):
    """Draw from the law; scalar when size is None, else an array."""
    if size is None:
        return float(law.sample_array(1, rng)[0])
    return law.sample_array(size, rng)


# ---------------------------------------------------------------------------
# JSON round trip

_KINDS = {}


def _register(cls):
    _KINDS[cls.kind] = cls
    return cls


for _cls in (PointMass, Rademacher, Gaussian, Uniform, Scaled,
             ConvolutionMixture, CompoundPoisson):
    _register(_cls)


def law_to_json(law: CouplingLaw) -> dict:
    return {"kind": law.kind, "params": law.params_json()}


def law_from_json(obj: dict) -> CouplingLaw:
    try:
        kind = obj["kind"]
        params = dict(obj["params"])
    except (TypeError, KeyError) as exc:
        raise UnsupportedLaw(f"malformed law object: {obj!r}") from exc
    if kind not in _KINDS:
        raise UnsupportedLaw(f"unknown law kind {kind!r}")
    try:
        if kind == "point_mass":
            return PointMass(float(params["c"]))
        if kind == "rademacher":
            return Rademacher(float(params["b"]))
        if kind == "gaussian":
            return Gaussian(float(params["mean"]), float(params["variance"]))
        if kind == "uniform":
            return Uniform(float(params["half_width"]))
        if kind == "scaled":
            return Scaled(law_from_json(params["base"]), int(params["n"]))
        if kind == "convolution_mixture":
            return ConvolutionMixture(tuple(float(v) for v in params["pmf"]),
                                      law_from_json(params["base"]))
        if kind == "compound_poisson":
            return CompoundPoisson(float(params["rate"]),
                                   law_from_json(params["jump"]))
    except KeyError as exc:
        raise UnsupportedLaw(f"law kind {kind!r} missing parameter {exc}") from exc
    raise UnsupportedLaw(f"unknown law kind {kind!r}")
