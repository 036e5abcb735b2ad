"""Exact finite-size pressure of one disorder realization.

For N sites with coupling matrix J (diagonal included, both orientations
independent) and external field h, the random pressure is

    p_hat = (1/N) ln sum_{sigma in {-1,+1}^N} exp( sum_{i,j} J_ij s_i s_j
                                                   + h sum_i s_i ).

The main enumerator walks configurations in Gray-code order, so one spin
flips per step and the exponent is updated incrementally: O(N) per step for
dense matrices, O(degree of the flipped site) for edge lists.  Terms are
accumulated in the max-shifted exponential domain with Kahan compensation,
rescaling the partial sum whenever a new maximum appears.  A naive
enumerator that recomputes every exponent from scratch is kept as an
independent oracle.

Gibbs expectations over n independent replicas sharing the disorder
factorize exactly: the product measure gives
<prod_r prod_{i in I_r} s_i^(r)> = prod_r <prod_{i in I_r} s_i>, so one
2^N enumeration of single-replica weights suffices and the result equals
the literal (2^N)^n sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .errors import InvalidParameter, NonFiniteCoupling, SizeExceeded

__all__ = [
    "DisorderSample",
    "DENSE_N_MAX",
    "GIBBS_N_MAX",
    "random_pressure",
    "naive_random_pressure",
    "gibbs_expectation",
    "multi_overlap_moment",
    "dense_pressure_batch",
    "spin_matrix",
    "sample_to_json",
    "sample_from_json",
]

DENSE_N_MAX = 24      # random_pressure refuses larger systems
NAIVE_N_MAX = 16      # the from-scratch oracle materializes all 2^N configs
GIBBS_N_MAX = 12      # replica expectations
GIBBS_REPLICA_MAX = 4
OVERLAP_N_MAX = 8


@dataclass(frozen=True, eq=False)
class DisorderSample:
    """One frozen draw of the couplings.

    Dense form: `matrix` is an (N, N) array, diagonal included.  Edge form:
    1-based endpoint arrays `edge_i`, `edge_j` with weights `edge_w`;
    repeated pairs accumulate and i == j contributes the constant weight
    (s_i s_i = 1).
    """

    n_sites: int
    h: float
    matrix: Optional[np.ndarray] = None
    edge_i: Optional[np.ndarray] = None
    edge_j: Optional[np.ndarray] = None
    edge_w: Optional[np.ndarray] = None

    @property
    def form(self) -> str:
        return "dense" if self.matrix is not None else "edges"

    @staticmethod
    def dense(matrix, h: float = 0.0) -> "DisorderSample":
        m = np.ascontiguousarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidParameter("dense coupling matrix must be square, N >= 1")
        if not (np.all(np.isfinite(m)) and np.isfinite(h)):
            raise NonFiniteCoupling("couplings and field must be finite")
        return DisorderSample(n_sites=m.shape[0], h=float(h), matrix=m)

    @staticmethod
    def edges(n_sites: int, i, j, w, h: float = 0.0) -> "DisorderSample":
        if not (isinstance(n_sites, (int, np.integer)) and n_sites >= 1):
            raise InvalidParameter("n_sites must be an integer >= 1")
        ai = np.ascontiguousarray(i, dtype=np.int64)
        aj = np.ascontiguousarray(j, dtype=np.int64)
        aw = np.ascontiguousarray(w, dtype=float)
        if not (ai.shape == aj.shape == aw.shape and ai.ndim == 1):
            raise InvalidParameter("edge arrays must be 1-d and equal length")
        if ai.size and (ai.min() < 1 or ai.max() > n_sites
                        or aj.min() < 1 or aj.max() > n_sites):
            raise InvalidParameter("edge endpoints must lie in 1..n_sites")
        if not (np.all(np.isfinite(aw)) and np.isfinite(h)):
            raise NonFiniteCoupling("couplings and field must be finite")
        return DisorderSample(n_sites=int(n_sites), h=float(h),
                              edge_i=ai, edge_j=aj, edge_w=aw)

    def to_dense_matrix(self) -> np.ndarray:
        """Accumulate edges into an (N, N) matrix (identity for dense form)."""
        if self.matrix is not None:
            return self.matrix
        m = np.zeros((self.n_sites, self.n_sites))
        np.add.at(m, (self.edge_i - 1, self.edge_j - 1), self.edge_w)
        return m


def sample_to_json(sample: DisorderSample) -> dict:
    if sample.form == "dense":
        return {"form": "dense", "n": sample.n_sites, "h": sample.h,
                "matrix": sample.matrix.tolist()}
    edges = [[int(a), int(b), float(c)] for a, b, c
             in zip(sample.edge_i, sample.edge_j, sample.edge_w)]
    return {"form": "edges", "n": sample.n_sites, "h": sample.h, "edges": edges}


def sample_from_json(obj: dict) -> DisorderSample:
    try:
        form = obj["form"]
        if form == "dense":
            return DisorderSample.dense(np.asarray(obj["matrix"]), float(obj["h"]))
        if form == "edges":
            edges = np.asarray(obj["edges"], dtype=float)
            if edges.size == 0:
                edges = edges.reshape(0, 3)
            return DisorderSample.edges(int(obj["n"]), edges[:, 0].astype(int),
                                        edges[:, 1].astype(int), edges[:, 2],
                                        float(obj["h"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidParameter(f"malformed disorder sample object: {exc}") from exc
    raise InvalidParameter(f"unknown sample form {obj.get('form')!r}")


# ---------------------------------------------------------------------------
# Gray-code kernels


@njit(cache=True, nogil=True)
def _gray_lnz_dense(J, h):
    N = J.shape[0]
    sig = np.ones(N)
    E = h * N
    for i in range(N):
        for j in range(N):
            E += J[i, j]
    m = E
    s = 1.0
    c = 0.0
    for idx in range(1, 1 << N):
        b = 0
        t = idx
        while t & 1 == 0:
            t >>= 1
            b += 1
        r = 0.0
        for j in range(N):
            if j != b:
                r += (J[b, j] + J[j, b]) * sig[j]
        E += -2.0 * sig[b] * (r + h)
        sig[b] = -sig[b]
        if E <= m:
            v = np.exp(E - m)
        else:
            f = np.exp(m - E)
            s *= f
            c *= f
            m = E
            v = 1.0
        y = v - c
        t2 = s + y
        c = (t2 - s) - y
        s = t2
    return m + np.log(s)


@njit(cache=True, nogil=True)
def _gray_lnz_edges(indptr, nbr, wgt, e0, h, N):
    sig = np.ones(N)
    E = e0
    m = E
    s = 1.0
    c = 0.0
    for idx in range(1, 1 << N):
        b = 0
        t = idx
        while t & 1 == 0:
            t >>= 1
            b += 1
        r = 0.0
        for p in range(indptr[b], indptr[b + 1]):
            r += wgt[p] * sig[nbr[p]]
        E += -2.0 * sig[b] * (r + h)
        sig[b] = -sig[b]
        if E <= m:
            v = np.exp(E - m)
        else:
            f = np.exp(m - E)
            s *= f
            c *= f
            m = E
            v = 1.0
        y = v - c
        t2 = s + y
        c = (t2 - s) - y
        s = t2
    return m + np.log(s)


def _edge_csr(sample: DisorderSample):
    """Per-site incidence lists excluding self-loops (their weight is constant)."""
    i0 = sample.edge_i - 1
    j0 = sample.edge_j - 1
    w = sample.edge_w
    off = i0 != j0
    N = sample.n_sites
    counts = (np.bincount(i0[off], minlength=N)
              + np.bincount(j0[off], minlength=N))
    indptr = np.zeros(N + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    nbr = np.empty(indptr[-1], dtype=np.int64)
    wgt = np.empty(indptr[-1])
    cursor = indptr[:-1].copy()
    for a, b, ww in zip(i0[off], j0[off], w[off]):
        nbr[cursor[a]] = b
        wgt[cursor[a]] = ww
        cursor[a] += 1
        nbr[cursor[b]] = a
        wgt[cursor[b]] = ww
        cursor[b] += 1
    return indptr, nbr, wgt


def random_pressure(sample: DisorderSample, *, n_max: int = DENSE_N_MAX) -> float:
    """Exact random pressure by Gray-code enumeration with Kahan logsumexp."""
    N = sample.n_sites
    if N > n_max:
        raise SizeExceeded(f"N = {N} exceeds the enumeration limit {n_max}")
    if sample.form == "dense":
        lnz = _gray_lnz_dense(sample.matrix, sample.h)
    else:
        indptr, nbr, wgt = _edge_csr(sample)
        e0 = float(sample.edge_w.sum()) + sample.h * N
        lnz = _gray_lnz_edges(indptr, nbr, wgt, e0, sample.h, N)
    return lnz / N


@lru_cache(maxsize=8)
def _spin_matrix_cached(n_sites: int) -> np.ndarray:
    cfg = np.arange(1 << n_sites, dtype=np.int64)
    bits = (cfg[:, None] >> np.arange(n_sites)[None, :]) & 1
    return (1.0 - 2.0 * bits).astype(float)


def spin_matrix(n_sites: int) -> np.ndarray:
    """All 2^N spin configurations as a (2^N, N) array of +-1."""
    if n_sites > NAIVE_N_MAX:
        raise SizeExceeded(f"will not materialize 2^{n_sites} configurations")
    return _spin_matrix_cached(n_sites)


def _all_energies(sample: DisorderSample) -> np.ndarray:
    S = spin_matrix(sample.n_sites)
    J = sample.to_dense_matrix()
    return np.einsum("ci,ij,cj->c", S, J, S) + sample.h * S.sum(axis=1)


def naive_random_pressure(sample: DisorderSample) -> float:
    """From-scratch oracle: every exponent recomputed, scipy logsumexp."""
    return float(logsumexp(_all_energies(sample))) / sample.n_sites


def _config_weights(sample: DisorderSample):
    e = _all_energies(sample)
    w = np.exp(e - e.max())
    return spin_matrix(sample.n_sites), w / w.sum()


# ---------------------------------------------------------------------------
# replica expectations


def _single_replica_moment(S, w, sites) -> float:
    """<prod_{i in sites} s_i> under one replica; repeated sites cancel."""
    prod = np.ones(S.shape[0])
    seen = {}
    for s in sites:
        seen[s] = seen.get(s, 0) + 1
    for s, mult in seen.items():
        if mult % 2 == 1:
            prod = prod * S[:, s]
    return float(w @ prod)


def gibbs_expectation(sample: DisorderSample,
                      observable: Sequence[Tuple[int, int]]) -> float:
    """Exact Gibbs average of a spin product spread over replicas.

    `observable` lists (replica, site) pairs, both 1-based; the value is the
    thermal average of prod over pairs of s_site^(replica) for independent
    replicas sharing the disorder, i.e. the full (2^N)^n sum in factorized
    form.  Limits: replicas <= 4, N <= 12.
    """
    pairs = [(int(r), int(s)) for r, s in observable]
    if not pairs:
        return 1.0
    n = max(r for r, _ in pairs)
    N = sample.n_sites
    if any(r < 1 for r, _ in pairs) or any(not 1 <= s <= N for _, s in pairs):
        raise InvalidParameter("observable indices out of range (1-based)")
    if n > GIBBS_REPLICA_MAX:
        raise SizeExceeded(f"{n} replicas exceeds the limit {GIBBS_REPLICA_MAX}")
    if N > GIBBS_N_MAX:
        raise SizeExceeded(f"N = {N} exceeds the Gibbs limit {GIBBS_N_MAX}")
    S, w = _config_weights(sample)
    val = 1.0
    for r in range(1, n + 1):
        sites = [s - 1 for rr, s in pairs if rr == r]
        if sites:
            val *= _single_replica_moment(S, w, sites)
    return val


def _overlap_square_all_orders(sample: DisorderSample, orders) -> dict:
    """<(R_{N,n})^2> for each n in `orders` via pair correlations.

    R_{N,n} = (1/N) sum_i prod_{r<=n} s_i^(r); squaring and factorizing over
    replicas gives (1/N^2) sum_{i,i'} <s_i s_i'>^n exactly.
    """
    S, w = _config_weights(sample)
    C = S.T @ (w[:, None] * S)
    N = sample.n_sites
    return {n: float((C ** n).sum()) / (N * N) for n in orders}


def multi_overlap_moment(sample: DisorderSample, n: int, power: int = 2) -> float:
    """Exact <(R_{N,n})^power> for the degree-n multi-overlap.

    Limits n <= 4, N <= 8, power <= 4.  The replica product measure turns
    the (2^N)^n sum into sums of single-replica moments raised to the n-th
    power, evaluated from one enumeration.
    """
    if not (isinstance(n, int) and n >= 1) or not (isinstance(power, int) and power >= 1):
        raise InvalidParameter("replica count and power must be integers >= 1")
    N = sample.n_sites
    if n > GIBBS_REPLICA_MAX or power > 4:
        raise SizeExceeded(f"n = {n}, power = {power} exceeds the nested limits")
    if N > OVERLAP_N_MAX:
        raise SizeExceeded(f"N = {N} exceeds the overlap limit {OVERLAP_N_MAX}")
    if power == 2:
        return _overlap_square_all_orders(sample, (n,))[n]
    S, w = _config_weights(sample)
    cache = {}
    total = 0.0
    for tup in itertools.product(range(N), repeat=power):
        key = tuple(sorted(tup))
        if key not in cache:
            cache[key] = _single_replica_moment(S, w, key)
        total += cache[key] ** n
    return total / N ** power


# ---------------------------------------------------------------------------
# vectorized batch pressure (small N)


def dense_pressure_batch(matrices: np.ndarray, h: float, *, chunk: int = 4096) -> np.ndarray:
    """Random pressures for a (B, N, N) stack of dense couplings.

    Vectorized re-enumeration for small N (N <= 12); agrees with
    random_pressure to within a few ulp and exists for tight Monte Carlo
    loops over many tiny systems.
    """
    m = np.asarray(matrices, dtype=float)
    if m.ndim != 3 or m.shape[1] != m.shape[2]:
        raise InvalidParameter("expected a (B, N, N) stack")
    N = m.shape[1]
    if N > GIBBS_N_MAX:
        raise SizeExceeded(f"batch enumeration limited to N <= {GIBBS_N_MAX}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteCoupling("couplings must be finite")
    S = _spin_matrix_cached(N)
    field = h * S.sum(axis=1)
    out = np.empty(m.shape[0])
    for lo in range(0, m.shape[0], chunk):
        part = m[lo:lo + chunk]
        e = np.einsum("ci,bij,cj->bc", S, part, S) + field[None, :]
        out[lo:lo + chunk] = logsumexp(e, axis=1)
    return out / N
