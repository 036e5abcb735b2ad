"""Disorder Monte Carlo: quenched pressures and coupled differences.

Each realization index derives its own counter-based stream from the
SeedPlan, gets evaluated independently (optionally on a thread pool; the
enumeration kernels release the GIL), and lands in a result array ordered
by index.  Aggregation uses a fixed-shape pairwise summation tree over that
array, so means and variances are bit-identical regardless of thread count
or completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParameter, UnsupportedModel
from .pressure import random_pressure
from .seeding import SeedPlan

__all__ = [
    "THREADS_ENV_VAR",
    "PressureEstimate",
    "DifferenceEstimate",
    "VarianceReport",
    "resolve_threads",
    "pairwise_sum",
    "quenched_pressure",
    "variance_check",
    "difference_estimate",
    "difference_for_plan",
]

THREADS_ENV_VAR = "GLASSLAB_THREADS"


def resolve_threads(threads: Optional[int]) -> int:
    """Explicit argument, else the GLASSLAB_THREADS variable, else 1."""
    if threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        threads = int(env) if env else 1
    if threads < 1:
        raise InvalidParameter("thread count must be >= 1")
    return int(threads)


def pairwise_sum(values: np.ndarray) -> float:
    """Deterministic fixed-shape pairwise reduction (recursive halving)."""
    a = np.asarray(values, dtype=float)

    def rec(lo: int, hi: int) -> float:
        if hi - lo <= 32:
            s = 0.0
            for i in range(lo, hi):
                s += a[i]
            return s
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    return rec(0, a.size)


def _mean_var(values: np.ndarray):
    # shifted two-pass: exact zero variance for constant inputs
    m = values.size
    shift = float(values[0]) if m else 0.0
    centered = values - shift
    offset = pairwise_sum(centered) / m
    mean = shift + offset
    if m < 2:
        return mean, 0.0
    var = pairwise_sum((centered - offset) ** 2) / (m - 1)
    return mean, var


def _map_indexed(fn: Callable[[int], float], m: int, threads: int) -> np.ndarray:
    if threads <= 1:
        return np.array([fn(i) for i in range(m)])
    with ThreadPoolExecutor(max_workers=threads) as ex:
        chunk = max(1, m // (8 * threads))
        return np.array(list(ex.map(fn, range(m), chunksize=chunk)))


@dataclass(frozen=True)
class PressureEstimate:
    mean: float
    stderr: float
    variance: float
    count: int
    values: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DifferenceEstimate:
    mean: float
    stderr: float
    count: int
    coupling: str
    l1_mean: Optional[float] = None
    l1_stderr: Optional[float] = None
    values: Optional[np.ndarray] = None


@dataclass(frozen=True)
class VarianceReport:
    sample_variance: float
    bound: float
    count: int

    @property
    def passed(self) -> bool:
        return self.sample_variance <= self.bound


def quenched_pressure(model, m_realizations: int, seeds: SeedPlan, *,
                      threads: Optional[int] = None,
                      keep_values: bool = False) -> PressureEstimate:
    """Mean of m independent random-pressure evaluations of `model`.

    `model` must expose draw(rng) -> DisorderSample.
    """
    if m_realizations < 1:
        raise InvalidParameter("m_realizations must be >= 1")
    threads = resolve_threads(threads)

    def one(i: int) -> float:
        return random_pressure(model.draw(seeds.generator(i)))

    values = _map_indexed(one, m_realizations, threads)
    mean, var = _mean_var(values)
    return PressureEstimate(mean=mean, stderr=float(np.sqrt(var / m_realizations)),
                            variance=var, count=m_realizations,
                            values=values if keep_values else None)


def variance_check(model, m_realizations: int, seeds: SeedPlan, *,
                   threads: Optional[int] = None) -> VarianceReport:
    """Sample variance of p_hat against the entry-law variance bound.

    The bound Var(p_hat) <= Var(entry law) applies to models with N^2
    i.i.d. dense entries, so only those are accepted.
    """
    law = getattr(model, "entry_law", None)
    if law is None:
        raise UnsupportedModel("variance bound needs a dense i.i.d. entry law")
    from .laws import variance as law_variance
    est = quenched_pressure(model, m_realizations, seeds, threads=threads)
    return VarianceReport(sample_variance=est.variance,
                          bound=law_variance(law), count=m_realizations)


def difference_for_plan(plan, m_realizations: int, seeds: SeedPlan, *,
                        threads: Optional[int] = None,
                        keep_values: bool = False) -> DifferenceEstimate:
    """Common-random-numbers difference estimate for a coupled plan.

    `plan` exposes draw_joint(rng) -> (sample_a, sample_b, l1) where l1 is
    the summed absolute coupling difference of the aligned draws.
    """
    if m_realizations < 1:
        raise InvalidParameter("m_realizations must be >= 1")
    threads = resolve_threads(threads)

    def one(i: int):
        sa, sb, l1 = plan.draw_joint(seeds.generator(i))
        return random_pressure(sa) - random_pressure(sb), l1

    pairs = _map_indexed(lambda i: np.array(one(i)), m_realizations, threads)
    diffs = np.ascontiguousarray(pairs[:, 0])
    l1s = np.ascontiguousarray(pairs[:, 1])
    mean, var = _mean_var(diffs)
    l1_mean, l1_var = _mean_var(l1s)
    return DifferenceEstimate(mean=mean, stderr=float(np.sqrt(var / m_realizations)),
                              count=m_realizations, coupling="crn",
                              l1_mean=l1_mean,
                              l1_stderr=float(np.sqrt(l1_var / m_realizations)),
                              values=diffs if keep_values else None)


def difference_estimate(model_a, model_b, m_realizations: int, seeds: SeedPlan, *,
                        coupling: str = "independent",
                        threads: Optional[int] = None,
                        keep_values: bool = False) -> DifferenceEstimate:
    """Estimate E[p_hat(A) - p_hat(B)] with independent or shared randomness.

    coupling "independent": each realization uses two unrelated child
    streams.  coupling "crn": the models must admit one of the recognized
    shared-randomness constructions (see models.couple); IncompatibleCoupling
    otherwise.
    """
    if coupling == "crn":
        from .models import couple
        plan = couple(model_a, model_b)
        return difference_for_plan(plan, m_realizations, seeds, threads=threads,
                                   keep_values=keep_values)
    if coupling != "independent":
        raise InvalidParameter(f"unknown coupling mode {coupling!r}")
    if m_realizations < 1:
        raise InvalidParameter("m_realizations must be >= 1")
    threads = resolve_threads(threads)
    seeds_a = seeds.child(0)
    seeds_b = seeds.child(1)

    def one(i: int) -> float:
        pa = random_pressure(model_a.draw(seeds_a.generator(i)))
        pb = random_pressure(model_b.draw(seeds_b.generator(i)))
        return pa - pb

    values = _map_indexed(one, m_realizations, threads)
    mean, var = _mean_var(values)
    return DifferenceEstimate(mean=mean, stderr=float(np.sqrt(var / m_realizations)),
                              count=m_realizations, coupling="independent",
                              values=values if keep_values else None)
