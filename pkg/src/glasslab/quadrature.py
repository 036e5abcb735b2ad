"""Gauss quadrature node/weight helpers.

Gauss-Hermite rules are re-expressed for expectations against a standard
normal: with hermgauss nodes t_i and weights u_i,

    E[g(Z)] = (1/sqrt(pi)) * sum_i u_i g(sqrt(2) t_i),   Z ~ N(0, 1),

so the returned nodes are sqrt(2) t_i and the weights u_i / sqrt(pi), which
sum to 1.  Gauss-Legendre rules are mapped to [-1, 1] with weights summing
to 1 so they read as expectations against Uniform(-1, 1).
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

__all__ = ["standard_normal_rule", "uniform_rule"]


@lru_cache(maxsize=32)
def _hermite_rule(n_nodes: int):
    t, u = hermgauss(n_nodes)
    return np.sqrt(2.0) * t, u / np.sqrt(np.pi)


@lru_cache(maxsize=32)
def _legendre_rule(n_nodes: int):
    x, w = leggauss(n_nodes)
    return x, w / 2.0


def standard_normal_rule(n_nodes: int):
    """Nodes and weights for E[g(Z)], Z standard normal; weights sum to 1."""
    x, w = _hermite_rule(int(n_nodes))
    return x.copy(), w.copy()


def uniform_rule(n_nodes: int):
    """Nodes and weights for E[g(U)], U uniform on [-1, 1]; weights sum to 1."""
    x, w = _legendre_rule(int(n_nodes))
    return x.copy(), w.copy()
