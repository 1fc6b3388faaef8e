#! /usr/bin/env python3
"""Ground-truth oracles based on power iteration.

The transition matrix is the row-normalised adjacency matrix; rows of dangling
nodes are empty, so mass reaching them without terminating vanishes.
"""

from functools import lru_cache
from logging import getLogger
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from rbsppr.cache import GroundTruthCache
from rbsppr.graph import Graph
from rbsppr.scores import SOURCE_VIEW, TARGET_VIEW, DenseVector
from rbsppr.util import InvalidParameterError, check_alpha, ground_truth_iterations

LOGGER = getLogger(__name__)


def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Sparse P with P[u, v] = multiplicity(u, v) / d_out(u)."""
    return _transition_matrix(g)


@lru_cache(maxsize=8)
def _transition_matrix(g: Graph) -> sp.csr_matrix:
    degree = g.out_degree.astype(np.float64)
    inverse = np.divide(1.0, degree, out=np.zeros_like(degree), where=degree > 0)
    weights = np.repeat(inverse, g.out_degree)
    # csr_matrix sums duplicate column entries, which is what multiplicities need
    return sp.csr_matrix((weights, g.out_indices, g.out_indptr), shape=(g.n, g.n))


def _check_iters(iters):
    if iters < 1:
        raise InvalidParameterError(f"iters must be at least 1, got {iters}")
    return int(iters)


def _iterate(operator, seed_node, n, alpha, iters):
    restart = np.zeros(n, dtype=np.float64)
    restart[seed_node] = alpha
    values = np.zeros(n, dtype=np.float64)
    for _ in range(iters):
        values = (1.0 - alpha) * (operator @ values) + restart
    return values


def power_single_source(
    g: Graph,
    s: int,
    alpha: float = 0.2,
    iters: Optional[int] = None,
    cache: Optional[GroundTruthCache] = None,
) -> DenseVector:
    """Approximate pi(s, .) with ``iters`` power iterations from zero.

    Every entry is within (1 - alpha) ** iters of the true value.
    """
    alpha = check_alpha(alpha)
    s = g.check_node(s)
    iters = _check_iters(ground_truth_iterations(alpha) if iters is None else iters)
    values = cache.fetch(g, SOURCE_VIEW, s, alpha, iters) if cache else None
    if values is None:
        values = _iterate(transition_matrix(g).T.tocsr(), s, g.n, alpha, iters)
        if cache:
            cache.store(g, SOURCE_VIEW, s, alpha, iters, values)
    return DenseVector(values=values, view=SOURCE_VIEW, node=s)


def power_single_target(
    g: Graph,
    t: int,
    alpha: float = 0.2,
    iters: Optional[int] = None,
    cache: Optional[GroundTruthCache] = None,
) -> DenseVector:
    """Approximate pi(., t) with the transposed iteration."""
    alpha = check_alpha(alpha)
    t = g.check_node(t)
    iters = _check_iters(ground_truth_iterations(alpha) if iters is None else iters)
    values = cache.fetch(g, TARGET_VIEW, t, alpha, iters) if cache else None
    if values is None:
        values = _iterate(transition_matrix(g), t, g.n, alpha, iters)
        if cache:
            cache.store(g, TARGET_VIEW, t, alpha, iters, values)
    return DenseVector(values=values, view=TARGET_VIEW, node=t)


def hop_ppr_single_target(g: Graph, t: int, alpha: float, L: int) -> List[DenseVector]:
    """Exact l-hop vectors pi_l(., t) for l = 0..L."""
    alpha = check_alpha(alpha)
    t = g.check_node(t)
    if L < 0:
        raise InvalidParameterError(f"L must be non-negative, got {L}")
    operator = transition_matrix(g)
    current = np.zeros(g.n, dtype=np.float64)
    current[t] = alpha
    hops = [DenseVector(values=current, view=TARGET_VIEW, node=t)]
    for _ in range(L):
        current = (1.0 - alpha) * (operator @ current)
        hops.append(DenseVector(values=current, view=TARGET_VIEW, node=t))
    return hops


def pagerank_mass(
    g: Graph, t: int, alpha: float = 0.2, iters: Optional[int] = None, cache=None
) -> float:
    """n times the PageRank of t, i.e. the sum over s of pi(s, t)."""
    return power_single_target(g, t, alpha, iters, cache=cache).total()
