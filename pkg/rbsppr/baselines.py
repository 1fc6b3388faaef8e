#! /usr/bin/env python3
"""Prior methods: Backward Search, Forward Search and Monte-Carlo walks."""

import heapq
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import Callable, Optional, Tuple

import numpy as np
from attr import attrib, attrs

from rbsppr.graph import Graph
from rbsppr.scores import QueryStats, ScoreVector
from rbsppr.util import InvalidParameterError, check_alpha, make_rng

LOGGER = getLogger(__name__)

QUEUE_POLICIES = ("fifo", "max_first")


class _WorkQueue:
    """Nodes awaiting a push; a queued node is never queued twice."""

    def __init__(self, policy: str, priority: Callable[[int], float]):
        if policy not in QUEUE_POLICIES:
            raise InvalidParameterError(f"unknown queue policy {policy}")
        self.policy = policy
        self.priority = priority
        self.queued = set()
        self.fifo = deque()
        self.heap = []

    def __len__(self):
        return len(self.queued)

    def push(self, node: int) -> None:
        if node in self.queued:
            if self.policy == "max_first":
                # stale heap entries are skipped on pop
                heapq.heappush(self.heap, (-self.priority(node), node))
            return
        self.queued.add(node)
        if self.policy == "fifo":
            self.fifo.append(node)
        else:
            heapq.heappush(self.heap, (-self.priority(node), node))

    def pop(self) -> int:
        if self.policy == "fifo":
            node = self.fifo.popleft()
        else:
            while True:
                key, node = heapq.heappop(self.heap)
                if node in self.queued and -key == self.priority(node):
                    break
        self.queued.discard(node)
        return node


@attrs
class BsState:
    """Residues and reserves of a Backward Search run towards ``target``."""

    target = attrib(type=int)
    residues = attrib(factory=ScoreVector, type=ScoreVector)
    reserves = attrib(factory=ScoreVector, type=ScoreVector)
    stats = attrib(factory=QueryStats, type=QueryStats)


@attrs
class FsState:
    """Residues and reserves of a Forward Search run from ``source``."""

    source = attrib(type=int)
    residues = attrib(factory=ScoreVector, type=ScoreVector)
    reserves = attrib(factory=ScoreVector, type=ScoreVector)
    stats = attrib(factory=QueryStats, type=QueryStats)


def _check_eps(eps):
    if eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    return float(eps)


def backward_search(
    g: Graph,
    t: int,
    alpha: float = 0.2,
    eps: float = 1e-4,
    policy: str = "fifo",
    checkpoint: Optional[Callable[[BsState], None]] = None,
) -> Tuple[ScoreVector, ScoreVector, QueryStats]:
    """Deterministic reverse push until every residue is at most ``eps``.

    On return pi_b(s, t) <= pi(s, t) <= pi_b(s, t) + eps for every s.
    ``checkpoint`` is called with the live state after every push.
    """
    alpha = check_alpha(alpha)
    eps = _check_eps(eps)
    t = g.check_node(t)
    if eps >= 1.0:
        LOGGER.warning("eps=%s >= 1, backward search performs no push", eps)

    state = BsState(target=t)
    residues, reserves, stats = state.residues, state.reserves, state.stats
    residues[t] = 1.0
    queue = _WorkQueue(policy, residues.__getitem__)
    if residues[t] > eps:
        queue.push(t)

    with stats.timed():
        while len(queue):
            v = queue.pop()
            mass = residues.pop(v, 0.0)
            reserves.add(v, alpha * mass)
            neighbours, degrees = g.in_entries(v)
            stats.push_count += 1
            stats.edge_touches += len(neighbours)
            stats.increments += len(neighbours)
            for u, degree in zip(neighbours.tolist(), degrees.tolist()):
                residues.add(u, (1.0 - alpha) * mass / degree)
                if residues[u] > eps:
                    queue.push(u)
            if checkpoint is not None:
                checkpoint(state)

    LOGGER.debug(
        "backward search t=%d eps=%g: %d pushes, %d edge touches",
        t,
        eps,
        stats.push_count,
        stats.edge_touches,
    )
    return reserves, residues, stats


def forward_search(
    g: Graph, s: int, alpha: float = 0.2, eps: float = 1e-4, policy: str = "fifo"
) -> Tuple[ScoreVector, ScoreVector, QueryStats]:
    """Forward push until every residue / out-degree ratio is at most ``eps``.

    A dangling node keeps its alpha share and the rest of its residue
    vanishes; its ratio is taken against a degree of one.
    """
    alpha = check_alpha(alpha)
    eps = _check_eps(eps)
    s = g.check_node(s)

    state = FsState(source=s)
    residues, reserves, stats = state.residues, state.reserves, state.stats
    residues[s] = 1.0
    degree = g.out_degree

    def ratio(u):
        return residues[u] / max(int(degree[u]), 1)

    queue = _WorkQueue(policy, ratio)
    if ratio(s) > eps:
        queue.push(s)

    with stats.timed():
        while len(queue):
            u = queue.pop()
            mass = residues.pop(u, 0.0)
            reserves.add(u, alpha * mass)
            stats.push_count += 1
            neighbours = g.out_neighbors(u)
            if not len(neighbours):
                continue
            share = (1.0 - alpha) * mass / len(neighbours)
            stats.edge_touches += len(neighbours)
            stats.increments += len(neighbours)
            for v in neighbours.tolist():
                residues.add(v, share)
                if ratio(v) > eps:
                    queue.push(v)
    return reserves, residues, stats


def _walk_batch(g: Graph, s: int, alpha: float, walks: int, rng) -> np.ndarray:
    """Run ``walks`` discounted walks in lock-step; return termination counts."""
    counts = np.zeros(g.n, dtype=np.int64)
    position = np.full(walks, s, dtype=np.int64)
    degree = g.out_degree
    while len(position):
        stop = rng.random(len(position)) < alpha
        counts += np.bincount(position[stop], minlength=g.n)
        position = position[~stop]
        position = position[degree[position] > 0]
        if not len(position):
            break
        offsets = (rng.random(len(position)) * degree[position]).astype(np.int64)
        position = g.out_indices[g.out_indptr[position] + offsets]
    return counts


def monte_carlo_single_source(
    g: Graph, s: int, alpha: float = 0.2, walks: int = 100000, seed: int = 0, workers: int = 1
) -> ScoreVector:
    """Fraction of discounted walks from ``s`` that terminate at each node.

    Walks are split across ``workers`` chunks; chunk i draws from the stream
    derived from (seed, i).
    """
    alpha = check_alpha(alpha)
    s = g.check_node(s)
    if walks < 1:
        raise InvalidParameterError(f"walks must be at least 1, got {walks}")
    workers = max(1, min(int(workers), walks))
    chunks = [walks // workers + (1 if i < walks % workers else 0) for i in range(workers)]

    def run(index):
        return _walk_batch(g, s, alpha, chunks[index], make_rng(seed, index))

    if workers == 1:
        counts = run(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = sum(pool.map(run, range(workers)))
    return ScoreVector.from_dense(counts / float(walks))
