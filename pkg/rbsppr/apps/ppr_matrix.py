#!/usr/bin/python3
"""Approximate PPR matrix assembled from per-node queries.

Target-side methods answer one single-target query per node and scatter the
results into inverted lists indexed by source; forward search answers one
single-source query per node and fills the lists directly.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import Dict, List, Optional, Tuple

import numpy as np
from attr import attrib, attrs

from rbsppr.baselines import backward_search, forward_search
from rbsppr.graph import Graph
from rbsppr.rbs import ADDITIVE, RbsConfig, rbs_boosted
from rbsppr.scores import QueryStats, ScoreVector
from rbsppr.util import InvalidParameterError, atomic_write, derive_seed, format_float

LOGGER = getLogger(__name__)

MATRIX_METHODS = ("rbs_additive", "backward_search", "forward_search")


@attrs
class PprMatrix:
    """Inverted lists: source -> [(target, estimate)] sorted by estimate descending."""

    n = attrib(type=int)
    eps = attrib(type=float)
    method = attrib(type=str)
    rows = attrib(factory=dict, type=Dict[int, List[Tuple[int, float]]])
    stats = attrib(factory=QueryStats, type=QueryStats)

    def row(self, s: int) -> ScoreVector:
        """Row s as a score vector."""
        return ScoreVector(dict(self.rows.get(s, [])))

    def entry(self, s: int, t: int) -> float:
        """Estimate of pi(s, t), zero when dropped."""
        return self.row(s)[t]

    def to_dense(self) -> np.ndarray:
        """Materialise as an n x n array."""
        dense = np.zeros((self.n, self.n), dtype=np.float64)
        for s, entries in self.rows.items():
            for t, value in entries:
                dense[s, t] = value
        return dense

    def triples(self):
        """Yield (s, t, value) sorted by source then target."""
        for s in sorted(self.rows):
            for t, value in sorted(self.rows[s]):
                yield s, t, value

    def write_csv(self, path: str) -> None:
        """Persist as sorted 's,t,value' rows."""
        with atomic_write(path) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["s", "t", "value"])
            for s, t, value in self.triples():
                writer.writerow([s, t, format_float(value)])

    def save(self, path: str) -> None:
        """Binary cache of the triples."""
        triples = list(self.triples())
        with atomic_write(path, mode="wb") as handle:
            np.savez(
                handle,
                header=np.array([self.n, len(triples)], dtype=np.int64),
                eps=np.array([self.eps]),
                method=np.array([MATRIX_METHODS.index(self.method)], dtype=np.int64),
                sources=np.array([s for s, _, _ in triples], dtype=np.int64),
                targets=np.array([t for _, t, _ in triples], dtype=np.int64),
                values=np.array([v for _, _, v in triples], dtype=np.float64),
            )

    @classmethod
    def load(cls, path: str) -> "PprMatrix":
        """Read a binary cache written by :meth:`save`."""
        with np.load(path, allow_pickle=False) as data:
            matrix = cls(
                n=int(data["header"][0]),
                eps=float(data["eps"][0]),
                method=MATRIX_METHODS[int(data["method"][0])],
            )
            staged = {}
            for s, t, value in zip(
                data["sources"].tolist(), data["targets"].tolist(), data["values"].tolist()
            ):
                staged.setdefault(s, []).append((t, value))
        matrix.rows = {s: _ranked(entries) for s, entries in staged.items()}
        return matrix


def _ranked(entries):
    return sorted(entries, key=lambda item: (-item[1], item[0]))


def build_ppr_matrix(
    g: Graph,
    method: str,
    eps: float,
    workers: int = 1,
    alpha: float = 0.2,
    seed: int = 0,
    boost: int = 1,
    drop_threshold: Optional[float] = None,
) -> PprMatrix:
    """Approximate every pi(s, t) with one query per node.

    Entries below ``drop_threshold`` (default ``eps``) are omitted. Queries run
    on ``workers`` threads; results are merged in node id order so the
    matrix does not depend on scheduling.
    """
    if method not in MATRIX_METHODS:
        raise InvalidParameterError(f"unknown matrix method {method}")
    if eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    drop = eps if drop_threshold is None else drop_threshold

    def query(node):
        if method == "forward_search":
            reserves, _, stats = forward_search(g, node, alpha, eps)
        elif method == "backward_search":
            reserves, _, stats = backward_search(g, node, alpha, eps)
        else:
            cfg = RbsConfig(
                alpha=alpha, mode=ADDITIVE, theta=eps, seed=derive_seed(seed, node), boost=boost
            )
            _, reserves, stats = rbs_boosted(g, node, cfg)
        return node, reserves, stats

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(query, range(g.n)))
    else:
        results = [query(node) for node in range(g.n)]

    matrix = PprMatrix(n=g.n, eps=eps, method=method)
    staged = {}
    for node, reserves, stats in sorted(results, key=lambda item: item[0]):
        matrix.stats.merge(stats)
        for other, value in reserves.rows():
            if value < drop:
                continue
            if method == "forward_search":
                staged.setdefault(node, []).append((other, value))
            else:
                staged.setdefault(other, []).append((node, value))
    matrix.rows = {s: _ranked(entries) for s, entries in staged.items()}
    LOGGER.info(
        "Built %s PPR matrix: %d entries, %d edge touches",
        method,
        sum(len(entries) for entries in matrix.rows.values()),
        matrix.stats.edge_touches,
    )
    return matrix
