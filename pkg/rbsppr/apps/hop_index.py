#!/usr/bin/python3
"""Index of l-hop PPR values towards a designated set of targets.

Similarity measures that decompose over hop-wise PPR, such as SimRank, read
pi_l(v, w) for their chosen targets w from this index.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import Dict, Iterable

from attr import attrib, attrs, evolve

from rbsppr.graph import Graph
from rbsppr.rbs import RbsConfig, rbs_boosted
from rbsppr.scores import HopTable, QueryStats
from rbsppr.util import InvalidParameterError, atomic_write, derive_seed, format_float

LOGGER = getLogger(__name__)


@attrs
class HopIndex:
    """Per-target hop tables built with a fixed alpha."""

    alpha = attrib(type=float)
    tables = attrib(factory=dict, type=Dict[int, HopTable])
    stats = attrib(factory=QueryStats, type=QueryStats)

    def hop_value(self, v: int, w: int, ell: int) -> float:
        """Estimate of pi_ell(v, w); zero for unindexed targets or hops."""
        table = self.tables.get(w)
        if table is None or ell > table.depth:
            return 0.0
        return table.levels[ell][v]

    def mass(self, w: int) -> float:
        """Total stored mass over all hops for target w."""
        return sum(level.total() for level in self.tables[w].levels)

    def rows(self):
        """Yield (target, ell, node, value) sorted throughout."""
        for target in sorted(self.tables):
            for ell, node, value in self.tables[target].rows():
                yield target, ell, node, value

    def write_csv(self, path: str) -> None:
        """Persist as 'target,ell,node,value' rows."""
        with atomic_write(path) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["target", "ell", "node", "value"])
            for target, ell, node, value in self.rows():
                writer.writerow([target, ell, node, format_float(value)])


def build_hop_index(
    g: Graph, targets: Iterable[int], rbs_cfg: RbsConfig, workers: int = 1
) -> HopIndex:
    """Run one randomized backward search per target and keep its hop table.

    Target w draws from the stream derived from (rbs_cfg.seed, w).
    """
    targets = sorted({g.check_node(w) for w in targets})
    if not targets:
        raise InvalidParameterError("a hop index needs at least one target")

    def query(w):
        cfg = evolve(rbs_cfg, seed=derive_seed(rbs_cfg.seed, w))
        table, _, stats = rbs_boosted(g, w, cfg)
        return w, table, stats

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(query, targets))
    else:
        results = [query(w) for w in targets]

    index = HopIndex(alpha=rbs_cfg.alpha)
    for w, table, stats in results:
        index.tables[w] = table
        index.stats.merge(stats)
    LOGGER.info(
        "Built hop index over %d targets, %d edge touches",
        len(targets),
        index.stats.edge_touches,
    )
    return index
