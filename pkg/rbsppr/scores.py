#! /usr/bin/env python3
"""Value types shared by every query: score vectors, hop tables and counters."""

import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Tuple

import attr
import numpy as np
from attr import attrib, attrs

SOURCE_VIEW = "source"
TARGET_VIEW = "target"


class ScoreVector(dict):
    """Sparse node -> score map; absent nodes read as zero.

    Holds estimates, residues or reserves alike.
    """

    def __missing__(self, node):
        """Absent entries are zero and are not stored."""
        return 0.0

    def add(self, node: int, value: float) -> None:
        """Accumulate ``value`` on ``node``."""
        self[node] = self.get(node, 0.0) + value

    def total(self) -> float:
        """Sum of all stored entries."""
        return float(sum(self.values()))

    def support(self) -> set:
        """Nodes holding a strictly positive value."""
        return {node for node, value in self.items() if value > 0.0}

    def to_dense(self, n: int) -> np.ndarray:
        """Materialise as a length-n numpy array."""
        dense = np.zeros(n, dtype=np.float64)
        for node, value in self.items():
            dense[node] = value
        return dense

    def ranked(self) -> List[Tuple[int, float]]:
        """Entries by value descending, ties by node id ascending."""
        return sorted(self.items(), key=lambda item: (-item[1], item[0]))

    def rows(self) -> Iterator[Tuple[int, float]]:
        """Entries ordered by node id."""
        return iter(sorted(self.items()))

    @classmethod
    def from_dense(cls, values: np.ndarray) -> "ScoreVector":
        """Keep the non-zero entries of a dense array."""
        return cls({int(node): float(values[node]) for node in np.flatnonzero(values)})


@attrs(frozen=True)
class DenseVector:
    """Length-n PPR vector, either pi(s, .) or pi(., t)."""

    values = attrib(type=np.ndarray)
    view = attrib(type=str, validator=attr.validators.in_([SOURCE_VIEW, TARGET_VIEW]))
    node = attrib(type=int)

    def __len__(self):
        """Number of nodes covered."""
        return len(self.values)

    def __getitem__(self, node):
        """Value at ``node``."""
        return float(self.values[node])

    def total(self) -> float:
        """Sum of all entries."""
        return float(self.values.sum())


@attrs
class HopTable:
    """Per-level sparse estimates, entry l holds the l-hop scores towards a target."""

    target = attrib(type=int)
    levels = attrib(factory=list, type=List[ScoreVector])

    @property
    def depth(self) -> int:
        """Largest stored hop index."""
        return len(self.levels) - 1

    def collapse(self) -> ScoreVector:
        """Sum the hop levels into one estimate per node."""
        estimate = ScoreVector()
        for level in self.levels:
            for node, value in level.items():
                estimate.add(node, value)
        return estimate

    def rows(self) -> Iterator[Tuple[int, int, float]]:
        """Yield (ell, node, value) sorted by hop then node."""
        for ell, level in enumerate(self.levels):
            for node, value in level.rows():
                yield ell, node, value

    def to_dense(self, n: int) -> np.ndarray:
        """Materialise as a (depth + 1, n) array."""
        dense = np.zeros((len(self.levels), n), dtype=np.float64)
        for ell, level in enumerate(self.levels):
            for node, value in level.items():
                dense[ell, node] = value
        return dense


@attrs
class QueryStats:
    """Operation counters of one query or build.

    ``edge_touches`` charges every in-entry examined, ``increments`` only those
    that received mass.
    """

    push_count = attrib(default=0, type=int)
    edge_touches = attrib(default=0, type=int)
    increments = attrib(default=0, type=int)
    wall_time = attrib(default=0.0, type=float)

    def merge(self, other: "QueryStats") -> "QueryStats":
        """Add another run's counters to this one."""
        self.push_count += other.push_count
        self.edge_touches += other.edge_touches
        self.increments += other.increments
        self.wall_time += other.wall_time
        return self

    def counters(self) -> Dict[str, int]:
        """Machine independent counters, safe to persist."""
        return {
            "push_count": self.push_count,
            "edge_touches": self.edge_touches,
            "increments": self.increments,
        }

    @contextmanager
    def timed(self):
        """Accumulate the wall time of the enclosed block."""
        start = time.perf_counter()
        try:
            yield self
        finally:
            self.wall_time += time.perf_counter() - start
