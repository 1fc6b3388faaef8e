#! /usr/bin/env python3
"""On-disk caches for preprocessed graphs and ground-truth vectors.

Graph cache layout: a fixed header (magic, format version, n, m, directedness)
followed by the numpy arrays of the Graph in a fixed order. Every write goes
through a temporary file renamed into place.
"""

import os
import struct
from logging import getLogger

import numpy as np

from rbsppr.graph import Graph, graph_digest
from rbsppr.util import PprError, atomic_write

LOGGER = getLogger(__name__)

MAGIC = b"RBSPPRG\x00"
VERSION = 1
HEADER = struct.Struct("<8sHqq?")
ARRAYS = ("out_indptr", "out_indices", "in_indptr", "in_indices", "in_keys", "labels")


class GraphCacheError(PprError):
    """Represents an unreadable or incompatible graph cache file."""

    pass


def save_graph(g: Graph, path: str) -> None:
    """Persist a preprocessed graph."""
    with atomic_write(path, mode="wb") as handle:
        handle.write(HEADER.pack(MAGIC, VERSION, g.n, g.m, g.directed))
        for name in ARRAYS:
            np.save(handle, getattr(g, name), allow_pickle=False)
    LOGGER.debug("Cached graph n=%d m=%d at %s", g.n, g.m, path)


def load_cached_graph(path: str) -> Graph:
    """Read a graph written by :func:`save_graph`."""
    with open(path, "rb") as handle:
        raw = handle.read(HEADER.size)
        if len(raw) != HEADER.size:
            raise GraphCacheError(f"{path} is truncated")
        magic, version, n, m, directed = HEADER.unpack(raw)
        if magic != MAGIC:
            raise GraphCacheError(f"{path} is not a graph cache")
        if version != VERSION:
            raise GraphCacheError(
                f"{path} has format version {version}, expected {VERSION}"
            )
        arrays = {name: np.load(handle, allow_pickle=False) for name in ARRAYS}
    if arrays["out_indices"].shape[0] != m or arrays["out_indptr"].shape[0] != n + 1:
        raise GraphCacheError(f"{path} header does not match its arrays")
    return Graph(n=n, m=m, directed=bool(directed), in_sorted=True, **arrays)


class GroundTruthCache:
    """Directory of exact PPR vectors keyed by (graph, view, node, alpha, iters).

    A cache built with ``directory=None`` stores nothing and always misses.
    """

    def __init__(self, directory=None):
        """Remember the cache directory, creating it on first write."""
        self.directory = directory

    def key(self, g: Graph, view: str, node: int, alpha: float, iters: int) -> str:
        """File name for one cached vector."""
        return "{}-{}-{}-{}-{}.npy".format(
            graph_digest(g)[:16], view, node, repr(float(alpha)), iters
        )

    def fetch(self, g, view, node, alpha, iters):
        """Return the cached array or None."""
        if not self.directory:
            return None
        path = os.path.join(self.directory, self.key(g, view, node, alpha, iters))
        if not os.path.isfile(path):
            return None
        return np.load(path, allow_pickle=False)

    def store(self, g, view, node, alpha, iters, values) -> None:
        """Persist one vector atomically."""
        if not self.directory:
            return
        path = os.path.join(self.directory, self.key(g, view, node, alpha, iters))
        with atomic_write(path, mode="wb") as handle:
            np.save(handle, values, allow_pickle=False)
