#! /usr/bin/env python3
"""Load, validate and preprocess directed graphs.

Every algorithm in this package consumes a :class:`Graph`: an immutable pair of
CSR adjacency structures where each in-list carries the out-degree of its
neighbours and is sorted ascending on it. The sort is a stable counting sort,
so two loads of the same edge list produce identical arrays.
"""

import hashlib
import io
from logging import getLogger
from typing import Iterable, Optional, TextIO, Tuple, Union

import numpy as np
from attr import attrib, attrs

from rbsppr.util import InvalidParameterError, PprError, make_rng

LOGGER = getLogger(__name__)

GRAPH_KINDS = ("complete", "cycle", "path", "star_in", "erdos_renyi", "ba_powerlaw")
ID_POLICIES = ("sorted", "appearance")


class GraphFormatError(PprError):
    """Represents a malformed line of an edge-list file."""

    def __init__(self, msg: str, line_number: int):
        """Keep the offending line number next to the message.

        :param msg: Message of the exception found.
        :type msg: str
        :param line_number: 1-based line number in the input.
        :type line_number: int
        """
        super().__init__(f"line {line_number}: {msg}")
        self.line_number = line_number


class EmptyGraphError(PprError):
    """Represents an input without a single edge."""

    pass


@attrs(frozen=True)
class GraphSource:
    """Where and how to read an edge list."""

    path = attrib(default=None)
    stream = attrib(default=None)
    directed = attrib(default=True, type=bool)
    comment = attrib(default="#", type=str)
    id_policy = attrib(default="sorted", type=str)

    def open(self) -> TextIO:
        """Return a text stream over the edge list."""
        if self.stream is not None:
            if isinstance(self.stream, (bytes, bytearray)):
                return io.StringIO(self.stream.decode())
            if isinstance(self.stream, str):
                return io.StringIO(self.stream)
            return self.stream
        if self.path is None:
            raise InvalidParameterError("a graph source needs a path or a stream")
        return open(self.path, "r", encoding="utf-8")


@attrs(frozen=True, eq=False)
class Graph:
    """Immutable directed graph in compressed adjacency form.

    ``in_keys[i]`` holds ``d_out(in_indices[i])`` so that in-lists can be
    scanned by out-degree without touching the out-structure.
    """

    n = attrib(type=int)
    m = attrib(type=int)
    out_indptr = attrib(type=np.ndarray)
    out_indices = attrib(type=np.ndarray)
    in_indptr = attrib(type=np.ndarray)
    in_indices = attrib(type=np.ndarray)
    in_keys = attrib(type=np.ndarray)
    labels = attrib(type=np.ndarray)
    directed = attrib(default=True, type=bool)
    in_sorted = attrib(default=False, type=bool)

    @property
    def out_degree(self) -> np.ndarray:
        """Out-degree of every node, multiplicities counted."""
        return np.diff(self.out_indptr)

    @property
    def in_degree(self) -> np.ndarray:
        """In-degree of every node, multiplicities counted."""
        return np.diff(self.in_indptr)

    def d_out(self, u: int) -> int:
        """Out-degree of ``u``."""
        return int(self.out_indptr[u + 1] - self.out_indptr[u])

    def d_in(self, v: int) -> int:
        """In-degree of ``v``."""
        return int(self.in_indptr[v + 1] - self.in_indptr[v])

    def out_neighbors(self, u: int) -> np.ndarray:
        """Out-neighbours of ``u`` in storage order."""
        return self.out_indices[self.out_indptr[u] : self.out_indptr[u + 1]]

    def in_entries(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        """In-neighbours of ``v`` and their out-degrees."""
        start, end = self.in_indptr[v], self.in_indptr[v + 1]
        return self.in_indices[start:end], self.in_keys[start:end]

    def edges(self) -> Iterable[Tuple[int, int]]:
        """Yield every directed edge (u, v) in out-list order."""
        for u in range(self.n):
            for v in self.out_neighbors(u).tolist():
                yield u, v

    def label_of(self, node: int) -> int:
        """Original id of a dense node id."""
        return int(self.labels[node])

    def node_of(self, label: int) -> int:
        """Dense id of an original id."""
        position = np.flatnonzero(self.labels == label)
        if not len(position):
            raise InvalidParameterError(f"node {label} is not in the graph")
        return int(position[0])

    def check_node(self, node: int) -> int:
        """Validate a dense node id."""
        if not 0 <= node < self.n:
            raise InvalidParameterError(f"node {node} outside 0..{self.n - 1}")
        return int(node)

    def same_as(self, other: "Graph") -> bool:
        """Structural equality over every stored array."""
        return (
            self.n == other.n
            and self.m == other.m
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in (
                    "out_indptr",
                    "out_indices",
                    "in_indptr",
                    "in_indices",
                    "in_keys",
                    "labels",
                )
            )
        )


def counting_sort_order(keys: np.ndarray, max_key: int) -> np.ndarray:
    """Return the stable permutation sorting ``keys`` (integers in 0..max_key)."""
    counts = np.bincount(keys, minlength=max_key + 1)
    cursor = (np.cumsum(counts) - counts).tolist()
    order = np.empty(len(keys), dtype=np.int64)
    for position, key in enumerate(keys.tolist()):
        order[cursor[key]] = position
        cursor[key] += 1
    return order


def sort_in_lists(g: Graph) -> Graph:
    """Sort every in-list ascending by the neighbour's out-degree.

    Two stable counting-sort passes (by key, then by owning node) keep the
    total work linear in n + m and preserve input order among equal keys.
    """
    if g.in_sorted:
        return g
    owners = np.repeat(np.arange(g.n, dtype=np.int64), g.in_degree)
    by_key = counting_sort_order(g.in_keys, max(g.n, int(g.in_keys.max(initial=0))))
    by_owner = by_key[counting_sort_order(owners[by_key], g.n)]
    return Graph(
        n=g.n,
        m=g.m,
        out_indptr=g.out_indptr,
        out_indices=g.out_indices,
        in_indptr=g.in_indptr,
        in_indices=g.in_indices[by_owner],
        in_keys=g.in_keys[by_owner],
        labels=g.labels,
        directed=g.directed,
        in_sorted=True,
    )


def from_edges(
    src: np.ndarray,
    dst: np.ndarray,
    n: int,
    labels: Optional[np.ndarray] = None,
    directed: bool = True,
    sort: bool = True,
) -> Graph:
    """Assemble a Graph from dense edge arrays, keeping duplicates and self-loops.

    Edgeless graphs are allowed here; only edge-list input insists on edges.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if labels is None:
        labels = np.arange(n, dtype=np.int64)

    out_counts = np.bincount(src, minlength=n)
    out_indptr = np.concatenate(([0], np.cumsum(out_counts))).astype(np.int64)
    out_indices = dst[counting_sort_order(src, n)]

    in_counts = np.bincount(dst, minlength=n)
    in_indptr = np.concatenate(([0], np.cumsum(in_counts))).astype(np.int64)
    in_indices = src[counting_sort_order(dst, n)]

    g = Graph(
        n=int(n),
        m=int(len(src)),
        out_indptr=out_indptr,
        out_indices=out_indices,
        in_indptr=in_indptr,
        in_indices=in_indices,
        in_keys=out_counts[in_indices].astype(np.int64),
        labels=np.asarray(labels, dtype=np.int64),
        directed=directed,
    )
    return sort_in_lists(g) if sort else g


def _parse_edges(handle: TextIO, comment: str):
    src, dst = [], []
    lines = enumerate(handle, start=1)
    line_number = 0
    while True:
        try:
            line_number, line = next(lines)
        except StopIteration:
            break
        except UnicodeDecodeError as error:
            raise GraphFormatError(
                f"input is not valid UTF-8 ({error.reason})", line_number + 1
            ) from None
        stripped = line.strip()
        if not stripped or (comment and stripped.startswith(comment)):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise GraphFormatError(f"expected 'u v', got {stripped!r}", line_number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(
                f"non-integer token in {stripped!r}", line_number
            ) from None
        src.append(u)
        dst.append(v)
    return src, dst


def load_graph(src: Union[GraphSource, str]) -> Graph:
    """Read an edge list into a degree-sorted Graph.

    Arbitrary ids are remapped to dense 0..n-1; the original ids stay in
    ``Graph.labels``. Undirected inputs contribute both (u, v) and (v, u).
    """
    if isinstance(src, str):
        src = GraphSource(path=src)
    if src.id_policy not in ID_POLICIES:
        raise InvalidParameterError(f"unknown id policy {src.id_policy}")

    handle = src.open()
    try:
        raw_src, raw_dst = _parse_edges(handle, src.comment)
    finally:
        if src.stream is None:
            handle.close()
    if not raw_src:
        raise EmptyGraphError(f"no edges found in {src.path or 'stream'}")

    ends = np.array(raw_src + raw_dst, dtype=np.int64)
    if src.id_policy == "sorted":
        labels, dense = np.unique(ends, return_inverse=True)
    else:
        _, first_seen, inverse = np.unique(ends, return_index=True, return_inverse=True)
        ranking = np.argsort(first_seen, kind="stable")
        labels = ends[first_seen[ranking]]
        rank_of = np.empty_like(ranking)
        rank_of[ranking] = np.arange(len(ranking))
        dense = rank_of[inverse]
    dense = dense.reshape(-1)
    m = len(raw_src)
    heads, tails = dense[:m], dense[m:]
    if not src.directed:
        heads, tails = np.concatenate((heads, tails)), np.concatenate((tails, heads))
    g = from_edges(heads, tails, len(labels), labels=labels, directed=src.directed)
    LOGGER.debug("Loaded graph with n=%d m=%d directed=%s", g.n, g.m, g.directed)
    return g


def write_edge_list(g: Graph, handle: TextIO) -> None:
    """Serialise every directed edge as 'u v' using the original ids."""
    for u, v in g.edges():
        handle.write("{} {}\n".format(g.label_of(u), g.label_of(v)))


def graph_digest(g: Graph) -> str:
    """Content hash of the adjacency structure, stable across processes."""
    digest = hashlib.sha256()
    for array in (g.out_indptr, g.out_indices, g.labels):
        digest.update(np.ascontiguousarray(array, dtype=np.int64).tobytes())
    return digest.hexdigest()


def _validate_kind(kind, n, p, k):
    if kind not in GRAPH_KINDS:
        raise InvalidParameterError(f"unknown graph kind {kind}")
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    if kind == "erdos_renyi" and (p is None or not 0.0 <= p <= 1.0):
        raise InvalidParameterError(f"erdos_renyi needs p in [0, 1], got {p}")
    if kind == "ba_powerlaw" and (k is None or not 1 <= k < max(n, 2)):
        raise InvalidParameterError(f"ba_powerlaw needs 1 <= k < n, got {k}")


def generate_graph(
    kind: str,
    n: int,
    seed: int = 0,
    p: Optional[float] = None,
    k: Optional[int] = None,
    undirected: bool = False,
) -> Graph:
    """Build a synthetic desk-scale graph, deterministic for fixed arguments.

    ``star_in`` points every leaf at hub 0 and leaves the hub dangling.
    ``ba_powerlaw`` attaches each new node to ``k`` distinct earlier nodes
    picked proportionally to degree + 1.
    """
    _validate_kind(kind, n, p, k)
    rng = make_rng(seed, GRAPH_KINDS.index(kind), n)
    nodes = np.arange(n, dtype=np.int64)

    if kind == "complete":
        src, dst = np.meshgrid(nodes, nodes, indexing="ij")
        keep = src != dst
        src, dst = src[keep], dst[keep]
    elif kind == "cycle":
        src, dst = nodes, (nodes + 1) % n
    elif kind == "path":
        src, dst = nodes[:-1], nodes[1:]
    elif kind == "star_in":
        src, dst = nodes[1:], np.zeros(n - 1, dtype=np.int64)
    elif kind == "erdos_renyi":
        mask = rng.random((n, n)) < p
        np.fill_diagonal(mask, False)
        src, dst = np.nonzero(mask)
    else:
        src_list, dst_list = [], []
        weight = np.ones(n, dtype=np.float64)
        for new in range(k, n):
            chosen = rng.choice(new, size=k, replace=False, p=weight[:new] / weight[:new].sum())
            for old in sorted(chosen.tolist()):
                src_list.append(new)
                dst_list.append(old)
                weight[old] += 1.0
            weight[new] += k
        src, dst = np.array(src_list, dtype=np.int64), np.array(dst_list, dtype=np.int64)

    if undirected:
        src, dst = np.concatenate((src, dst)), np.concatenate((dst, src))
    return from_edges(src, dst, n, directed=not undirected)
