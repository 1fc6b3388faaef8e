#!/usr/bin/python3
"""Tests for cache.py module."""
import numpy as np
import pytest

from rbsppr import cache
from rbsppr.exact import power_single_target


def test_graph_cache_round_trip(tmp_path, skewed_graph):
    """A cached graph reloads with identical arrays."""
    path = str(tmp_path / "g.bin")
    cache.save_graph(skewed_graph, path)
    again = cache.load_cached_graph(path)
    assert again.same_as(skewed_graph)
    assert again.in_sorted
    assert again.directed == skewed_graph.directed


def test_graph_cache_bad_magic(tmp_path):
    """Foreign files are rejected."""
    path = tmp_path / "g.bin"
    path.write_bytes(b"NOTACACHE" * 8)
    with pytest.raises(cache.GraphCacheError):
        cache.load_cached_graph(str(path))


def test_graph_cache_truncated(tmp_path):
    """Files shorter than the header are rejected."""
    path = tmp_path / "g.bin"
    path.write_bytes(cache.MAGIC)
    with pytest.raises(cache.GraphCacheError, match="truncated"):
        cache.load_cached_graph(str(path))


def test_graph_cache_version_mismatch(tmp_path, three_cycle):
    """A different format version is rejected."""
    path = str(tmp_path / "g.bin")
    cache.save_graph(three_cycle, path)
    with open(path, "r+b") as handle:
        handle.write(cache.HEADER.pack(cache.MAGIC, cache.VERSION + 1, 3, 3, True))
    with pytest.raises(cache.GraphCacheError, match="version"):
        cache.load_cached_graph(path)


def test_ground_truth_cache_store_and_fetch(tmp_path, small_er):
    """Vectors are found again under the same key."""
    store = cache.GroundTruthCache(str(tmp_path / "truth"))
    assert store.fetch(small_er, "target", 3, 0.2, 10) is None
    values = np.linspace(0.0, 1.0, small_er.n)
    store.store(small_er, "target", 3, 0.2, 10, values)
    assert np.array_equal(store.fetch(small_er, "target", 3, 0.2, 10), values)
    assert store.fetch(small_er, "target", 3, 0.2, 11) is None
    assert store.fetch(small_er, "source", 3, 0.2, 10) is None


def test_ground_truth_cache_disabled(small_er):
    """Without a directory nothing is stored."""
    store = cache.GroundTruthCache()
    store.store(small_er, "target", 0, 0.2, 10, np.zeros(small_er.n))
    assert store.fetch(small_er, "target", 0, 0.2, 10) is None


def test_power_iteration_uses_cache(tmp_path, small_er, mocker):
    """A second oracle call reads the stored vector."""
    store = cache.GroundTruthCache(str(tmp_path))
    first = power_single_target(small_er, 2, cache=store)
    iterate = mocker.patch("rbsppr.exact._iterate")
    second = power_single_target(small_er, 2, cache=store)
    iterate.assert_not_called()
    assert np.array_equal(first.values, second.values)
