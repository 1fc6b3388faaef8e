#! /usr/bin/env python
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Distributed under terms of the GPL license.

"""Test fixtures for rbs-ppr."""

import os
import sys

import numpy as np
import pytest

# bring in top level library to path
test_path = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, test_path + "/../../")

from rbsppr.graph import from_edges, generate_graph  # noqa: E402


def pytest_configure(config):
    """Pytest configuration."""
    config.addinivalue_line("markers", "slow: mark test as slow (acceptance scale)")


def edges(pairs, n=None):
    """Build a Graph from a list of (u, v) pairs over dense ids."""
    src = np.array([u for u, _ in pairs], dtype=np.int64)
    dst = np.array([v for _, v in pairs], dtype=np.int64)
    if n is None:
        n = int(max(src.max(), dst.max())) + 1
    return from_edges(src, dst, n)


@pytest.fixture
def two_cycle():
    """0 <-> 1."""
    return edges([(0, 1), (1, 0)])


@pytest.fixture
def three_cycle():
    """0 -> 1 -> 2 -> 0."""
    return edges([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def star_in():
    """Leaves 1..4 point at the dangling hub 0."""
    return generate_graph("star_in", 5)


@pytest.fixture
def small_er():
    """Directed Erdos-Renyi graph on 30 nodes."""
    return generate_graph("erdos_renyi", 30, seed=3, p=0.15)


@pytest.fixture
def medium_er():
    """Directed Erdos-Renyi graph on 80 nodes."""
    return generate_graph("erdos_renyi", 80, seed=11, p=0.08)


@pytest.fixture
def complete_graph():
    """Complete directed graph on 50 nodes."""
    return generate_graph("complete", 50)


@pytest.fixture
def skewed_graph():
    """Power-law graph with a few high in-degree nodes."""
    return generate_graph("ba_powerlaw", 60, seed=5, k=2, undirected=True)


@pytest.fixture
def edge_list_file(tmp_path):
    """Small edge list with arbitrary ids, a comment and a blank line."""
    path = tmp_path / "graph.txt"
    path.write_text("# toy graph\n10 20\n20 30\n\n30 10\n30 20\n")
    return str(path)
