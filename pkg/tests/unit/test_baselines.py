#!/usr/bin/python3
"""Tests for baselines.py module."""
import numpy as np
import pytest

from rbsppr import baselines
from rbsppr.exact import power_single_source, power_single_target
from rbsppr.graph import generate_graph
from rbsppr.harness import TargetSampler, cost_slope
from rbsppr.metrics import max_additive_err
from rbsppr.util import InvalidParameterError

ALPHA = 0.2


def test_bs_target_without_in_edges(star_in):
    """A single push with nothing to propagate."""
    reserves, residues, stats = baselines.backward_search(star_in, 2, ALPHA, 0.5)
    assert dict(reserves) == {2: ALPHA}
    assert residues.total() == 0.0
    assert stats.push_count == 1
    assert stats.edge_touches == 0


def test_bs_eps_at_least_one(three_cycle):
    """No residue exceeds eps >= 1, so nothing is pushed."""
    reserves, residues, stats = baselines.backward_search(three_cycle, 0, ALPHA, 1.0)
    assert reserves.total() == 0.0
    assert dict(residues) == {0: 1.0}
    assert stats.push_count == 0


def test_bs_two_cycle(two_cycle):
    """Reserves approach the closed form from below."""
    reserves, _, _ = baselines.backward_search(two_cycle, 1, ALPHA, 1e-6)
    assert 4.0 / 9.0 - 1e-6 <= reserves[0] <= 4.0 / 9.0 + 1e-12


@pytest.mark.parametrize("policy", baselines.QUEUE_POLICIES)
def test_bs_error_bound(policy):
    """pi - pi_b lies in [0, eps] for every node under either queue policy."""
    g = generate_graph("erdos_renyi", 50, seed=9, p=0.1)
    eps = 1e-3
    for t in (0, 13, 31):
        reserves, residues, _ = baselines.backward_search(g, t, ALPHA, eps, policy=policy)
        truth = power_single_target(g, t, ALPHA).values
        gap = truth - reserves.to_dense(g.n)
        assert gap.min() >= -1e-7
        assert gap.max() <= eps + 1e-7
        assert max(residues.values(), default=0.0) <= eps


def test_bs_invariant_at_every_push(small_er):
    """pi(s, t) = pi_b(s, t) + sum_u r(u, t) pi(s, u) after each push."""
    t = 6
    sources = np.array(
        [power_single_source(small_er, s, ALPHA, 400).values for s in range(small_er.n)]
    )
    truth = sources[:, t]
    worst = []

    def checkpoint(state):
        reserves = state.reserves.to_dense(small_er.n)
        residues = state.residues.to_dense(small_er.n)
        worst.append(np.abs(truth - reserves - sources @ residues).max())

    baselines.backward_search(small_er, t, ALPHA, 1e-3, checkpoint=checkpoint)
    assert worst
    assert max(worst) <= 1e-12


def test_bs_edge_touches_count_in_degrees(three_cycle):
    """Each push of v charges d_in(v)."""
    _, _, stats = baselines.backward_search(three_cycle, 0, ALPHA, 0.1)
    assert stats.edge_touches == stats.push_count
    assert stats.increments == stats.edge_touches


@pytest.mark.parametrize("eps", [1e-2, 1e-3, 1e-4])
def test_bs_cost_bound(eps):
    """Touches stay below sum_v d_in(v) pi(v, t) / (alpha eps)."""
    g = generate_graph("erdos_renyi", 200, seed=2, p=0.05)
    for t in (1, 50, 120):
        _, _, stats = baselines.backward_search(g, t, ALPHA, eps)
        truth = power_single_target(g, t, ALPHA).values
        assert stats.edge_touches <= np.dot(g.in_degree, truth) / (ALPHA * eps)


def test_bs_cost_grows_with_precision(skewed_graph):
    """Smaller eps never costs less."""
    sweep = [1e-1, 1e-2, 1e-3, 1e-4]
    touches = [
        baselines.backward_search(skewed_graph, 3, ALPHA, eps)[2].edge_touches for eps in sweep
    ]
    assert touches == sorted(touches)


def test_bs_invalid_eps(three_cycle):
    """eps must be positive."""
    with pytest.raises(InvalidParameterError):
        baselines.backward_search(three_cycle, 0, ALPHA, 0.0)


def test_unknown_queue_policy(three_cycle):
    """Only fifo and max_first exist."""
    with pytest.raises(InvalidParameterError):
        baselines.backward_search(three_cycle, 0, ALPHA, 0.1, policy="lifo")


def test_max_first_pops_largest():
    """The max-first queue skips stale entries and pops by priority."""
    weights = {1: 0.1, 2: 0.5, 3: 0.3}
    queue = baselines._WorkQueue("max_first", weights.__getitem__)
    for node in (1, 2, 3):
        queue.push(node)
    weights[1] = 0.9
    queue.push(1)
    assert len(queue) == 3
    assert [queue.pop() for _ in range(3)] == [1, 2, 3]


def test_fs_dangling_source(star_in):
    """All mass is absorbed or vanishes at a dangling source."""
    reserves, residues, stats = baselines.forward_search(star_in, 0, ALPHA, 0.1)
    assert dict(reserves) == {0: ALPHA}
    assert residues.total() == 0.0
    assert stats.edge_touches == 0


def test_fs_two_cycle(two_cycle):
    """Forward reserves match the closed form within eps."""
    reserves, _, _ = baselines.forward_search(two_cycle, 0, ALPHA, 1e-6)
    assert reserves[1] == pytest.approx(4.0 / 9.0, abs=1e-6)


def test_fs_undirected_path_bound():
    """On undirected graphs the error is at most eps * d_out(u)."""
    g = generate_graph("path", 10, undirected=True)
    eps = 1e-3
    reserves, residues, _ = baselines.forward_search(g, 0, ALPHA, eps)
    truth = power_single_source(g, 0, ALPHA).values
    error = np.abs(truth - reserves.to_dense(g.n))
    assert (error / g.out_degree).max() <= eps + 1e-7
    assert all(value / g.d_out(u) <= eps for u, value in residues.items())


def test_mc_single_walk_is_one_hot(small_er):
    """One walk terminates at exactly one node."""
    estimate = baselines.monte_carlo_single_source(small_er, 0, ALPHA, walks=1, seed=4)
    assert len(estimate) <= 1
    assert estimate.total() in (0.0, 1.0)


def test_mc_deterministic(small_er):
    """Fixed seed and worker count reproduce the estimate."""
    first = baselines.monte_carlo_single_source(small_er, 1, ALPHA, 2000, seed=8, workers=2)
    again = baselines.monte_carlo_single_source(small_er, 1, ALPHA, 2000, seed=8, workers=2)
    assert first == again


def test_mc_two_cycle(two_cycle):
    """Walk fractions concentrate at the closed form."""
    estimate = baselines.monte_carlo_single_source(two_cycle, 0, ALPHA, 200000, seed=1)
    assert estimate[1] == pytest.approx(4.0 / 9.0, abs=0.005)
    assert estimate.total() == pytest.approx(1.0)


def test_mc_dangling_mass_vanishes(star_in):
    """Walks reaching the hub terminate there with probability alpha."""
    estimate = baselines.monte_carlo_single_source(star_in, 1, ALPHA, 100000, seed=3)
    assert estimate[0] == pytest.approx(0.16, abs=0.006)
    assert estimate[1] == pytest.approx(0.2, abs=0.006)
    assert estimate.total() == pytest.approx(0.36, abs=0.01)


def test_mc_unbiased():
    """The mean over seeds sits within 3 standard errors of the oracle."""
    g = generate_graph("erdos_renyi", 20, seed=6, p=0.2)
    truth = power_single_source(g, 0, ALPHA).values
    walks, seeds = 200, 300
    samples = np.array(
        [
            baselines.monte_carlo_single_source(g, 0, ALPHA, walks, seed=seed).to_dense(g.n)
            for seed in range(seeds)
        ]
    )
    t = int(np.argmax(truth[1:])) + 1
    standard_error = np.sqrt(truth[t] * (1 - truth[t]) / walks / seeds)
    assert abs(samples[:, t].mean() - truth[t]) <= 3 * standard_error
    assert samples[:, t].var(ddof=1) <= truth[t] / walks * 1.3


def test_mc_invalid_walks(three_cycle):
    """At least one walk is needed."""
    with pytest.raises(InvalidParameterError):
        baselines.monte_carlo_single_source(three_cycle, 0, ALPHA, walks=0)


@pytest.mark.slow
def test_bs_guarantee_on_sampled_targets():
    """Every degree-weighted target stays within eps, invariant intact along the way."""
    g = generate_graph("erdos_renyi", 200, seed=2, p=0.05)
    sources = np.array([power_single_source(g, s, ALPHA, 400).values for s in range(g.n)])
    for t in TargetSampler(count=20, seed=1).sample(g):
        truth = sources[:, t]
        for eps in (1e-1, 1e-2, 1e-3, 1e-4):
            pushes, worst = [0], []

            def checkpoint(state):
                pushes[0] += 1
                # powers of two spread the checks over the run
                if pushes[0] & (pushes[0] - 1) == 0:
                    reserves = state.reserves.to_dense(g.n)
                    residues = state.residues.to_dense(g.n)
                    worst.append(np.abs(truth - reserves - sources @ residues).max())

            reserves, _, _ = baselines.backward_search(g, t, ALPHA, eps, checkpoint=checkpoint)
            assert max_additive_err(truth, reserves) <= eps
            assert worst
            assert max(worst) <= 1e-12


@pytest.mark.slow
def test_bs_cost_slope_in_eps():
    """Mean touches over low-degree targets grow like 1 / eps."""
    g = generate_graph("ba_powerlaw", 10000, seed=1, k=3, undirected=True)
    sweep = [3e-2, 1e-2, 3e-3, 1e-3, 3e-4]
    targets = range(9990, 10000)
    touches = [
        np.mean([baselines.backward_search(g, t, ALPHA, eps)[2].edge_touches for t in targets])
        for eps in sweep
    ]
    assert cost_slope(sweep, touches) == pytest.approx(1.0, abs=0.15)
