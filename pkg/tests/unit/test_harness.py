#!/usr/bin/python3
"""Tests for harness.py module."""
import json

import numpy as np
import pytest

from rbsppr import harness
from rbsppr.baselines import backward_search
from rbsppr.exact import power_single_target
from rbsppr.graph import generate_graph
from rbsppr.rbs import ADDITIVE, RbsConfig, rbs_single_target
from rbsppr.util import InvalidParameterError

ALPHA = 0.2


def test_sampler_deterministic(medium_er):
    """Equal seeds draw equal targets, with replacement."""
    sampler = harness.TargetSampler(count=50, seed=3)
    assert sampler.sample(medium_er) == sampler.sample(medium_er)
    assert len(sampler.sample(medium_er)) == 50
    assert harness.TargetSampler(kind="uniform", count=5).sample(medium_er) != sampler.sample(
        medium_er
    )[:5]


def test_sampler_degree_weighting(star_in):
    """The hub carries half of the total degree of a star."""
    nodes = harness.TargetSampler(count=2000, seed=1).sample(star_in)
    assert nodes.count(0) / 2000.0 == pytest.approx(0.5, abs=0.05)


def test_sampler_metadata():
    """Sampling assumptions are recorded."""
    metadata = harness.TargetSampler(kind="degree_weighted", count=7).metadata()
    assert metadata["replacement"] is True
    assert metadata["degree"] == "in+out"
    assert metadata["count"] == 7


def test_sampler_unknown_kind(three_cycle):
    """Only the documented sampling schemes exist."""
    with pytest.raises(InvalidParameterError):
        harness.TargetSampler(kind="pagerank").sample(three_cycle)


def test_tradeoff_exact_method_has_zero_error(three_cycle):
    """Power iteration at a tiny tolerance reproduces the ground truth."""
    rows = harness.run_tradeoff(
        three_cycle, "power", [1e-9], harness.TargetSampler(count=1)
    )
    assert len(rows) == 1
    assert rows[0].metric_name == "max_additive_err"
    assert rows[0].metric_value <= 1e-7
    assert rows[0].edge_touches > 0


def test_tradeoff_bs_error_within_eps():
    """The BS error column never exceeds its eps."""
    g = generate_graph("erdos_renyi", 200, seed=2, p=0.05)
    sweep = [1e-1, 1e-2, 1e-3]
    rows = harness.run_tradeoff(g, "bs", sweep, harness.TargetSampler(count=5, seed=2))
    assert [row.param for row in rows] == sweep
    for row in rows:
        assert row.metric_value <= row.param


def test_tradeoff_relative_uses_precision(small_er):
    """Relative methods report Precision@k with k capped at n."""
    rows = harness.run_tradeoff(
        small_er, "rbs_relative", [1e-2], harness.TargetSampler(count=3), k=50
    )
    assert rows[0].metric_name == "precision_at_30"
    assert 0.0 <= rows[0].metric_value <= 1.0


def test_tradeoff_reproducible(tmp_path, small_er):
    """Identical seeds give byte-identical CSV files."""
    sampler = harness.TargetSampler(count=4, seed=9)
    paths = []
    for name in ("a.csv", "b.csv"):
        rows = harness.run_tradeoff(
            small_er, "rbs_additive", [1e-2, 1e-3], sampler, seed=4, workers=2
        )
        path = tmp_path / name
        harness.write_tradeoff_csv(rows, str(path), header={"seed": 4})
        paths.append(path)
    first, second = (path.read_bytes() for path in paths)
    assert first == second
    lines = first.decode().splitlines()
    assert lines[0] == '# config: {"seed": 4}'
    assert lines[1] == ",".join(harness.TRADEOFF_COLUMNS)
    assert lines[2].endswith(",")


def test_tradeoff_wall_time_opt_in(three_cycle):
    """wall_ms stays empty unless requested."""
    sampler = harness.TargetSampler(count=1)
    quiet = harness.run_tradeoff(three_cycle, "bs", [1e-2], sampler)[0]
    timed = harness.run_tradeoff(three_cycle, "bs", [1e-2], sampler, record_wall_time=True)[0]
    assert quiet.wall_ms is None
    assert quiet.as_list()[-1] == ""
    assert timed.wall_ms >= 0.0


def test_tradeoff_rejects(three_cycle):
    """Unknown methods and empty sweeps are refused."""
    with pytest.raises(InvalidParameterError):
        harness.run_tradeoff(three_cycle, "fs", [1e-2], harness.TargetSampler())
    with pytest.raises(InvalidParameterError):
        harness.run_tradeoff(three_cycle, "bs", [], harness.TargetSampler())


def test_variance_bounds():
    """theta * pi_l in unit mode, alpha * theta**2 in square-root mode."""
    hops = np.array([0.5, 0.1])
    unit = harness.variance_bounds(RbsConfig(theta=0.1), hops)
    sqrt = harness.variance_bounds(RbsConfig(mode=ADDITIVE, theta=0.1), hops)
    assert unit.tolist() == pytest.approx([0.05, 0.01])
    assert sqrt.tolist() == pytest.approx([0.002, 0.002])


def test_verify_lemmas_two_cycle(two_cycle):
    """Every check passes on the two-cycle."""
    report = harness.verify_lemmas(two_cycle, 1, RbsConfig(theta=0.05), trials=2000)
    assert report.passed
    assert set(report.checks) == {"unbiasedness", "variance", "cost", "cost_edge_touches"}
    assert report.checks["cost_edge_touches"]["pass"]
    assert report.calibration["se_multiplier"] == 4.0


@pytest.mark.parametrize("mode", ["relative", "additive"])
def test_verify_lemmas_small_er(small_er, mode):
    """Unbiasedness, variance and cost bounds hold on a random graph."""
    cfg = RbsConfig(mode=mode, theta=0.02, seed=1)
    report = harness.verify_lemmas(small_er, 4, cfg, trials=1000)
    for name in harness.GATING_CHECKS:
        assert report.checks[name]["pass"], name
    assert report.checks["unbiasedness"]["tracked_entries"] > 0


def test_verify_lemmas_deterministic_limit(three_cycle):
    """With no randomness the mean is exact and the variance vanishes."""
    report = harness.verify_lemmas(three_cycle, 0, RbsConfig(theta=1e-9, L_override=10), trials=5)
    assert report.passed
    assert report.checks["unbiasedness"]["observed"] == pytest.approx(0.0, abs=1e-6)
    assert report.checks["variance"]["observed"] == pytest.approx(0.0, abs=1e-6)


def test_edge_touch_cost_reported_not_gating(complete_graph):
    """Edge touches include every rejected entry, so they sit above the increments."""
    cfg = RbsConfig(theta=0.02)
    report = harness.verify_lemmas(complete_graph, 0, cfg, trials=300)
    touches, increments = report.checks["cost_edge_touches"], report.checks["cost"]
    assert set(touches) == {"bound", "observed", "pass"}
    assert touches["bound"] == pytest.approx(increments["bound"])
    assert touches["observed"] == pytest.approx(increments["mean_edge_touches"])
    assert increments["observed"] <= touches["observed"] <= 2 * touches["bound"]

    report.checks["cost_edge_touches"]["pass"] = False
    assert report.passed == all(report.checks[name]["pass"] for name in harness.GATING_CHECKS)


def test_lemma_report_json(tmp_path, two_cycle):
    """The report is written as sorted JSON."""
    report = harness.verify_lemmas(two_cycle, 0, RbsConfig(theta=0.1), trials=50)
    path = tmp_path / "report.json"
    report.write_json(str(path))
    data = json.loads(path.read_text())
    assert data["passed"] == report.passed
    assert data["checks"]["cost"]["bound"] == pytest.approx(report.checks["cost"]["bound"])
    assert data["config"]["L"] == 11


def test_verify_lemmas_needs_two_trials(two_cycle):
    """One trial has no sample variance."""
    with pytest.raises(InvalidParameterError):
        harness.verify_lemmas(two_cycle, 0, RbsConfig(), trials=1)


def test_cost_slope_of_exact_power_law():
    """A perfect 1 / theta curve has slope one."""
    thetas = [1e-1, 1e-2, 1e-3]
    assert harness.cost_slope(thetas, [10.0 / theta for theta in thetas]) == pytest.approx(1.0)


def test_cost_bound_matches_mass(complete_graph):
    """In unit mode the bound is n pi(t) / (alpha theta)."""
    cfg = RbsConfig(theta=0.01)
    truth = power_single_target(complete_graph, 0, ALPHA)
    assert harness.cost_bound(complete_graph, 0, cfg) == pytest.approx(
        truth.total() / (ALPHA * 0.01)
    )


def test_pagerank_identity(small_er):
    """The target-side column sum equals n independent source-side entries."""
    iters = 80
    target_side, source_side = harness.pagerank_identity(small_er, 3, ALPHA, iters)
    assert target_side == pytest.approx(source_side, abs=10 * small_er.n * (1 - ALPHA) ** iters)


@pytest.mark.slow
def test_rbs_relative_cheaper_than_bs_on_dense_graph():
    """RBS touches far fewer edges than BS at equal delta, more so on denser graphs."""
    delta = 1e-4

    def ratio(g, t):
        rbs_cost = np.mean(
            [
                rbs_single_target(g, t, RbsConfig(theta=delta), repetition=i)[2].edge_touches
                for i in range(3)
            ]
        )
        return rbs_cost / backward_search(g, t, ALPHA, delta)[2].edge_touches

    sparse = generate_graph("erdos_renyi", 300, seed=1, p=0.02)
    sparse_ratio = ratio(sparse, int(sparse.in_degree.argmax()))
    dense_ratio = ratio(generate_graph("complete", 300), 0)
    assert dense_ratio < 0.5
    assert dense_ratio < sparse_ratio


@pytest.mark.slow
def test_verify_lemmas_acceptance_scale():
    """Twenty thousand trials on a 30-node graph."""
    g = generate_graph("erdos_renyi", 30, seed=3, p=0.15)
    for mode in ("relative", "additive"):
        report = harness.verify_lemmas(g, 2, RbsConfig(mode=mode, theta=0.01), trials=20000)
        assert report.passed, report.checks
