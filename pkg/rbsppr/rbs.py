#! /usr/bin/env python3
"""Randomized Backward Search.

Mass travels backwards from the target one hop level at a time. When node v
is pushed at level l, each in-neighbour u either receives its exact share
(1 - alpha) * est_l(v) / d_out(u), or, when that share is small compared to
alpha * theta / lambda(u), receives alpha * theta / lambda(u) with the matching
probability. Because in-lists are sorted by out-degree, both groups are
contiguous prefixes of the in-list and are located by binary search.

Random draws come from the stream identified by (seed, repetition, level);
the push index within the level (nodes in ascending id order) selects the
draw, so a run is reproducible whatever order the pushes are evaluated in.
"""

import math
from logging import getLogger
from typing import Optional, Tuple

import numpy as np
from attr import attrib, attrs, evolve

from rbsppr.graph import Graph
from rbsppr.scores import HopTable, QueryStats, ScoreVector
from rbsppr.util import InvalidParameterError, check_alpha, hops_for, make_rng

LOGGER = getLogger(__name__)

RELATIVE = "relative"
ADDITIVE = "additive"
UNIT = "unit"
SQRT_OUT_DEGREE = "sqrt_out_degree"
THETA_SETTINGS = ("experimental", "theoretical")
# constant relative error of the relative-error guarantee
RELATIVE_ERROR = 0.1

LAMBDA_FOR_MODE = {RELATIVE: UNIT, ADDITIVE: SQRT_OUT_DEGREE}


def _check_mode(instance, attribute, value):
    if value not in LAMBDA_FOR_MODE:
        raise InvalidParameterError(f"unknown mode {value}")


def _check_theta(instance, attribute, value):
    if not value > 0.0:
        raise InvalidParameterError(f"theta must be positive, got {value}")


def _check_boost(instance, attribute, value):
    if value < 1 or value % 2 == 0:
        raise InvalidParameterError(f"boost must be a positive odd count, got {value}")


@attrs(frozen=True)
class RbsConfig:
    """Parameters of one randomized backward search query."""

    alpha = attrib(default=0.2, converter=check_alpha)
    mode = attrib(default=RELATIVE, validator=_check_mode)
    theta = attrib(default=1e-4, converter=float, validator=_check_theta)
    lam = attrib(default=None)
    L_override = attrib(default=None)
    seed = attrib(default=0, converter=int)
    boost = attrib(default=1, converter=int, validator=_check_boost)

    def __attrs_post_init__(self):
        """Pair the sampling function with the error mode."""
        expected = LAMBDA_FOR_MODE[self.mode]
        if self.lam is None:
            object.__setattr__(self, "lam", expected)
        elif self.lam != expected:
            raise InvalidParameterError(
                f"mode {self.mode} requires lambda {expected}, got {self.lam}"
            )

    @property
    def hops(self) -> int:
        """Number of push levels L."""
        if self.L_override is not None:
            return int(self.L_override)
        return hops_for(self.alpha, self.theta)

    def lam_of(self, degrees: np.ndarray) -> np.ndarray:
        """lambda(u) for an array of out-degrees."""
        if self.lam == UNIT:
            return np.ones(len(degrees), dtype=np.float64)
        return np.sqrt(degrees.astype(np.float64))

    def as_dict(self):
        """Resolved configuration for output headers."""
        return {
            "alpha": self.alpha,
            "mode": self.mode,
            "theta": self.theta,
            "lambda": self.lam,
            "L": self.hops,
            "seed": self.seed,
            "boost": self.boost,
        }


def derive_theta(mode: str, error: float, alpha: float, setting: str = "experimental") -> float:
    """Map an additive error eps or a relative threshold delta to theta.

    The experimental setting uses theta = eps (or delta). The theoretical
    setting uses theta = eps / sqrt(3 L alpha) for additive error and
    theta = 0.1**2 * delta / (3 L) for relative error, with L derived from
    eps (or delta).
    """
    if setting not in THETA_SETTINGS:
        raise InvalidParameterError(f"unknown theta setting {setting}")
    if error <= 0.0:
        raise InvalidParameterError(f"error parameter must be positive, got {error}")
    if setting == "experimental":
        return float(error)
    levels = max(1, hops_for(alpha, error))
    if mode == ADDITIVE:
        return error / math.sqrt(3.0 * levels * alpha)
    return RELATIVE_ERROR**2 * error / (3.0 * levels)


def _bound(cfg: RbsConfig, scale: float) -> float:
    """Largest admissible out-degree for a given lambda-free threshold."""
    if cfg.lam == UNIT:
        return scale
    # d <= sqrt(d) * scale  <=>  d <= scale ** 2
    return scale * scale


def _push(g, cfg, v, value, draw, nxt, stats):
    """Push node v holding ``value``; return nothing, update ``nxt`` and stats."""
    neighbours, degrees = g.in_entries(v)
    stats.push_count += 1
    size = len(neighbours)
    if not size:
        return
    alpha, theta = cfg.alpha, cfg.theta
    share = (1.0 - alpha) * value
    scale = share / (alpha * theta)

    split = int(np.searchsorted(degrees, _bound(cfg, scale), side="right"))
    for u, degree in zip(neighbours[:split].tolist(), degrees[:split].tolist()):
        nxt.add(u, share / degree)
    stats.edge_touches += split
    stats.increments += split
    if split == size:
        return

    end = int(np.searchsorted(degrees, _bound(cfg, scale / draw), side="right"))
    if end > split:
        lucky = neighbours[split:end]
        increments = alpha * theta / cfg.lam_of(degrees[split:end])
        for u, increment in zip(lucky.tolist(), increments.tolist()):
            nxt.add(u, increment)
    # the first rejected entry is read once, whichever phase stops at it
    stats.edge_touches += end - split + (1 if end < size else 0)
    stats.increments += end - split


def rbs_single_target(
    g: Graph, t: int, cfg: RbsConfig, repetition: int = 0
) -> Tuple[HopTable, ScoreVector, QueryStats]:
    """Estimate pi(s, t) for every s with level-by-level randomized pushes.

    Every hop estimate is unbiased for the exact l-hop value. Returns the hop
    table, the summed estimate and the operation counters.
    """
    t = g.check_node(t)
    hops = cfg.hops
    if hops == 0:
        LOGGER.warning("theta=%g gives zero hops, returning the trivial estimate", cfg.theta)

    table = HopTable(target=t, levels=[ScoreVector({t: cfg.alpha})])
    stats = QueryStats()
    with stats.timed():
        for ell in range(hops):
            current = table.levels[ell]
            nxt = ScoreVector()
            frontier = sorted(current)
            # 1 - U[0, 1) lies in (0, 1]
            draws = 1.0 - make_rng(cfg.seed, repetition, ell).random(len(frontier))
            for index, v in enumerate(frontier):
                _push(g, cfg, v, current[v], draws[index], nxt, stats)
            table.levels.append(nxt)
            LOGGER.debug("level %d: pushed %d nodes, next holds %d", ell, len(frontier), len(nxt))
    return table, table.collapse(), stats


def _median_table(t: int, tables, depth: int) -> HopTable:
    merged = HopTable(target=t)
    for ell in range(depth + 1):
        levels = [table.levels[ell] for table in tables]
        nodes = sorted(set().union(*levels))
        level = ScoreVector()
        if nodes:
            samples = np.array([[lv[node] for node in nodes] for lv in levels])
            for node, value in zip(nodes, np.median(samples, axis=0).tolist()):
                if value > 0.0:
                    level[node] = value
        merged.levels.append(level)
    return merged


def rbs_boosted(
    g: Graph, t: int, cfg: RbsConfig, boost: Optional[int] = None
) -> Tuple[HopTable, ScoreVector, QueryStats]:
    """Per-node, per-hop median over ``boost`` independent runs, hop medians summed.

    Run i uses repetition index i, so a single run is exactly
    :func:`rbs_single_target` with the same seed.
    """
    if boost is not None:
        cfg = evolve(cfg, boost=boost)
    if cfg.boost == 1:
        return rbs_single_target(g, t, cfg)

    stats = QueryStats()
    tables = []
    for repetition in range(cfg.boost):
        table, _, run_stats = rbs_single_target(g, t, cfg, repetition=repetition)
        tables.append(table)
        stats.merge(run_stats)
    merged = _median_table(t, tables, cfg.hops)
    return merged, merged.collapse(), stats
