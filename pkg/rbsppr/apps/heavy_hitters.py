#!/usr/bin/python3
"""Approximate heavy hitters: sources for which the target is important."""

from logging import getLogger
from typing import Dict, List, Set

from attr import attrib, attrs, evolve

from rbsppr.graph import Graph
from rbsppr.rbs import RELATIVE, RbsConfig, derive_theta, rbs_boosted
from rbsppr.scores import DenseVector
from rbsppr.util import InvalidParameterError

LOGGER = getLogger(__name__)

ABSOLUTE = "absolute"
PERMISSIBLE = "permissible"
NOT_HITTER = "none"


def _open_unit(name):
    def check(instance, attribute, value):
        if not 0.0 < value < 1.0:
            raise InvalidParameterError(f"{name} must lie in (0, 1), got {value}")

    return check


def _positive_mass(instance, attribute, value):
    if not value > 0.0:
        raise InvalidParameterError(f"n*pi(t) must be positive, got {value}")


@attrs(frozen=True)
class HeavyHitterConfig:
    """Heavy hitter parameters; ``pagerank_of_t`` is n times the PageRank of t."""

    phi = attrib(converter=float, validator=_open_unit("phi"))
    c = attrib(converter=float, validator=_open_unit("c"))
    pagerank_of_t = attrib(converter=float, validator=_positive_mass)
    provenance = attrib(default="exact", type=str)

    @property
    def threshold(self) -> float:
        """phi * n * pi(t)."""
        return self.phi * self.pagerank_of_t

    @property
    def delta(self) -> float:
        """Relative error threshold c * phi * n * pi(t) handed to the query."""
        return self.c * self.threshold

    def classify(self, value: float) -> str:
        """Band of ``value``; the closed permissible band wins on its edges."""
        if value > (1.0 + self.c) * self.threshold:
            return ABSOLUTE
        if value >= (1.0 - self.c) * self.threshold:
            return PERMISSIBLE
        return NOT_HITTER


@attrs(frozen=True)
class HeavyHitter:
    """One returned source."""

    node = attrib(type=int)
    estimate = attrib(type=float)
    classification = attrib(type=str)


def query_theta(cfg: HeavyHitterConfig, alpha: float, theta_setting: str, theta_override=None):
    """Theta of the relative query behind a heavy-hitter answer."""
    if theta_override is not None:
        return float(theta_override)
    return derive_theta(RELATIVE, cfg.delta, alpha, theta_setting)


def heavy_hitters(
    g: Graph,
    t: int,
    cfg: HeavyHitterConfig,
    rbs_cfg: RbsConfig,
    theta_setting: str = "experimental",
    theta_override=None,
) -> List[HeavyHitter]:
    """Return every source whose estimate reaches phi * n * pi(t).

    The query runs in relative mode with delta = c * phi * n * pi(t); theta
    follows ``theta_setting`` unless ``theta_override`` is given.
    """
    theta = query_theta(cfg, rbs_cfg.alpha, theta_setting, theta_override)
    query_cfg = evolve(rbs_cfg, mode=RELATIVE, lam=None, theta=theta)
    LOGGER.debug(
        "heavy hitters t=%d: threshold=%g delta=%g theta=%g", t, cfg.threshold, cfg.delta, theta
    )
    _, estimate, _ = rbs_boosted(g, t, query_cfg)
    hitters = [
        HeavyHitter(node=node, estimate=value, classification=cfg.classify(value))
        for node, value in estimate.ranked()
        if value >= cfg.threshold
    ]
    return hitters


def classify_exact(truth: DenseVector, cfg: HeavyHitterConfig) -> Dict[int, str]:
    """Band of every node under the exact single-target vector."""
    return {node: cfg.classify(float(value)) for node, value in enumerate(truth.values)}


def reference_sets(classes: Dict[int, str]):
    """Split exact classes into (must return, may return) node sets."""
    absolute = {node for node, band in classes.items() if band == ABSOLUTE}
    permissible = {node for node, band in classes.items() if band == PERMISSIBLE}
    return absolute, permissible


def returned_nodes(hitters: List[HeavyHitter]) -> Set[int]:
    """Node ids of a heavy-hitter answer."""
    return {hitter.node for hitter in hitters}
