#! /usr/bin/env python3
"""Accuracy metrics comparing estimates with exact vectors."""

from typing import Dict, Set, Union

import numpy as np

from rbsppr.scores import DenseVector, ScoreVector
from rbsppr.util import InvalidParameterError, PprError

Truth = Union[DenseVector, np.ndarray]
Estimate = Union[ScoreVector, DenseVector, np.ndarray]


class DimensionMismatchError(PprError):
    """Represents an estimate over a different node universe than the truth."""

    pass


def _truth_values(truth: Truth) -> np.ndarray:
    return truth.values if isinstance(truth, DenseVector) else np.asarray(truth, dtype=np.float64)


def _estimate_values(est: Estimate, n: int) -> np.ndarray:
    if isinstance(est, ScoreVector):
        if any(not 0 <= node < n for node in est):
            raise DimensionMismatchError(f"estimate holds nodes outside 0..{n - 1}")
        return est.to_dense(n)
    values = est.values if isinstance(est, DenseVector) else np.asarray(est, dtype=np.float64)
    if len(values) != n:
        raise DimensionMismatchError(f"estimate has {len(values)} entries, truth has {n}")
    return values


def max_additive_err(truth: Truth, est: Estimate) -> float:
    """Largest absolute difference over all nodes; absent estimates count as zero."""
    exact = _truth_values(truth)
    return float(np.max(np.abs(exact - _estimate_values(est, len(exact)))))


def top_k(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values, ties broken by smaller node id."""
    order = np.lexsort((np.arange(len(values)), -values))
    return order[:k]


def precision_at_k(truth: Truth, est: Estimate, k: int) -> float:
    """Share of the estimated top-k that belongs to the exact top-k."""
    exact = _truth_values(truth)
    if k <= 0:
        raise InvalidParameterError(f"k must be positive, got {k}")
    if k > len(exact):
        raise InvalidParameterError(f"k={k} exceeds the {len(exact)} nodes")
    approx = _estimate_values(est, len(exact))
    hits = np.intersect1d(top_k(exact, k), top_k(approx, k))
    return len(hits) / float(k)


def f1_heavy_hitters(truth_set: Set[int], est_set: Set[int]) -> float:
    """Harmonic mean of precision and recall, zero when both vanish.

    Two empty sets have neither, so they score zero as well.
    """
    truth_set, est_set = set(truth_set), set(est_set)
    common = len(truth_set & est_set)
    precision = common / len(est_set) if est_set else 0.0
    recall = common / len(truth_set) if truth_set else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def heavy_hitter_f1(classes: Dict[int, str], returned: Set[int]) -> float:
    """F1 against exact bands with permissible nodes left out of both sides."""
    absolute = {node for node, band in classes.items() if band == "absolute"}
    permissible = {node for node, band in classes.items() if band == "permissible"}
    return f1_heavy_hitters(absolute, set(returned) - permissible)


def relative_error_holds(truth: Truth, est: Estimate, delta: float, rel: float = 0.1) -> bool:
    """True when every node with pi > delta is estimated within rel * pi."""
    exact = _truth_values(truth)
    approx = _estimate_values(est, len(exact))
    above = exact > delta
    return bool(np.all(np.abs(approx[above] - exact[above]) <= rel * exact[above]))
