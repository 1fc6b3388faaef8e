#! /usr/bin/env python3
# This file is part of rbs-ppr, a toolkit for single-target Personalized
# PageRank queries.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3, as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Utility library for all helpful functions this project uses."""

import math
import os
import tempfile
from contextlib import contextmanager

import numpy as np


class PprError(Exception):
    """Base class for every error raised by rbsppr."""

    def __init__(self, msg: str):
        """Error message format.

        :param msg: Message of the exception found.
        :type msg: str
        """
        super().__init__(msg)
        self.message = f"{self.__class__.__name__}: {msg}"


class InvalidParameterError(PprError):
    """Represents a parameter outside of its valid range."""

    pass


def check_alpha(alpha):
    """Validate a teleport probability."""
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def hops_for(alpha, threshold):
    """Return the smallest L with (1 - alpha) ** L <= threshold.

    A threshold of 1 or more needs no hop at all.
    """
    if threshold >= 1.0:
        return 0
    if threshold <= 0.0:
        raise InvalidParameterError(f"threshold must be positive, got {threshold}")
    return max(0, math.ceil(math.log(threshold) / math.log(1.0 - alpha) - 1e-12))


def ground_truth_iterations(alpha, tolerance=1e-7):
    """Power iterations needed for an additive error of ``tolerance``."""
    return max(1, hops_for(alpha, tolerance))


def derive_seed(seed, *keys):
    """Derive a 64-bit seed from a base seed and a tuple of integer keys.

    Identical inputs always give the same output, distinct key tuples give
    statistically independent streams.
    """
    entropy = [int(seed)] + [int(key) for key in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def make_rng(seed, *keys):
    """Build a numpy Generator for the stream identified by (seed, keys)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [int(k) for k in keys]))


@contextmanager
def atomic_write(path, mode="w"):
    """Write to ``path`` through a temporary file renamed into place on success."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(handle, mode) as tmp_file:
            yield tmp_file
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def format_float(value):
    """Render a float with full round-trip precision."""
    return repr(float(value))
