"""Tracking error measures.

Both take 4 x T observation logs (rows cx, cy, qd1, qd2) that are already
time-aligned, i.e. column k of ``actual`` is compared with column k of
``desired``.
"""

import math
from typing import Tuple

import numpy as np


def position_rmse(actual: np.ndarray, desired: np.ndarray) -> float:
    """sqrt(mean_t [(cx - cx_d)^2 + (cy - cy_d)^2]) in meters."""
    if actual.shape[1] == 0:
        return math.nan
    err = actual[:2] - desired[:2]
    return float(np.sqrt(np.mean(np.sum(err * err, axis=0))))


def full_rmse(actual: np.ndarray, desired: np.ndarray) -> float:
    """Same as :func:`position_rmse` with the joint-velocity errors added in."""
    if actual.shape[1] == 0:
        return math.nan
    err = actual - desired
    return float(np.sqrt(np.mean(np.sum(err * err, axis=0))))


def rmse_components(actual: np.ndarray, desired: np.ndarray) -> np.ndarray:
    """Per-row RMSE: [cx, cy, qd1, qd2]."""
    if actual.shape[1] == 0:
        return np.full(actual.shape[0], math.nan)
    return np.sqrt(np.mean((actual - desired) ** 2, axis=1))


def score_window(
    actual: np.ndarray, desired: np.ndarray, start: int
) -> Tuple[float, float]:
    """(position, full) RMSE over the logged columns from ``start`` on.

    ``desired`` may run longer than ``actual`` and is cut to its length. An
    empty window scores infinity, which never counts as a success.
    """
    a, d = actual[:, start:], desired[:, start : actual.shape[1]]
    if a.shape[1] == 0:
        return math.inf, math.inf
    return position_rmse(a, d), full_rmse(a, d)


def rmse(result) -> float:
    """Position RMSE of a :class:`~app.tracking.runner.RunResult`, recomputed from its logs."""
    return score_window(result.actual, result.desired, result.score_start)[0]
