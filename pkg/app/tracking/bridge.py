"""Bridge from the arm's start position onto the reference.

The bridge is a straight Cartesian chord travelled with a cosine speed
profile, so its velocity is zero at both ends. It is lengthened beyond the
requested number of steps when needed to keep its peak per-step
displacement within 1.5x that of the reference itself.
"""

import math
from typing import Optional, Tuple

import numpy as np

from app.config import ArmParams
from app.exceptions import BridgeError, UnreachablePointError
from app.logger import logger
from app.plant.arm import check_reachable
from app.trajectory.base import ReferencePath, ReferenceSeries
from app.trajectory.workspace import check_path_reachable, derive_reference_series


SAME_POINT_TOL = 1e-12
MAX_STEP_RATIO = 1.5


def cosine_ramp(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Progress s(k) = (1 - cos(pi k / n)) / 2 for k = 0..n and ds/dk."""
    if n <= 0:
        return np.zeros(1), np.zeros(1)
    phase = math.pi * np.arange(n + 1) / n
    return 0.5 * (1.0 - np.cos(phase)), 0.5 * math.pi / n * np.sin(phase)


def bridge_length(distance: float, bridge_len: int, path_max_step: float) -> int:
    """Steps needed to cover ``distance``; at least ``bridge_len``."""
    if distance <= SAME_POINT_TOL:
        return 0
    n = max(bridge_len, 1)
    if path_max_step > 0:
        # peak ramp step <= distance * pi / (2 n)
        needed = math.ceil(distance * math.pi / (2.0 * MAX_STEP_RATIO * path_max_step))
        n = max(n, needed)
    return n


def bridge_points(start: Tuple[float, float], end: Tuple[float, float], n: int) -> np.ndarray:
    """(n + 1) x 2 chord samples, both endpoints included."""
    s, _ = cosine_ramp(n)
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    points = start + np.outer(s, end - start)
    points[-1] = end
    return points


def build_bridge(
    start: Tuple[float, float],
    series: ReferenceSeries,
    bridge_len: int,
    p: ArmParams,
    initial: Optional[Tuple[float, float]] = None,
    path_max_step: Optional[float] = None,
) -> ReferenceSeries:
    """Desired observations leading from ``start`` to the first reference point.

    The returned prefix stops one step short of the reference so that it can
    be prepended without duplicating the junction; it is empty when the arm
    already sits on the reference.

    Raises:
        UnreachablePointError: if ``start`` itself is unreachable.
        BridgeError: if the chord crosses the unreachable inner disk.
    """
    check_reachable(p, float(start[0]), float(start[1]))
    end = series.positions[0]
    dt = series.dt
    if path_max_step is None:
        source = series.source
        path_max_step = (
            float(source.step_lengths.max())
            if source is not None and len(source) > 1
            else 0.0
        )

    distance = float(np.hypot(*(end - np.asarray(start, dtype=float))))
    n = bridge_length(distance, bridge_len, path_max_step)
    if n == 0:
        return ReferenceSeries(
            y_d=np.empty((4, 0)),
            angles=np.empty((2, 0)),
            source=ReferencePath(points=np.empty((0, 2)), dt=dt, name="bridge"),
        )
    if n > bridge_len:
        logger.debug(f"Bridge lengthened from {bridge_len} to {n} steps")

    path = ReferencePath(points=bridge_points(start, end, n), dt=dt, name="bridge")
    bad = check_path_reachable(path, p)
    if bad is not None:
        raise BridgeError(
            f"Bridge step {bad} at ({path.points[bad, 0]:.4f}, {path.points[bad, 1]:.4f}) "
            f"crosses the unreachable inner disk of radius {p.inner_reach:.4f}; "
            "use a longer bridge or a different start configuration",
            bound="inner",
            index=bad,
        )
    try:
        derived = derive_reference_series(path, p, initial=initial)
    except UnreachablePointError as e:
        raise BridgeError(str(e), bound=e.bound, index=e.index)
    return derived.head(n)
