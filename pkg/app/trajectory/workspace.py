"""Placing reference paths in the arm workspace and deriving y_d."""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from app.config import ArmParams
from app.exceptions import ConfigError, DegeneratePathError, UnreachablePointError
from app.logger import logger
from app.plant.arm import REACH_TOL, SINGULAR_RADIUS, check_reachable, inverse_kinematics
from app.trajectory.base import ReferencePath, ReferenceSeries


_IDENTITY_TOL = 1e-12


def rescale_to_workspace(
    path: ReferencePath, p: ArmParams, margin: float = 0.1, fill: bool = False
) -> ReferencePath:
    """Uniform scale + translation into the disk of radius (l1 + l2)(1 - margin).

    A path already inside that disk is returned unchanged unless ``fill`` is
    set, in which case its bounding box is centered on the origin and scaled
    so the farthest point sits on the disk boundary. The aspect ratio is
    always preserved.

    Raises:
        DegeneratePathError: if the path has zero extent.
    """
    points = path.points
    lo, hi = points.min(axis=0), points.max(axis=0)
    if np.all(hi - lo == 0):
        raise DegeneratePathError(f"Path '{path.name}' has zero extent")

    limit = p.reach * (1.0 - margin)
    if not fill and np.hypot(points[:, 0], points[:, 1]).max() <= limit:
        return path

    center = 0.5 * (lo + hi)
    centered = points - center
    radius = np.hypot(centered[:, 0], centered[:, 1]).max()
    scale = limit / radius if (fill or radius > limit) else 1.0
    if abs(scale - 1.0) < _IDENTITY_TOL and np.all(np.abs(center) < _IDENTITY_TOL):
        return path

    scaled = path.model_copy(update={"points": centered * scale})
    inner = np.hypot(scaled.points[:, 0], scaled.points[:, 1]).min()
    if inner < p.inner_reach:
        logger.warning(
            f"Path '{path.name}' enters the unreachable inner disk "
            f"(radius {inner:.3g} < |l1 - l2| = {p.inner_reach:.3g})"
        )
    return scaled


def base_clearance(p: ArmParams, clearance: float) -> float:
    """Radius of the disk around the base that filled paths keep out of."""
    return max(clearance * p.reach, p.inner_reach)


def _offset_scale(width: float, height: float, floor: float, limit: float) -> float:
    # largest s with (floor + s * width)^2 + (s * height / 2)^2 <= limit^2
    a = width**2 + 0.25 * height**2
    b = floor * width
    return (-b + math.sqrt(b * b + a * (limit**2 - floor**2))) / a


def keep_clear_of_base(
    path: ReferencePath, p: ArmParams, margin: float = 0.1, clearance: float = 0.2
) -> ReferencePath:
    """Move a path that comes too close to the arm base off to one side.

    Paths whose every point lies at least :func:`base_clearance` from the
    base are returned unchanged. Otherwise the bounding box is scaled
    uniformly and placed beside the base, on whichever axis gives the larger
    scale, so it fits between the clearance and the usable disk of radius
    (l1 + l2)(1 - margin).

    Raises:
        ConfigError: if the clearance leaves no room inside the usable disk.
        DegeneratePathError: if the path has zero extent.
    """
    points = path.points
    floor = base_clearance(p, clearance)
    limit = p.reach * (1.0 - margin)
    if np.hypot(points[:, 0], points[:, 1]).min() >= floor:
        return path
    if floor >= limit:
        raise ConfigError(
            f"Base clearance {floor:.3g} m leaves no room inside the usable radius {limit:.3g} m"
        )

    lo, hi = points.min(axis=0), points.max(axis=0)
    width, height = hi - lo
    if width == 0 and height == 0:
        raise DegeneratePathError(f"Path '{path.name}' has zero extent")
    beside = _offset_scale(width, height, floor, limit)
    above = _offset_scale(height, width, floor, limit)
    center = 0.5 * (lo + hi)
    if beside >= above:
        moved = (points - [lo[0], center[1]]) * beside + [floor, 0.0]
    else:
        moved = (points - [center[0], lo[1]]) * above + [0.0, floor]
    logger.info(
        f"Path '{path.name}' moved off the base: clearance {floor:.3g} m, "
        f"scale {max(beside, above):.3g}"
    )
    return path.model_copy(update={"points": moved})


def limit_speed(path: ReferencePath, max_speed: float) -> ReferencePath:
    """Slow the path down so its end-effector speed never exceeds ``max_speed``.

    The path is time-stretched by a cubic spline over the sample index; paths
    already below the bound are returned unchanged.
    """
    speed = path.max_speed
    if speed <= max_speed or len(path) < 2:
        return path
    factor = speed / max_speed
    n_out = int(math.floor((len(path) - 1) * factor)) + 1
    spline = CubicSpline(np.arange(len(path)), path.points, axis=0)
    points = spline(np.arange(n_out) / factor)
    logger.debug(f"Path '{path.name}' slowed down by {factor:.3g}x")
    return path.model_copy(update={"points": points})


def check_path_reachable(path: ReferencePath, p: ArmParams) -> Optional[int]:
    """Index of the first unreachable point, or None."""
    radius = np.hypot(path.points[:, 0], path.points[:, 1])
    bad = np.nonzero(
        (radius > p.reach + REACH_TOL) | (radius < p.inner_reach - REACH_TOL)
    )[0]
    return int(bad[0]) if bad.size else None


def _start_hint(
    path: ReferencePath, p: ArmParams, initial: Optional[Tuple[float, float]]
) -> Optional[Tuple[float, float]]:
    """Continuity hint for the first sample.

    A path that starts on the base leaves q1 undetermined there; it is taken
    from the first sample off the base so the arm does not swing round on
    the second step.
    """
    radius = np.hypot(path.points[:, 0], path.points[:, 1])
    if radius.size == 0 or radius[0] >= SINGULAR_RADIUS:
        return initial
    off_base = np.nonzero(radius >= SINGULAR_RADIUS)[0]
    if off_base.size == 0:
        return initial
    cx, cy = path.points[off_base[0]]
    return inverse_kinematics(p, cx, cy, prev=initial, wrap=False)


def derive_reference_series(
    path: ReferencePath,
    p: ArmParams,
    initial: Optional[Tuple[float, float]] = None,
) -> ReferenceSeries:
    """Desired observations [cx, cy, qd1, qd2] along ``path``.

    Angles follow the path with the continuity rule of inverse kinematics,
    starting from the branch closest to ``initial`` (q2 >= 0 when omitted);
    joint velocities are central differences of the unwrapped angles,
    one-sided at the ends.

    Raises:
        UnreachablePointError: naming the first offending index.
    """
    first_bad = check_path_reachable(path, p)
    if first_bad is not None:
        cx, cy = path.points[first_bad]
        check_reachable(p, cx, cy, index=first_bad)
        raise UnreachablePointError(
            f"Point at index {first_bad} is unreachable", index=first_bad
        )

    n = len(path)
    angles = np.empty((2, n))
    prev = _start_hint(path, p, initial)
    for k, (cx, cy) in enumerate(path.points):
        prev = inverse_kinematics(p, cx, cy, prev=prev, wrap=False)
        angles[:, k] = prev

    if n > 1:
        velocities = np.gradient(angles, path.dt, axis=1)
    else:
        velocities = np.zeros((2, n))
    y_d = np.vstack([path.points.T, velocities])
    return ReferenceSeries(y_d=y_d, angles=angles, source=path)


def resample_path(path: ReferencePath, dt: float) -> ReferencePath:
    """Re-time ``path`` onto a grid of step ``dt`` by cubic interpolation."""
    if math.isclose(path.dt, dt, rel_tol=1e-12) or len(path) < 2:
        return path.model_copy(update={"dt": dt})
    t_in = np.arange(len(path)) * path.dt
    t_out = np.arange(0.0, t_in[-1] + 0.5 * dt, dt)
    t_out = t_out[t_out <= t_in[-1]]
    points = CubicSpline(t_in, path.points, axis=0)(t_out)
    return path.model_copy(update={"points": points, "dt": dt})


def scale_path(path: ReferencePath, factor: float) -> ReferencePath:
    """Uniform scaling about the arm base."""
    return path.model_copy(update={"points": path.points * factor})
