import math
from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter1d

from app.config import ArmParams
from app.trajectory.base import ReferencePath
from app.trajectory.workspace import rescale_to_workspace


def _times(n: int, dt: float) -> np.ndarray:
    if n <= 0:
        raise ValueError("n must be positive")
    return np.arange(n) * dt


def gen_circle(
    n: int, radius: float = 0.8, period: float = 20.0, dt: float = 0.01
) -> ReferencePath:
    """Counter-clockwise circle centered on the arm base, starting at (radius, 0)."""
    omega = 2.0 * math.pi / period
    t = _times(n, dt)
    points = radius * np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    return ReferencePath(points=points, dt=dt, name="circle")


def gen_figure_eight(
    n: int, a: float = 0.8, b: float = 0.5, period: float = 30.0, dt: float = 0.01
) -> ReferencePath:
    """Lissajous figure-eight (a sin wt, b sin 2wt) through the origin."""
    omega = 2.0 * math.pi / period
    t = _times(n, dt)
    points = np.column_stack([a * np.sin(omega * t), b * np.sin(2.0 * omega * t)])
    return ReferencePath(points=points, dt=dt, name="figure_eight")


def gen_random_walk(
    n: int,
    step_std: float = 0.01,
    smooth_sigma: float = 50.0,
    rng: Optional[np.random.Generator] = None,
    p: Optional[ArmParams] = None,
    margin: float = 0.1,
    dt: float = 0.01,
) -> ReferencePath:
    """Gaussian-smoothed planar random walk, filled into the arm workspace."""
    _times(n, dt)
    rng = rng if rng is not None else np.random.default_rng()
    walk = np.cumsum(rng.normal(0.0, step_std, size=(n, 2)), axis=0)
    if smooth_sigma > 0:
        walk = gaussian_filter1d(walk, smooth_sigma, axis=0, mode="nearest")
    path = ReferencePath(points=walk, dt=dt, name="random_walk")
    return rescale_to_workspace(path, p or ArmParams(), margin=margin, fill=True)
