import math

import numpy as np
import pytest

from app.exceptions import DegeneratePathError, UnreachablePointError
from app.plant.arm import forward_kinematics, jacobian
from app.trajectory.base import ReferencePath
from app.trajectory.periodic import gen_circle, gen_figure_eight
from app.trajectory.workspace import (
    check_path_reachable,
    derive_reference_series,
    limit_speed,
    resample_path,
    rescale_to_workspace,
    scale_path,
)


def _line(n: int, step: float, dt: float) -> ReferencePath:
    x = 0.25 + step * np.arange(n)
    return ReferencePath(points=np.column_stack([x, np.full(n, 0.25)]), dt=dt)


def test_rescale_leaves_reachable_paths_alone(arm):
    """Tests that a path inside the usable disk is returned as is."""
    path = gen_circle(500, radius=0.5)
    assert rescale_to_workspace(path, arm, margin=0.1) is path


def test_rescale_shrinks_large_paths(arm):
    """Tests that an oversized path ends on 0.9 * reach with its shape kept."""
    path = gen_figure_eight(3000, a=4.0, b=2.0)
    scaled = rescale_to_workspace(path, arm, margin=0.1)
    radius = np.hypot(scaled.points[:, 0], scaled.points[:, 1])
    assert radius.max() == pytest.approx(0.9, abs=1e-12)
    extent = np.ptp(scaled.points, axis=0)
    assert extent[0] / extent[1] == pytest.approx(2.0, rel=1e-9)


def test_rescale_fill_centers_the_path(arm):
    """Tests that fill moves the bounding box onto the origin."""
    points = np.column_stack([np.linspace(10, 12, 50), np.linspace(5, 6, 50)])
    scaled = rescale_to_workspace(ReferencePath(points=points), arm, fill=True)
    lo, hi = scaled.points.min(axis=0), scaled.points.max(axis=0)
    np.testing.assert_allclose(lo + hi, 0.0, atol=1e-12)
    assert np.hypot(*scaled.points.T).max() == pytest.approx(0.9, abs=1e-12)


def test_rescale_rejects_degenerate_paths(arm):
    """Tests that a single repeated point cannot be scaled."""
    with pytest.raises(DegeneratePathError):
        rescale_to_workspace(ReferencePath(points=np.ones((10, 2))), arm, fill=True)


def test_limit_speed_stretches_fast_paths():
    """Tests that a 1 m/s line is slowed to 0.5 m/s without moving its ends."""
    path = _line(101, 1 / 128, 1 / 128)
    slow = limit_speed(path, 0.5)
    assert len(slow) == 201
    assert slow.max_speed <= 0.5 * (1 + 1e-9)
    np.testing.assert_allclose(slow.points[0], path.points[0])
    np.testing.assert_allclose(slow.points[-1], path.points[-1], atol=1e-12)


def test_limit_speed_keeps_slow_paths():
    """Tests that paths under the bound are untouched."""
    path = _line(50, 0.001, 0.01)
    assert limit_speed(path, 0.5) is path


def test_check_path_reachable(arm):
    """Tests the index of the first unreachable sample."""
    points = np.array([[0.5, 0.0], [0.9, 0.0], [1.1, 0.0], [1.2, 0.0]])
    assert check_path_reachable(ReferencePath(points=points), arm) == 2
    assert check_path_reachable(ReferencePath(points=points[:2]), arm) is None


def test_derive_rejects_unreachable_points(arm):
    """Tests that y_d derivation names the offending sample."""
    points = np.array([[0.5, 0.0], [0.7, 0.0], [1.5, 0.0]])
    with pytest.raises(UnreachablePointError) as exc_info:
        derive_reference_series(ReferencePath(points=points), arm)
    assert exc_info.value.index == 2


def test_stationary_path_has_zero_velocity(arm):
    """Tests that a path resting on one point asks for zero joint speed."""
    path = ReferencePath(points=np.tile([0.4, 0.5], (20, 1)))
    series = derive_reference_series(path, arm)
    assert len(series) == 20
    assert not np.any(series.y_d[2:])
    np.testing.assert_array_equal(series.y_d[:2].T, path.points)


def test_circle_velocities_match_the_jacobian(arm):
    """Tests central-difference joint speeds against J^-1 v."""
    radius, period, dt = 0.8, 20.0, 0.01
    path = gen_circle(1000, radius=radius, period=period, dt=dt)
    series = derive_reference_series(path, arm)
    omega = 2 * np.pi / period
    for k in range(1, len(series) - 1, 37):
        q1, q2 = series.angles[:, k]
        t = k * dt
        v = radius * omega * np.array([-np.sin(omega * t), np.cos(omega * t)])
        expected = np.linalg.solve(jacobian(arm, q1, q2), v)
        np.testing.assert_allclose(series.y_d[2:, k], expected, atol=1e-4)


def test_derived_angles_reproduce_the_path(arm):
    """Tests that the stored angles sit on the path."""
    path = gen_circle(300, radius=0.6)
    series = derive_reference_series(path, arm)
    for k in range(0, 300, 29):
        np.testing.assert_allclose(
            forward_kinematics(arm, *series.angles[:, k]), path.points[k], atol=1e-9
        )


def test_figure_eight_angles_stay_continuous(arm):
    """Tests that starting on and crossing the base does not make the angles jump."""
    path = gen_figure_eight(4000)
    assert np.hypot(*path.points[0]) == 0.0
    series = derive_reference_series(path, arm)
    assert np.max(np.abs(np.diff(series.angles, axis=1))) < 0.5
    # no velocity spike at the start: the first step matches the path speed
    assert np.max(np.abs(series.y_d[2:, :3])) < 2.0


def test_base_start_takes_q1_from_the_next_sample(arm):
    """Tests that a path leaving the base keeps q1 on its first step."""
    direction = np.array([np.cos(2.0), np.sin(2.0)])
    points = np.outer(np.arange(20) * 0.01, direction)
    series = derive_reference_series(ReferencePath(points=points, dt=0.01, name="ray"), arm)
    assert series.angles[0, 0] == pytest.approx(series.angles[0, 1], abs=1e-9)
    assert series.angles[1, 0] == pytest.approx(math.pi)
    assert np.max(np.abs(np.diff(series.angles, axis=1))) < 0.05


def test_initial_guess_selects_the_branch(arm):
    """Tests that ``initial`` picks the elbow branch of the first sample."""
    path = gen_circle(50, radius=0.6)
    up = derive_reference_series(path, arm)
    down = derive_reference_series(path, arm, initial=(0.0, -1.0))
    assert up.angles[1, 0] > 0 > down.angles[1, 0]


def test_resample_path_changes_the_time_step():
    """Tests re-timing a coarse path onto the control step."""
    coarse = gen_circle(101, radius=0.5, period=2.0, dt=0.02)
    fine = resample_path(coarse, 0.01)
    assert fine.dt == 0.01
    assert len(fine) == 201
    np.testing.assert_allclose(fine.points[::2], coarse.points, atol=1e-12)
    assert np.max(np.abs(np.hypot(*fine.points.T) - 0.5)) < 1e-4


def test_scale_path_about_the_base():
    """Tests uniform scaling."""
    path = gen_circle(10, radius=0.5)
    np.testing.assert_allclose(np.hypot(*scale_path(path, 1.5).points.T), 0.75)
