import math

import numpy as np
import pytest

from app.trajectory.chaotic import gen_lorenz, gen_mackey_glass, lorenz_series
from app.trajectory.periodic import gen_circle, gen_figure_eight, gen_random_walk


def test_circle_radius_and_start():
    """Tests that every circle sample lies on the requested radius."""
    path = gen_circle(2000, radius=0.8, period=20.0)
    radius = np.hypot(path.points[:, 0], path.points[:, 1])
    assert np.max(np.abs(radius - 0.8)) < 1e-12
    np.testing.assert_allclose(path.points[0], [0.8, 0.0])
    assert path.name == "circle"
    assert path.max_speed == pytest.approx(0.8 * 2 * math.pi / 20.0, rel=1e-3)


def test_circle_is_periodic():
    """Tests that the circle closes after one period."""
    path = gen_circle(2001, period=20.0, dt=0.01)
    np.testing.assert_allclose(path.points[-1], path.points[0], atol=1e-12)


def test_figure_eight_crosses_the_origin():
    """Tests that the figure-eight passes through the base at half period."""
    path = gen_figure_eight(3001, a=0.8, b=0.5, period=30.0)
    np.testing.assert_allclose(path.points[0], [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(path.points[1500], [0.0, 0.0], atol=1e-12)
    assert path.points[:, 0].max() == pytest.approx(0.8, abs=1e-6)
    assert path.points[:, 1].max() == pytest.approx(0.5, abs=1e-6)


def test_generators_reject_empty_paths():
    """Tests that a path needs at least one sample."""
    for generate in (gen_circle, gen_figure_eight, gen_lorenz, gen_mackey_glass):
        with pytest.raises(ValueError):
            generate(0)


def test_lorenz_is_bounded_and_deterministic():
    """Tests the attractor bounds and the reproducibility of the integration."""
    a = gen_lorenz(5000)
    b = gen_lorenz(5000)
    np.testing.assert_array_equal(a.points, b.points)
    assert np.all(np.abs(a.points[:, 0]) < 30.0)
    assert np.all((a.points[:, 1] > 0.0) & (a.points[:, 1] < 60.0))


def test_lorenz_is_sensitive_to_initial_conditions():
    """Tests that a 1e-9 perturbation grows to attractor scale."""
    a = lorenz_series(4000, initial=(1.0, 1.0, 1.0))
    b = lorenz_series(4000, initial=(1.0 + 1e-9, 1.0, 1.0))
    assert np.max(np.abs(a - b)) > 1.0


def test_lorenz_projection():
    """Tests the axis selection of the planar projection."""
    full = lorenz_series(100)
    path = gen_lorenz(100, projection=(0, 1))
    np.testing.assert_array_equal(path.points, full[:, [0, 1]])


def test_mackey_glass_range():
    """Tests that the delay system stays in its usual band."""
    path = gen_mackey_glass(5000)
    assert np.all(path.points > 0.0)
    assert np.all(path.points < 1.6)
    assert np.std(path.points[:, 0]) > 0.05


def test_mackey_glass_lag_column():
    """Tests that the second column is the first one delayed by tau."""
    path = gen_mackey_glass(2000, dt_sim=0.1, tau_delay=17.0)
    np.testing.assert_allclose(path.points[170:, 1], path.points[:-170, 0], atol=1e-15)


def test_mackey_glass_without_dynamics_is_constant():
    """Tests that zero production and decay keep the history value."""
    path = gen_mackey_glass(500, a=0.0, b=0.0, history=0.9)
    assert np.all(path.points == 0.9)


def test_mackey_glass_rejects_bad_delay():
    """Tests the delay validation."""
    with pytest.raises(ValueError):
        gen_mackey_glass(10, tau_delay=0.0)


def test_random_walk_fills_the_workspace(arm):
    """Tests that a random walk is seeded and scaled into the workspace."""
    a = gen_random_walk(3000, rng=np.random.default_rng(3), p=arm, margin=0.1)
    b = gen_random_walk(3000, rng=np.random.default_rng(3), p=arm, margin=0.1)
    np.testing.assert_array_equal(a.points, b.points)
    radius = np.hypot(a.points[:, 0], a.points[:, 1])
    assert radius.max() == pytest.approx(0.9, abs=1e-12)


def _peaks(x: np.ndarray) -> np.ndarray:
    return np.nonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1


def test_mackey_glass_short_delay_is_periodic():
    """Tests that tau = 5 settles on a closed orbit while tau = 17 does not."""
    path = gen_mackey_glass(6000, tau_delay=5.0, transient=2000.0)
    x = path.points[:, 0]
    peaks = _peaks(x)
    assert len(peaks) >= 5
    assert np.ptp(x) > 0.05
    assert np.ptp(x[peaks]) < 1e-3
    assert np.ptp(np.diff(peaks)) <= 1
    gap = path.points[peaks[-1]] - path.points[peaks[0]]
    assert math.hypot(*gap) < 2e-2

    chaotic = gen_mackey_glass(6000, tau_delay=17.0)
    assert np.ptp(chaotic.points[_peaks(chaotic.points[:, 0]), 0]) > 0.05
