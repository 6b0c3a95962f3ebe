import math

import numpy as np
import pytest

from app.tracking.metrics import full_rmse, position_rmse, rmse, rmse_components, score_window
from app.tracking.runner import load_run_log, run_tracking, save_run_log
from app.trajectory.periodic import gen_circle
from app.trajectory.workspace import derive_reference_series


def test_constant_offset():
    """Tests that a constant (0.3, 0.4) offset scores 0.5 m."""
    desired = np.random.default_rng(0).uniform(-1, 1, (4, 100))
    actual = desired.copy()
    actual[0] += 0.3
    actual[1] += 0.4
    assert position_rmse(actual, desired) == pytest.approx(0.5, abs=1e-12)
    assert full_rmse(actual, desired) == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(rmse_components(actual, desired), [0.3, 0.4, 0.0, 0.0], atol=1e-12)


def test_full_rmse_includes_velocities():
    """Tests that joint-velocity errors only enter the full measure."""
    desired = np.zeros((4, 10))
    actual = np.zeros((4, 10))
    actual[2] = 1.0
    assert position_rmse(actual, desired) == 0.0
    assert full_rmse(actual, desired) == pytest.approx(1.0)


def test_perfect_tracking_scores_zero():
    """Tests identical logs."""
    y = np.ones((4, 7))
    assert position_rmse(y, y) == 0.0
    assert full_rmse(y, y) == 0.0


def test_empty_logs_score_nan():
    """Tests the empty scoring window."""
    empty = np.empty((4, 0))
    assert math.isnan(position_rmse(empty, empty))
    assert math.isnan(full_rmse(empty, empty))
    assert np.all(np.isnan(rmse_components(empty, empty)))


def test_rmse_is_recomputed_from_a_loaded_run(small_controller, arm, short_track, tmp_path):
    """Tests that rmse() scores the logs after the bridge, matching the runner."""
    series = derive_reference_series(gen_circle(400, radius=0.6), arm)
    result = run_tracking(small_controller.model_copy(), short_track, series)
    save_run_log(result, tmp_path / "run_circle")
    loaded = load_run_log(tmp_path / "run_circle")

    start = result.bridge_len + 1
    n = loaded.actual.shape[1]
    expected = position_rmse(loaded.actual[:, start:], loaded.desired[:, start:n])
    assert rmse(loaded) == pytest.approx(expected, rel=1e-12)
    assert rmse(loaded) == pytest.approx(result.rmse_position, rel=1e-12)

    # a tampered summary value does not leak into the recomputed score
    stale = loaded.model_copy(update={"rmse_position": -1.0})
    assert rmse(stale) == pytest.approx(expected, rel=1e-12)


def test_score_window_edges():
    """Tests an empty window and a desired log that runs past the actual one."""
    y = np.zeros((4, 5))
    assert score_window(y, y, 5) == (math.inf, math.inf)
    assert score_window(y, np.ones((4, 9)), 0) == pytest.approx((math.sqrt(2.0), 2.0))
