"""Desk-scale tracking of the chaotic references, gated like the rest of the suite."""

import os

import pytest

from app.plotting import plot_run
from app.tracking.metrics import rmse
from app.tracking.runner import load_run_log, run_tracking, save_run_log


pytestmark = pytest.mark.skipif(
    os.environ.get("RCTRACK_ACCEPTANCE") != "1",
    reason="set RCTRACK_ACCEPTANCE=1 to run the desk-scale suite",
)


@pytest.mark.parametrize("name", ["lorenz", "mackey_glass"])
def test_chaotic_tracking_with_overlay(desk_controller, desk, reference, tmp_path, name):
    """Tests chaotic tracking below 8 cm and writes the reference/tracked overlay."""
    result = run_tracking(
        desk_controller.model_copy(), desk.track_config(), reference(name), name=name
    )
    assert not result.diverged
    assert result.rmse_position < 0.08

    stem = tmp_path / f"run_{name}"
    save_run_log(result, stem)
    out = plot_run(stem, tmp_path / f"run_{name}.svg")
    assert out.stat().st_size > 0
    assert "<svg" in out.read_text()
    assert rmse(load_run_log(stem)) == pytest.approx(result.rmse_position)
