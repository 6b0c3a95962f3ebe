import json

import pandas as pd
import pytest

from app.config import parse_experiment_config
from app.exceptions import ConfigError
from app.flow.base import CONTROLLER_FILE, resolve_seeds
from app.flow.flow_factory import FlowFactory, FlowType
from app.reservoir.storage import load_controller
from app.schema import ExitCode, SweepKind


def test_seeds_are_derived_from_the_master(experiment):
    """Tests that module seeds follow the master seed only."""
    resolved, seeds = resolve_seeds(experiment)
    _, seeds_again = resolve_seeds(experiment.model_copy(update={"seed": 7}))
    assert seeds == seeds_again
    assert resolved.esn.seed == seeds["esn"]
    assert resolved.training.seed == seeds["training"]
    assert len(set(seeds.values())) == len(seeds)


def test_missing_required_field_is_a_config_error(raw_config):
    """Tests that [simulation].dt and tau_max must be given."""
    raw = dict(raw_config)
    del raw["simulation"]
    with pytest.raises(ConfigError, match="simulation"):
        parse_experiment_config(raw)
    raw = raw_config
    del raw["training"]["tau_max"]
    with pytest.raises(ConfigError, match="tau_max"):
        parse_experiment_config(raw)


def test_unknown_keys_are_rejected(raw_config):
    """Tests that misspelled settings are configuration errors."""
    raw_config["tracking"]["sigma_dd"] = 0.1
    with pytest.raises(ConfigError):
        parse_experiment_config(raw_config)


@pytest.mark.asyncio
async def test_train_flow_writes_its_artifacts(trained):
    """Tests the files of a training run."""
    run_dir = trained.parent
    controller = load_controller(trained)
    assert controller.is_trained
    report = json.loads((run_dir / "training_report.json").read_text())
    assert report["n_episodes"] == 2
    assert "wall_time_s" in report
    for name in ("resolved_config.toml", "manifest.json", "episode_0.bin", "episode_0.svg"):
        assert (run_dir / name).exists(), name
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["command"] == "train"
    assert manifest["seeds"]["master"] == 7


@pytest.mark.asyncio
async def test_track_flow(experiment, trained, tmp_path):
    """Tests a tracking run with a stored controller."""
    out = tmp_path / "track"
    flow = FlowFactory.create_flow(FlowType.TRACK, experiment, out, controller_path=trained)
    outcome = await flow.execute()
    assert outcome.exit_code in (ExitCode.SUCCESS, ExitCode.TRACKING_FAILURE)
    assert outcome.summary["name"] == "circle"
    for name in ("run_circle.bin", "run_circle.json", "summary_circle.txt", "run_circle.svg"):
        assert (out / name).exists(), name
    assert "rmse_position" in (out / "summary_circle.txt").read_text()


@pytest.mark.asyncio
async def test_track_flow_finds_the_trained_controller(experiment, trained, tmp_path):
    """Tests that the default controller location is <output_dir>/train."""
    flow = FlowFactory.create_flow(FlowType.TRACK, experiment, tmp_path / "track")
    outcome = await flow.execute()
    assert outcome.summary["steps"] > 0


@pytest.mark.asyncio
async def test_track_flow_without_controller(experiment, tmp_path):
    """Tests that tracking before training is a configuration error."""
    flow = FlowFactory.create_flow(FlowType.TRACK, experiment, tmp_path / "track")
    with pytest.raises(ConfigError):
        await flow.execute()


@pytest.mark.asyncio
async def test_noise_sweep_flow(experiment, trained, tmp_path):
    """Tests that the sweep flow writes its table, heatmap and progress log."""
    out = tmp_path / "sweep"
    flow = FlowFactory.create_flow(
        FlowType.SWEEP, experiment, out, controller_path=trained, kind=SweepKind.NOISE
    )
    outcome = await flow.execute()
    assert outcome.summary["cells"] == 2
    table = pd.read_csv(out / "sweep_noise.csv")
    assert list(table["sigma_d"]) == [0.0, 0.1]
    assert (out / "sweep_noise.svg").exists()
    assert (out / "progress.jsonl").exists()


@pytest.mark.asyncio
async def test_demo_flow_with_stored_controller(experiment, trained, tmp_path):
    """Tests that the demo tracks the four showcase references."""
    out = tmp_path / "demo"
    flow = FlowFactory.create_flow(FlowType.DEMO, experiment, out, controller_path=trained)
    await flow.execute()
    table = pd.read_csv(out / "summary.csv")
    assert list(table["name"]) == ["circle", "figure_eight", "lorenz", "mackey_glass"]
    assert not (out / CONTROLLER_FILE).exists()
