import os
from typing import Callable, Dict

import pytest

from app.config import PROJECT_ROOT, ExperimentConfig, load_experiment_config
from app.reservoir.controller import EsnController
from app.trajectory.base import ReferenceSeries
from app.trajectory.factory import TrajectoryFactory
from app.trajectory.workspace import derive_reference_series
from app.training.trainer import fit_controller


DESK_CONFIG = PROJECT_ROOT / "config" / "config.example.toml"


@pytest.fixture(scope="session")
def workers() -> int:
    return os.cpu_count() or 1


@pytest.fixture(scope="session")
def desk() -> ExperimentConfig:
    """The documented desk-scale experiment file."""
    return load_experiment_config(DESK_CONFIG)


@pytest.fixture(scope="session")
def desk_controller(desk, workers) -> EsnController:
    train = desk.train_config().model_copy(update={"workers": workers})
    return fit_controller(desk.arm, train, desk.esn)


@pytest.fixture(scope="session")
def reference(desk) -> Callable[[str], ReferenceSeries]:
    """Built-in references long enough for a full scored run plus the bridge."""
    cache: Dict[str, ReferenceSeries] = {}
    n_steps = desk.tracking.test_len + 1

    def build(name: str) -> ReferenceSeries:
        if name not in cache:
            path = TrajectoryFactory.build(
                desk.trajectory, desk.arm, n_steps, desk.simulation.dt, name=name
            )
            cache[name] = derive_reference_series(path, desk.arm)
        return cache[name]

    return build
