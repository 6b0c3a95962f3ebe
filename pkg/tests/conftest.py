import numpy as np
import pytest

from app.config import ArmParams, EsnParams, TrackConfig, TrainConfig
from app.reservoir.controller import EsnController
from app.training.trainer import fit_controller


@pytest.fixture
def arm() -> ArmParams:
    """Nominal arm: unit masses, half-meter links."""
    return ArmParams()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_esn() -> EsnParams:
    return EsnParams(n_r=40, seed=7)


@pytest.fixture(scope="session")
def small_train() -> TrainConfig:
    return TrainConfig(episode_len=1500, total_len=6000, washout=50, seed=3)


@pytest.fixture(scope="session")
def small_controller(small_esn, small_train) -> EsnController:
    """A quickly trained controller; not accurate, but fully functional."""
    return fit_controller(ArmParams(), small_train, small_esn)


@pytest.fixture
def short_track() -> TrackConfig:
    return TrackConfig(test_len=300, bridge_len=50, seed=11)
