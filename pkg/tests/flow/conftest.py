import pytest
import pytest_asyncio

from app.config import parse_experiment_config
from app.flow.base import CONTROLLER_FILE
from app.flow.flow_factory import FlowFactory, FlowType
from app.schema import ExitCode


@pytest.fixture
def raw_config(tmp_path) -> dict:
    """A tiny experiment: two short training episodes, 80 scored steps."""
    return {
        "seed": 7,
        "output_dir": str(tmp_path / "runs"),
        "workers": 1,
        "simulation": {"dt": 0.01},
        "esn": {"n_r": 20},
        "training": {"tau_max": 1.0, "episode_len": 400, "total_len": 800, "washout": 20},
        "tracking": {"test_len": 80, "bridge_len": 20},
        "trajectory": {"name": "circle"},
        "sweep": {
            "sigma_d_grid": [0.0, 0.1],
            "sigma_m_grid": [0.0],
            "l1_grid": [0.5],
            "l2_grid": [0.5],
            "m1_grid": [1.0],
            "m2_grid": [1.0],
            "realizations": 1,
            "trials": 1,
        },
    }


@pytest.fixture
def experiment(raw_config):
    return parse_experiment_config(raw_config)


@pytest_asyncio.fixture
async def trained(experiment, tmp_path):
    """Run the train flow once and return the controller path."""
    out = tmp_path / "runs" / "train"
    flow = FlowFactory.create_flow(FlowType.TRAIN, experiment, out)
    outcome = await flow.execute()
    assert outcome.exit_code == ExitCode.SUCCESS
    return out / CONTROLLER_FILE
