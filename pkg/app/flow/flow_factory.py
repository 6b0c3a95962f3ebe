from enum import Enum
from pathlib import Path

from app.config import ExperimentConfig
from app.flow.base import ExperimentFlow
from app.flow.demo import DemoFlow
from app.flow.sweep import SweepFlow
from app.flow.track import TrackFlow
from app.flow.train import TrainFlow


class FlowType(str, Enum):
    TRAIN = "train"
    TRACK = "track"
    SWEEP = "sweep"
    DEMO = "demo"


class FlowFactory:
    """Factory for creating the experiment flow behind each command"""

    @staticmethod
    def create_flow(
        flow_type: FlowType,
        experiment: ExperimentConfig,
        out_dir: Path,
        **kwargs,
    ) -> ExperimentFlow:
        flows = {
            FlowType.TRAIN: TrainFlow,
            FlowType.TRACK: TrackFlow,
            FlowType.SWEEP: SweepFlow,
            FlowType.DEMO: DemoFlow,
        }

        flow_class = flows.get(flow_type)
        if not flow_class:
            raise ValueError(f"Unknown flow type: {flow_type}")

        return flow_class(experiment, out_dir, **kwargs)
