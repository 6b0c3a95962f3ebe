import asyncio
import os
from abc import ABC, abstractmethod
from functools import partial
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, Field

from app.artifacts import RunDirectory
from app.config import ExperimentConfig, TrackConfig
from app.exceptions import ConfigError
from app.logger import logger
from app.reservoir.controller import EsnController
from app.reservoir.storage import load_controller
from app.schema import ExitCode
from app.seeding import derive_rng, derive_seed
from app.trajectory.base import ReferenceSeries
from app.trajectory.factory import TrajectoryFactory
from app.trajectory.workspace import derive_reference_series


CONTROLLER_FILE = "controller.rctrack"


class FlowOutcome(BaseModel):
    exit_code: ExitCode = ExitCode.SUCCESS
    summary: Dict[str, Any] = Field(default_factory=dict)


def resolve_seeds(experiment: ExperimentConfig) -> Tuple[ExperimentConfig, Dict[str, int]]:
    """Derive every module seed from the master seed."""
    master = experiment.seed
    seeds = {
        "master": master,
        "esn": derive_seed(master, "esn"),
        "training": derive_seed(master, "training"),
        "trajectory": derive_seed(master, "trajectory"),
        "tracking": derive_seed(master, "tracking"),
        "sweep": derive_seed(master, "sweep"),
    }
    resolved = experiment.model_copy(
        update={
            "esn": experiment.esn.model_copy(update={"seed": seeds["esn"]}),
            "training": experiment.training.model_copy(update={"seed": seeds["training"]}),
        }
    )
    return resolved, seeds


def resolve_workers(requested: int) -> int:
    return requested if requested > 0 else (os.cpu_count() or 1)


class ExperimentFlow(BaseModel, ABC):
    """Base class for the experiment commands.

    A flow owns one output directory; before any computation it records the
    resolved configuration and the derived seeds there.
    """

    experiment: ExperimentConfig
    out_dir: Path
    controller_path: Optional[Path] = None
    workers: int = 1
    seeds: Dict[str, int] = Field(default_factory=dict)

    class Config:
        arbitrary_types_allowed = True

    def __init__(self, experiment: ExperimentConfig, out_dir: Path, **data):
        resolved, seeds = resolve_seeds(experiment)
        data["workers"] = resolve_workers(data.get("workers") or experiment.workers)
        super().__init__(experiment=resolved, out_dir=Path(out_dir), seeds=seeds, **data)

    @property
    def name(self) -> str:
        return self.__class__.__name__.removesuffix("Flow").lower()

    @property
    def run_dir(self) -> RunDirectory:
        return RunDirectory(self.out_dir)

    def prepare(self) -> RunDirectory:
        run_dir = self.run_dir.prepare()
        run_dir.write_resolved_config(self.experiment.model_dump(mode="json"))
        run_dir.write_manifest(self.name, self.seeds)
        logger.info(f"Output directory: {run_dir.root}")
        return run_dir

    def track_config(self) -> TrackConfig:
        return self.experiment.track_config().model_copy(
            update={"seed": self.seeds["tracking"]}
        )

    def load_controller(self) -> EsnController:
        path = self.controller_path
        if path is None:
            path = Path(self.experiment.output_dir) / "train" / CONTROLLER_FILE
            if not path.exists():
                raise ConfigError(
                    "No controller given; pass --controller or run the train command first"
                )
        return load_controller(path)

    def build_reference(
        self, cfg: TrackConfig, name: Optional[str] = None
    ) -> ReferenceSeries:
        path = TrajectoryFactory.build(
            self.experiment.trajectory,
            cfg.plant_params,
            cfg.test_len + 1,
            cfg.dt,
            rng=derive_rng(self.seeds["trajectory"], name or self.experiment.trajectory.name),
            name=name,
        )
        return derive_reference_series(path, cfg.plant_params)

    @staticmethod
    async def in_executor(func, *args, **kwargs):
        """Run a blocking computation off the event loop."""
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, partial(func, *args, **kwargs))

    @abstractmethod
    async def execute(self) -> FlowOutcome:
        """Execute the flow"""
