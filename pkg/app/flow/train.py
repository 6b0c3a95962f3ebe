import json
import time

from app.flow.base import CONTROLLER_FILE, ExperimentFlow, FlowOutcome
from app.logger import logger
from app.plotting import plot_episode
from app.reservoir.controller import EsnController
from app.reservoir.storage import save_controller
from app.training.episodes import run_episode, save_episode_log
from app.training.trainer import episode_rng, fit_controller


class TrainFlow(ExperimentFlow):
    """Train the inverse-model controller and write it with its report."""

    async def train(self) -> EsnController:
        exp = self.experiment
        tc = exp.train_config().model_copy(update={"workers": self.workers})
        started = time.perf_counter()
        controller = await self.in_executor(fit_controller, exp.arm, tc, exp.esn)
        wall_time = time.perf_counter() - started

        run_dir = self.run_dir
        save_controller(controller, run_dir.path(CONTROLLER_FILE))
        report = {**controller.metadata["report"], "wall_time_s": round(wall_time, 3)}
        run_dir.path("training_report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True)
        )

        # first episode again, kept as a sample of the training drive
        sample = run_episode(exp.arm, tc, episode_rng(tc, 0))
        stem = run_dir.path("episode_0")
        save_episode_log(sample, stem, {"dt": tc.dt, "index": 0})
        plot_episode(stem, run_dir.path("episode_0.svg"), dt=tc.dt)
        return controller

    async def execute(self) -> FlowOutcome:
        self.prepare()
        controller = await self.train()
        report = controller.metadata["report"]
        logger.info(f"Training finished: {report}")
        return FlowOutcome(summary=report)
