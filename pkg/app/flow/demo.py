from typing import List

import pandas as pd

from app.flow.base import ExperimentFlow, FlowOutcome
from app.flow.track import TrackFlow
from app.flow.train import TrainFlow
from app.logger import logger
from app.schema import ExitCode
from app.trajectory.factory import TrajectoryType


DEMO_TRAJECTORIES: List[TrajectoryType] = [
    TrajectoryType.CIRCLE,
    TrajectoryType.FIGURE_EIGHT,
    TrajectoryType.LORENZ,
    TrajectoryType.MACKEY_GLASS,
]


class DemoFlow(ExperimentFlow):
    """Train (or reuse) a controller and track the four showcase references."""

    async def execute(self) -> FlowOutcome:
        self.prepare()
        shared = dict(
            experiment=self.experiment,
            out_dir=self.out_dir,
            controller_path=self.controller_path,
            workers=self.workers,
        )
        if self.controller_path is None:
            controller = await TrainFlow(**shared).train()
        else:
            controller = self.load_controller()

        tracker = TrackFlow(**shared)
        rows = []
        for kind in DEMO_TRAJECTORIES:
            result = await tracker.track(controller, kind.value)
            rows.append(result.summary())

        table = pd.DataFrame(rows)
        table.to_csv(self.run_dir.path("summary.csv"), index=False, float_format="%.12g")
        logger.info("Demo summary:\n" + table.to_string(index=False))
        failed = any(row["failure_reason"] is not None for row in rows)
        return FlowOutcome(
            exit_code=ExitCode.TRACKING_FAILURE if failed else ExitCode.SUCCESS,
            summary={"runs": rows},
        )
