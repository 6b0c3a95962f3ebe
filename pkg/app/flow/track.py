from typing import Optional

from app.flow.base import ExperimentFlow, FlowOutcome
from app.plotting import plot_run
from app.reservoir.controller import EsnController
from app.schema import ExitCode
from app.tracking.runner import RunResult, run_tracking, save_run_log


def format_summary(result: RunResult) -> str:
    lines = [
        f"trajectory:     {result.name}",
        f"rmse_position:  {result.rmse_position:.6g} m",
        f"rmse_full:      {result.rmse_full:.6g}",
        f"success:        {result.success}",
        f"diverged:       {result.diverged}",
        f"bridge steps:   {result.bridge_len}",
        f"tracked steps:  {result.n_steps}",
    ]
    if result.failure_reason:
        lines.append(f"failure:        {result.failure_reason} at step {result.failure_step}")
    return "\n".join(lines) + "\n"


class TrackFlow(ExperimentFlow):
    """Track one reference with a stored controller."""

    trajectory: Optional[str] = None

    async def track(self, controller: EsnController, name: Optional[str] = None) -> RunResult:
        cfg = self.track_config()
        series = self.build_reference(cfg, name)
        result = await self.in_executor(run_tracking, controller, cfg, series)

        run_dir = self.run_dir
        stem = run_dir.path(f"run_{result.name}")
        save_run_log(result, stem, {"seed": cfg.seed})
        run_dir.path(f"summary_{result.name}.txt").write_text(format_summary(result))
        plot_run(stem, run_dir.path(f"run_{result.name}.svg"))
        return result

    async def execute(self) -> FlowOutcome:
        controller = self.load_controller()
        self.prepare()
        result = await self.track(controller, self.trajectory)
        failed = result.failure_reason is not None
        code = ExitCode.TRACKING_FAILURE if failed else ExitCode.SUCCESS
        return FlowOutcome(exit_code=code, summary=result.summary())
