from app.flow.base import ExperimentFlow, FlowOutcome
from app.logger import logger
from app.plotting import plot_heatmap
from app.schema import SweepKind
from app.tracking.sweep import (
    SweepResult,
    sweep_arm_lengths,
    sweep_masses,
    sweep_noise,
    sweep_success,
)


class SweepFlow(ExperimentFlow):
    """Noise, arm-length, mass or success-rate sweep with CSV and heatmap output.

    Finished runs are logged to ``progress.jsonl`` in the output directory;
    rerunning the same command there picks up where it stopped.
    """

    kind: SweepKind = SweepKind.NOISE

    async def sweep(self) -> SweepResult:
        exp, grids = self.experiment, self.experiment.sweep
        controller = self.load_controller()
        # references are built for the nominal arm; plant sweeps adapt them per cell
        cfg = self.track_config().model_copy(update={"plant_params": exp.arm})
        series = self.build_reference(cfg)
        common = dict(
            cfg=cfg,
            seed=self.seeds["sweep"],
            workers=self.workers,
            progress_path=self.run_dir.path("progress.jsonl"),
        )
        runners = {
            SweepKind.NOISE: (
                sweep_noise, grids.sigma_d_grid, grids.sigma_m_grid, grids.realizations
            ),
            SweepKind.LENGTHS: (
                sweep_arm_lengths, grids.l1_grid, grids.l2_grid, grids.realizations
            ),
            SweepKind.MASSES: (
                sweep_masses, grids.m1_grid, grids.m2_grid, grids.realizations
            ),
            SweepKind.SUCCESS: (
                sweep_success, grids.sigma_d_grid, grids.sigma_m_grid, grids.trials
            ),
        }
        run, x_grid, y_grid, n = runners[self.kind]
        return await run(controller, series, x_grid, y_grid, n, **common)

    async def execute(self) -> FlowOutcome:
        self.prepare()
        result = await self.sweep()
        csv_path = result.write_csv(self.run_dir.path(f"sweep_{self.kind.value}.csv"))
        column = "success_rate" if self.kind == SweepKind.SUCCESS else "mean_rmse"
        plot_heatmap(
            csv_path, self.run_dir.path(f"sweep_{self.kind.value}.svg"), column, kind=self.kind
        )
        logger.info(f"Sweep table written to {csv_path}")
        return FlowOutcome(
            summary={
                "kind": self.kind.value,
                "cells": len(result.cells),
                "infeasible": sum(c.infeasible for c in result.cells),
                "failed_runs": sum(c.n_failed for c in result.cells),
            }
        )
