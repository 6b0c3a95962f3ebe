from app.tracking.bridge import build_bridge, cosine_ramp
from app.tracking.metrics import full_rmse, position_rmse, rmse, rmse_components
from app.tracking.runner import RunResult, load_run_log, run_tracking, save_run_log
from app.tracking.sweep import (
    SweepCell,
    SweepResult,
    success_rate,
    sweep_arm_lengths,
    sweep_masses,
    sweep_noise,
    sweep_success,
)


__all__ = [
    "RunResult",
    "SweepCell",
    "SweepResult",
    "build_bridge",
    "cosine_ramp",
    "full_rmse",
    "load_run_log",
    "position_rmse",
    "rmse",
    "rmse_components",
    "run_tracking",
    "save_run_log",
    "success_rate",
    "sweep_arm_lengths",
    "sweep_masses",
    "sweep_noise",
    "sweep_success",
]
