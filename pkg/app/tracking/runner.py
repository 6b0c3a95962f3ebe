"""Closed-loop deployment of a trained controller.

At every step t the controller sees the (noisy) observation y(t) and the
desired next observation y_d(t+dt), returns u(t), the disturbance is added
and the plant advances to t+dt. The tracking error compares y(t+dt) with
y_d(t+dt); scoring starts once the bridge is over.
"""

import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.artifacts import load_columns, save_columns
from app.config import TrackConfig
from app.exceptions import NonFiniteStateError
from app.logger import logger
from app.plant.arm import PlantState, TorqueCommand, step
from app.plant.noise import apply_disturbance, observe, perturb_measurement
from app.seeding import derive_rng
from app.tracking.bridge import build_bridge
from app.tracking.metrics import score_window
from app.trajectory.base import ReferencePath, ReferenceSeries
from app.trajectory.workspace import derive_reference_series


class RunResult(BaseModel):
    """Logs and scores of one tracking run.

    Column k of every log is time k*dt (torques: the command applied over
    [k, k+1)). Observations in ``actual`` are the noise-free plant values.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str = "run"
    dt: float = 0.01
    actual: np.ndarray
    desired: np.ndarray
    torques: np.ndarray
    angles: np.ndarray
    accelerations: np.ndarray
    bridge_len: int = 0
    rmse_position: float
    rmse_full: float
    success: bool
    diverged: bool = False
    failure_step: Optional[int] = None
    failure_reason: Optional[str] = None

    @property
    def score_start(self) -> int:
        return self.bridge_len + 1

    @property
    def n_steps(self) -> int:
        return self.torques.shape[1]

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "rmse_position": self.rmse_position,
            "rmse_full": self.rmse_full,
            "success": self.success,
            "diverged": self.diverged,
            "failure_step": self.failure_step,
            "failure_reason": self.failure_reason,
            "bridge_len": self.bridge_len,
            "steps": self.n_steps,
        }


def _with_bridge(
    series: ReferenceSeries, cfg: TrackConfig, start: PlantState
) -> Tuple[ReferenceSeries, int]:
    """Bridge + reference re-derived as one continuous series on the deployment plant."""
    if series.source is None:
        return series, 0
    p = cfg.plant_params
    initial = (cfg.q1_init, cfg.q2_init)
    bridge = build_bridge((start.cx, start.cy), series, cfg.bridge_len, p, initial=initial)
    path = ReferencePath(
        points=np.vstack([bridge.source.points, series.source.points]),
        dt=series.dt,
        name=series.source.name,
    )
    return derive_reference_series(path, p, initial=initial), len(bridge)


def run_tracking(
    controller, cfg: TrackConfig, series: ReferenceSeries, name: Optional[str] = None
) -> RunResult:
    """Track ``series`` with ``controller`` on ``cfg.plant_params``.

    An untrained controller or a diverging plant gives a failed result
    rather than an exception; the logs then stop at the failure.

    Raises:
        BridgeError: if no bridge onto the reference exists.
    """
    p = cfg.plant_params
    name = name or (series.source.name if series.source is not None else "run")
    state = PlantState.from_angles(p, cfg.q1_init, cfg.q2_init)
    full, n_bridge = _with_bridge(series, cfg, state)

    test_len = min(cfg.test_len, len(full) - n_bridge - 1)
    if test_len < 1:
        raise ValueError(f"Reference '{name}' is too short to track")
    if test_len < cfg.test_len:
        logger.warning(
            f"Reference '{name}' allows {test_len} scored steps, fewer than test_len={cfg.test_len}"
        )
    n_steps = n_bridge + test_len

    desired = full.y_d[:, : n_steps + 1]
    actual = np.empty((4, n_steps + 1))
    angles = np.empty((2, n_steps + 1))
    accelerations = np.zeros((2, n_steps + 1))
    torques = np.empty((2, n_steps))
    actual[:, 0] = state.observation().as_array()
    angles[:, 0] = (state.q1, state.q2)

    if not controller.is_trained:
        logger.error(f"Run '{name}': controller readout is untrained; marking run failed")
        return RunResult(
            name=name,
            dt=cfg.dt,
            actual=actual[:, :1],
            desired=desired,
            torques=torques[:, :0],
            angles=angles[:, :1],
            accelerations=accelerations[:, :1],
            bridge_len=n_bridge,
            rmse_position=math.inf,
            rmse_full=math.inf,
            success=False,
            failure_step=0,
            failure_reason="untrained",
        )

    # noise.seed picks the realization within the run seed's streams
    realization = cfg.noise.seed
    meas_rng = derive_rng(cfg.seed, "tracking", "measurement", realization)
    dist_rng = derive_rng(cfg.seed, "tracking", "disturbance", realization)
    ref_rng = derive_rng(cfg.seed, "tracking", "reference", realization)

    controller.reset()
    done = n_steps
    failure_step, reason = None, None
    for t in range(n_steps):
        y = observe(state, cfg.noise, meas_rng).as_array()
        y_next = desired[:, t + 1]
        if cfg.noise_on_reference:
            y_next = perturb_measurement(y_next, cfg.noise.sigma_m, ref_rng)
        tau = controller.act(y, y_next)
        if not np.all(np.isfinite(tau)):
            done, failure_step, reason = t, t, "non-finite torque"
            break
        u = apply_disturbance(TorqueCommand(tau1=tau[0], tau2=tau[1]), cfg.noise, dist_rng)
        try:
            state = step(p, state, u, cfg.dt, step_index=t)
        except NonFiniteStateError:
            done, failure_step, reason = t, t, "non-finite state"
            break

        torques[:, t] = u.as_array()
        accelerations[:, t] = (state.qdd1, state.qdd2)
        actual[:, t + 1] = state.observation().as_array()
        angles[:, t + 1] = (state.q1, state.q2)
        if math.hypot(state.qd1, state.qd2) > cfg.divergence_bound:
            done, failure_step, reason = t + 1, t, "divergence"
            break

    diverged = failure_step is not None
    if not diverged:
        accelerations[:, n_steps] = accelerations[:, n_steps - 1]
    actual, angles = actual[:, : done + 1], angles[:, : done + 1]
    accelerations, torques = accelerations[:, : done + 1], torques[:, :done]

    rmse_position, rmse_full = score_window(actual, desired, n_bridge + 1)
    success = (not diverged) and rmse_position < cfg.success_threshold * p.reach
    if diverged:
        logger.warning(f"Run '{name}' failed at step {failure_step}: {reason}")
    logger.info(
        f"Run '{name}': rmse_position={rmse_position:.4g} m, rmse_full={rmse_full:.4g}, "
        f"success={success}"
    )
    return RunResult(
        name=name,
        dt=cfg.dt,
        actual=actual,
        desired=desired,
        torques=torques,
        angles=angles,
        accelerations=accelerations,
        bridge_len=n_bridge,
        rmse_position=rmse_position,
        rmse_full=rmse_full,
        success=success,
        diverged=diverged,
        failure_step=failure_step,
        failure_reason=reason,
    )


def save_run_log(result: RunResult, stem: Path, meta: Optional[Dict[str, Any]] = None) -> Path:
    arrays = {
        "actual": result.actual,
        "desired": result.desired,
        "torques": result.torques,
        "angles": result.angles,
        "accelerations": result.accelerations,
    }
    sidecar_meta = {"dt": result.dt, **result.summary(), **(meta or {})}
    return save_columns(stem, arrays, sidecar_meta)


def load_run_log(stem: Path) -> RunResult:
    arrays, meta = load_columns(stem)
    return RunResult(
        name=meta.get("name", Path(stem).name),
        dt=meta.get("dt", 0.01),
        bridge_len=meta.get("bridge_len", 0),
        rmse_position=meta["rmse_position"],
        rmse_full=meta["rmse_full"],
        success=meta["success"],
        diverged=meta.get("diverged", False),
        failure_step=meta.get("failure_step"),
        failure_reason=meta.get("failure_reason"),
        **arrays,
    )
