"""Stochastic-torque training episodes.

Each episode starts from uniformly random joint angles with zero joint
velocities and accelerations, and drives the noise-free plant with smoothed
uniform torques.
"""

import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.ndimage import gaussian_filter1d
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from app.artifacts import load_columns, save_columns
from app.config import ArmParams, TrainConfig
from app.exceptions import NonFiniteStateError
from app.logger import logger
from app.plant.arm import PlantState, TorqueCommand, step


class EpisodeLog(BaseModel):
    """Signals of one episode, one column per time step.

    torques: 2 x T, states: 8 x T ([cx, cy, q1, q2, qd1, qd2, qdd1, qdd2]),
    observations: 4 x T ([cx, cy, qd1, qd2]).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    torques: np.ndarray
    states: np.ndarray
    observations: np.ndarray
    discarded: int = 0

    @model_validator(mode="after")
    def _check_columns(self) -> "EpisodeLog":
        n = self.torques.shape[1]
        if self.states.shape[1] != n or self.observations.shape[1] != n:
            raise ValueError("Episode signals must have equal column counts")
        return self

    @property
    def length(self) -> int:
        return self.torques.shape[1]


def smooth_signal(raw: np.ndarray, smooth_sigma: float) -> np.ndarray:
    """Row-wise unit-sum Gaussian filter, truncated at 4 sigma, reflective ends."""
    if smooth_sigma == 0:
        return raw
    return gaussian_filter1d(raw, smooth_sigma, axis=-1, mode="reflect", truncate=4.0)


def random_torque_signal(
    length: int, tau_max: float, smooth_sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """2 x length smoothed uniform torques in [-tau_max, tau_max]."""
    if length <= 0:
        raise ValueError(f"Signal length must be positive, got {length}")
    raw = rng.uniform(-tau_max, tau_max, size=(2, length))
    return smooth_signal(raw, smooth_sigma)


def _simulate_episode(
    p: ArmParams,
    cfg: TrainConfig,
    rng: np.random.Generator,
    torques: Optional[np.ndarray],
) -> EpisodeLog:
    q1 = rng.uniform(0.0, 2.0 * math.pi)
    q2 = rng.uniform(-math.pi, math.pi)
    if torques is None:
        torques = random_torque_signal(
            cfg.episode_len, cfg.tau_max, cfg.smooth_sigma, rng
        )
    n = torques.shape[1]

    states = np.empty((8, n))
    observations = np.empty((4, n))
    s = PlantState.from_angles(p, q1, q2)
    for t in range(n):
        u = TorqueCommand(tau1=torques[0, t], tau2=torques[1, t])
        nxt = step(p, s, u, cfg.dt, step_index=t)
        # nxt carries the acceleration evaluated at time t
        states[:, t] = (s.cx, s.cy, s.q1, s.q2, s.qd1, s.qd2, nxt.qdd1, nxt.qdd2)
        observations[:, t] = (s.cx, s.cy, s.qd1, s.qd2)
        s = nxt
    return EpisodeLog(torques=torques, states=states, observations=observations)


def run_episode(
    p: ArmParams,
    cfg: TrainConfig,
    rng: np.random.Generator,
    torques: Optional[np.ndarray] = None,
) -> EpisodeLog:
    """Simulate one episode; non-finite runs are discarded and redrawn.

    ``torques`` replaces the random drive (2 x T) when given.
    """
    for attempt in Retrying(
        stop=stop_after_attempt(cfg.max_redraws),
        retry=retry_if_exception_type(NonFiniteStateError),
        reraise=True,
    ):
        with attempt:
            log = _simulate_episode(p, cfg, rng, torques)
    discarded = attempt.retry_state.attempt_number - 1
    if discarded:
        logger.warning(f"Episode redrawn after {discarded} non-finite attempt(s)")
    return log.model_copy(update={"discarded": discarded})


def save_episode_log(log: EpisodeLog, stem: Path, meta: Dict[str, Any]) -> Path:
    return save_columns(
        stem,
        {
            "torques": log.torques,
            "states": log.states,
            "observations": log.observations,
        },
        {**meta, "discarded": log.discarded},
    )


def load_episode_log(stem: Path) -> EpisodeLog:
    arrays, meta = load_columns(stem)
    return EpisodeLog(**arrays, discarded=meta.get("discarded", 0))
