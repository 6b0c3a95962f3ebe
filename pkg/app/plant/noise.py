"""Disturbance and measurement-noise injection points.

Both draws are independent per component and per call. A zero amplitude
consumes no random numbers, so switching one source off never shifts the
stream of the other.
"""

import numpy as np

from app.config import NoiseConfig
from app.plant.arm import Observation, PlantState, TorqueCommand


def perturb_measurement(
    values: np.ndarray, sigma_m: float, rng: np.random.Generator
) -> np.ndarray:
    """x -> x + x * xi with xi ~ N(0, sigma_m^2)."""
    if sigma_m == 0:
        return values
    return values + values * rng.normal(0.0, sigma_m, size=values.shape)


def observe(s: PlantState, cfg: NoiseConfig, rng: np.random.Generator) -> Observation:
    y = perturb_measurement(
        np.array([s.cx, s.cy, s.qd1, s.qd2]), cfg.sigma_m, rng
    )
    return Observation(cx=y[0], cy=y[1], qd1=y[2], qd2=y[3])


def apply_disturbance(
    u: TorqueCommand, cfg: NoiseConfig, rng: np.random.Generator
) -> TorqueCommand:
    """tau -> tau + xi with xi ~ N(0, sigma_d^2)."""
    if cfg.sigma_d == 0:
        return u
    xi = rng.normal(0.0, cfg.sigma_d, size=2)
    return TorqueCommand(tau1=u.tau1 + xi[0], tau2=u.tau2 + xi[1])
