"""Leaky-integrator echo-state network.

State update::

    r' = (1 - alpha) r + alpha tanh(W_r r + W_in u + b)

with a linear readout ``O = W_out r``. Only ``W_out`` is trained.
"""

from typing import Optional

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from app.config import EsnParams
from app.exceptions import DegenerateReservoirError, UntrainedReadoutError
from app.logger import logger


class EsnWeights(BaseModel):
    """Reservoir matrices; ``w_out`` stays None until the readout is trained."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    w_r: np.ndarray
    w_in: np.ndarray
    b: np.ndarray
    w_out: Optional[np.ndarray] = None

    @property
    def n_r(self) -> int:
        return self.w_r.shape[0]

    @property
    def is_trained(self) -> bool:
        return self.w_out is not None


class EsnState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    r: np.ndarray

    @classmethod
    def zeros(cls, n_r: int) -> "EsnState":
        return cls(r=np.zeros(n_r))


def spectral_radius(w: np.ndarray) -> float:
    return float(np.max(np.abs(scipy.linalg.eigvals(w))))


@retry(
    stop=stop_after_attempt(10),
    retry=retry_if_exception_type(DegenerateReservoirError),
    reraise=True,
)
def _draw_recurrent(params: EsnParams, rng: np.random.Generator) -> np.ndarray:
    n = params.n_r
    mask = rng.random((n, n)) < params.p
    w = np.where(mask, rng.uniform(-1.0, 1.0, size=(n, n)), 0.0)
    radius = spectral_radius(w)
    if radius == 0.0:
        logger.warning("Recurrent matrix draw has zero spectral radius, redrawing")
        raise DegenerateReservoirError("Recurrent matrix has zero spectral radius")
    return w * (params.rho / radius)


def init_reservoir(
    params: EsnParams, rng: Optional[np.random.Generator] = None
) -> EsnWeights:
    """Draw reservoir weights.

    W_r is sparse with link probability ``p`` and uniform [-1, 1] entries,
    rescaled to spectral radius ``rho``; W_in is uniform in [-gamma, gamma]
    and b uniform in [-w_b, w_b]. A degenerate draw is repeated from the same
    generator stream.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    w_r = _draw_recurrent(params, rng)
    w_in = rng.uniform(-params.gamma, params.gamma, size=(params.n_r, params.dim_in))
    b = rng.uniform(-params.w_b, params.w_b, size=params.n_r)
    logger.debug(
        f"Initialized reservoir n_r={params.n_r}, density={np.count_nonzero(w_r) / w_r.size:.3f}"
    )
    return EsnWeights(w_r=w_r, w_in=w_in, b=b)


def leaky_step(
    w: EsnWeights, r: np.ndarray, u: np.ndarray, alpha: float
) -> np.ndarray:
    return (1.0 - alpha) * r + alpha * np.tanh(w.w_r @ r + w.w_in @ u + w.b)


def update_state(
    w: EsnWeights, s: EsnState, input: np.ndarray, alpha: float
) -> EsnState:
    input = np.asarray(input, dtype=float)
    if not np.all(np.isfinite(input)):
        raise ValueError("Reservoir input must be finite")
    return EsnState(r=leaky_step(w, s.r, input, alpha))


def readout(w: EsnWeights, s: EsnState) -> np.ndarray:
    if w.w_out is None:
        raise UntrainedReadoutError("Readout has not been trained")
    return w.w_out @ s.r


def reset_state(s: EsnState) -> EsnState:
    return EsnState.zeros(s.r.shape[0])


def harvest_states(w: EsnWeights, alpha: float, inputs: np.ndarray) -> np.ndarray:
    """Drive a zeroed reservoir through ``inputs`` (dim_in x T).

    Returns the n_r x T matrix of states after each update.
    """
    drive = w.w_in @ inputs + w.b[:, None]
    states = np.empty((w.n_r, inputs.shape[1]))
    r = np.zeros(w.n_r)
    for t in range(inputs.shape[1]):
        r = (1.0 - alpha) * r + alpha * np.tanh(w.w_r @ r + drive[:, t])
        states[:, t] = r
    return states
