from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from app.config import ArmParams, EsnParams
from app.exceptions import UntrainedReadoutError
from app.reservoir.esn import EsnWeights, leaky_step


class EsnController(BaseModel):
    """Trained inverse-model controller.

    Maps the current observation y(t) and the wanted next observation
    y(t+dt) onto the torque u(t). The reservoir state is internal and is only
    cleared by :meth:`reset`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: EsnParams
    weights: EsnWeights
    arm: ArmParams = Field(default_factory=ArmParams, description="Training plant")
    dt: float = 0.01
    metadata: Dict[str, Any] = Field(default_factory=dict)

    _r: Optional[np.ndarray] = PrivateAttr(default=None)

    @property
    def is_trained(self) -> bool:
        return self.weights.is_trained

    @property
    def state(self) -> np.ndarray:
        if self._r is None:
            self.reset()
        return self._r

    def reset(self) -> None:
        self._r = np.zeros(self.params.n_r)

    def act(self, y: np.ndarray, y_next: np.ndarray) -> np.ndarray:
        """Advance the reservoir with [y; y_next] and return the torque."""
        if not self.is_trained:
            raise UntrainedReadoutError("Controller readout has not been trained")
        u = np.concatenate([y, y_next])
        self._r = leaky_step(self.weights, self.state, u, self.params.alpha)
        return self.weights.w_out @ self._r
