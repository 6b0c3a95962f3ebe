"""Affine input encoding folded into the reservoir input weights.

The controller feeds the reservoir ``x = [y(t); y(t+dt)]``. With the
``increment`` encoding the next-step joint velocities are replaced by their
change over the step, and every channel is standardized on the training
inputs::

    e = (T x - mean) / std

Since ``W_in e + b = (W_in diag(1/std) T) x + (b - W_in (mean / std))`` the
encoding is folded into ``W_in`` and ``b`` once after training data has been
seen; the controller keeps consuming raw observations.
"""

from typing import Any, Dict

import numpy as np

from app.reservoir.esn import EsnWeights


# Channels with a smaller spread than this are left unscaled.
MIN_STD = 1e-12


def increment_transform(dim_obs: int = 4) -> np.ndarray:
    """T for [y; y_next] inputs: y_next velocity rows become y_next - y."""
    t = np.eye(2 * dim_obs)
    for row in range(2, dim_obs):
        t[dim_obs + row, row] = -1.0
    return t


class MomentAccumulator:
    """Per-channel running count, sum and sum of squares."""

    def __init__(self, dim: int):
        self.dim = dim
        self.count = 0
        self._sum = np.zeros(dim)
        self._sumsq = np.zeros(dim)

    def add(self, inputs: np.ndarray) -> "MomentAccumulator":
        """Add the columns of ``inputs`` (dim x T)."""
        if inputs.shape[0] != self.dim:
            raise ValueError(f"Expected {self.dim} rows, got {inputs.shape[0]}")
        self._sum += inputs.sum(axis=1)
        self._sumsq += np.einsum("ij,ij->i", inputs, inputs)
        self.count += inputs.shape[1]
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        self._sum += other._sum
        self._sumsq += other._sumsq
        self.count += other.count
        return self

    @property
    def mean(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.dim)
        return self._sum / self.count

    @property
    def std(self) -> np.ndarray:
        """Population standard deviation; 1 for constant or unseen channels."""
        if self.count == 0:
            return np.ones(self.dim)
        var = np.maximum(self._sumsq / self.count - self.mean**2, 0.0)
        std = np.sqrt(var)
        return np.where(std > MIN_STD, std, 1.0)


def fold_input_scaling(
    weights: EsnWeights, transform: np.ndarray, mean: np.ndarray, std: np.ndarray
) -> EsnWeights:
    """Weights that act on raw x exactly as ``weights`` act on the encoded input."""
    scaled = weights.w_in / std
    return weights.model_copy(
        update={"w_in": scaled @ transform, "b": weights.b - scaled @ mean}
    )


def encoding_metadata(kind: str, mean: np.ndarray, std: np.ndarray) -> Dict[str, Any]:
    return {"kind": kind, "mean": mean.tolist(), "std": std.tolist()}
