"""Ridge-regression readout.

    W_out = Y X^T (X X^T + beta I)^-1

The two Gram products are accumulated incrementally so the harvested states
never have to be held in memory at once. Accumulation uses Neumaier
compensated summation, which keeps the result independent of episode order
to well below the regression tolerance.
"""

import numpy as np
import scipy.linalg

from app.exceptions import ReadoutTrainingError


def _neumaier_add(total: np.ndarray, comp: np.ndarray, value: np.ndarray) -> None:
    t = total + value
    comp += np.where(
        np.abs(total) >= np.abs(value), (total - t) + value, (value - t) + total
    )
    total[...] = t


class GramAccumulator:
    """Streaming sums of X X^T and Y X^T."""

    def __init__(self, n_r: int, dim_out: int):
        self.n_r = n_r
        self.dim_out = dim_out
        self.count = 0
        self._xx = np.zeros((n_r, n_r))
        self._xx_c = np.zeros((n_r, n_r))
        self._yx = np.zeros((dim_out, n_r))
        self._yx_c = np.zeros((dim_out, n_r))
        self._yy = np.zeros((dim_out, dim_out))
        self._yy_c = np.zeros((dim_out, dim_out))

    def add(self, states: np.ndarray, targets: np.ndarray) -> "GramAccumulator":
        """Add time-aligned columns (states: n_r x T, targets: dim_out x T)."""
        if states.shape[1] != targets.shape[1]:
            raise ValueError(
                f"Column mismatch: {states.shape[1]} states vs {targets.shape[1]} targets"
            )
        _neumaier_add(self._xx, self._xx_c, states @ states.T)
        _neumaier_add(self._yx, self._yx_c, targets @ states.T)
        _neumaier_add(self._yy, self._yy_c, targets @ targets.T)
        self.count += states.shape[1]
        return self

    def merge(self, other: "GramAccumulator") -> "GramAccumulator":
        _neumaier_add(self._xx, self._xx_c, other._xx)
        _neumaier_add(self._xx, self._xx_c, other._xx_c)
        _neumaier_add(self._yx, self._yx_c, other._yx)
        _neumaier_add(self._yx, self._yx_c, other._yx_c)
        _neumaier_add(self._yy, self._yy_c, other._yy)
        _neumaier_add(self._yy, self._yy_c, other._yy_c)
        self.count += other.count
        return self

    @property
    def gram(self) -> np.ndarray:
        return self._xx + self._xx_c

    @property
    def cross(self) -> np.ndarray:
        return self._yx + self._yx_c

    def target_rms(self) -> float:
        """sqrt(mean_t |y(t)|^2), the error of an all-zero readout."""
        if self.count == 0:
            return float("nan")
        return float(np.sqrt(max(np.trace(self._yy + self._yy_c), 0.0) / self.count))

    def residual_rmse(self, w_out: np.ndarray) -> float:
        """sqrt(mean_t |W_out x(t) - y(t)|^2) over the accumulated columns."""
        if self.count == 0:
            return float("nan")
        yy = self._yy + self._yy_c
        sq = (
            np.trace(yy)
            - 2.0 * np.sum(w_out * self.cross)
            + np.sum((w_out @ self.gram) * w_out)
        )
        return float(np.sqrt(max(sq, 0.0) / self.count))

    def solve(self, beta: float) -> np.ndarray:
        """Readout matrix (dim_out x n_r).

        Raises:
            ReadoutTrainingError: if the regularized Gram matrix is singular.
        """
        if self.count == 0:
            raise ReadoutTrainingError("No training columns accumulated")
        a = self.gram + beta * np.eye(self.n_r)
        try:
            solution = scipy.linalg.solve(a, self.cross.T, assume_a="pos")
        except (np.linalg.LinAlgError, ValueError) as e:
            raise ReadoutTrainingError(
                f"Regularized Gram matrix is singular (beta={beta}); use beta > 0: {e}"
            )
        if not np.all(np.isfinite(solution)):
            raise ReadoutTrainingError(
                f"Readout solution is not finite (beta={beta}); use beta > 0"
            )
        return solution.T


def train_readout(states: np.ndarray, targets: np.ndarray, beta: float) -> np.ndarray:
    """One-shot ridge regression on in-memory matrices."""
    acc = GramAccumulator(states.shape[0], targets.shape[0])
    return acc.add(states, targets).solve(beta)
