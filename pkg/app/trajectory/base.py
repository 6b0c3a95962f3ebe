from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class ReferencePath(BaseModel):
    """End-effector positions sampled at a uniform time step.

    ``points`` is T x 2 ([cx, cy] per row). Generators return paths in their
    native coordinates; reachability is only guaranteed after
    ``rescale_to_workspace``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray
    dt: float = Field(0.01, gt=0)
    name: str = "path"

    @field_validator("points")
    @classmethod
    def _check_points(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"points must be T x 2, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("points must be finite")
        return v

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def step_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.points, axis=0).T)

    @property
    def max_speed(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(self.step_lengths.max() / self.dt)

    def head(self, n: int) -> "ReferencePath":
        return self.model_copy(update={"points": self.points[:n]})


class ReferenceSeries(BaseModel):
    """Desired observations y_d, one column [cx, cy, qd1, qd2] per step.

    ``angles`` (2 x T) are the unwrapped joint angles the series was derived
    from.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    y_d: np.ndarray
    angles: np.ndarray
    source: Optional[ReferencePath] = None

    def __len__(self) -> int:
        return self.y_d.shape[1]

    @property
    def dt(self) -> float:
        return self.source.dt if self.source is not None else 0.01

    @property
    def positions(self) -> np.ndarray:
        """T x 2"""
        return self.y_d[:2].T

    def head(self, n: int) -> "ReferenceSeries":
        return self.model_copy(
            update={
                "y_d": self.y_d[:, :n],
                "angles": self.angles[:, :n],
                "source": self.source.head(n) if self.source is not None else None,
            }
        )

    def concat(self, other: "ReferenceSeries") -> "ReferenceSeries":
        source = None
        if self.source is not None and other.source is not None:
            source = ReferencePath(
                points=np.vstack([self.source.points, other.source.points]),
                dt=other.source.dt,
                name=other.source.name,
            )
        return ReferenceSeries(
            y_d=np.hstack([self.y_d, other.y_d]),
            angles=np.hstack([self.angles, other.angles]),
            source=source,
        )
