from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.artifacts import save_columns
from app.logger import logger
from app.training.episodes import EpisodeLog


class Dataset(BaseModel):
    """Supervised inverse-model data.

    inputs: 8 x N, rows are y(t) stacked on y(t+dt); targets: 2 x N, u(t);
    episode: N episode tags, one per column.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    inputs: np.ndarray
    targets: np.ndarray
    episode: np.ndarray

    @property
    def size(self) -> int:
        return self.inputs.shape[1]


def episode_columns(
    log: EpisodeLog, washout: int
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Columns for t in [washout, T-2]; None when the log is too short."""
    n = log.length
    if n < washout + 2:
        return None
    y = log.observations
    inputs = np.vstack([y[:, washout : n - 1], y[:, washout + 1 : n]])
    return inputs, log.torques[:, washout : n - 1]


def build_dataset(logs: List[EpisodeLog], washout: int) -> Dataset:
    inputs, targets, tags = [], [], []
    for index, log in enumerate(logs):
        columns = episode_columns(log, washout)
        if columns is None:
            logger.warning(
                f"Episode {index} has {log.length} steps, "
                f"fewer than washout + 2 = {washout + 2}; skipped"
            )
            continue
        inputs.append(columns[0])
        targets.append(columns[1])
        tags.append(np.full(columns[0].shape[1], index))
    if not inputs:
        return Dataset(
            inputs=np.empty((8, 0)), targets=np.empty((2, 0)), episode=np.empty(0, int)
        )
    return Dataset(
        inputs=np.hstack(inputs), targets=np.hstack(targets), episode=np.concatenate(tags)
    )


def save_dataset(dataset: Dataset, stem: Path, meta: Dict[str, Any]) -> Path:
    return save_columns(
        stem,
        {"inputs": dataset.inputs, "targets": dataset.targets, "episode": dataset.episode},
        meta,
    )
