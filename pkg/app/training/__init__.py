from app.training.dataset import Dataset, build_dataset, episode_columns, save_dataset
from app.training.episodes import (
    EpisodeLog,
    load_episode_log,
    random_torque_signal,
    run_episode,
    save_episode_log,
    smooth_signal,
)
from app.training.trainer import TrainingReport, fit_controller


__all__ = [
    "Dataset",
    "EpisodeLog",
    "TrainingReport",
    "build_dataset",
    "episode_columns",
    "fit_controller",
    "load_episode_log",
    "random_torque_signal",
    "run_episode",
    "save_dataset",
    "save_episode_log",
    "smooth_signal",
]
