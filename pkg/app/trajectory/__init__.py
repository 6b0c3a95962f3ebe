from app.trajectory.base import ReferencePath, ReferenceSeries
from app.trajectory.chaotic import gen_lorenz, gen_mackey_glass
from app.trajectory.factory import TrajectoryFactory, TrajectoryType
from app.trajectory.io import load_path, save_path
from app.trajectory.periodic import gen_circle, gen_figure_eight, gen_random_walk
from app.trajectory.workspace import (
    check_path_reachable,
    derive_reference_series,
    limit_speed,
    resample_path,
    rescale_to_workspace,
    scale_path,
)


__all__ = [
    "ReferencePath",
    "ReferenceSeries",
    "TrajectoryFactory",
    "TrajectoryType",
    "check_path_reachable",
    "derive_reference_series",
    "gen_circle",
    "gen_figure_eight",
    "gen_lorenz",
    "gen_mackey_glass",
    "gen_random_walk",
    "limit_speed",
    "load_path",
    "resample_path",
    "rescale_to_workspace",
    "save_path",
    "scale_path",
]
