from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from app.config import PROJECT_ROOT, ArmParams, TrajectorySettings
from app.exceptions import ConfigError
from app.logger import logger
from app.trajectory.base import ReferencePath
from app.trajectory.chaotic import gen_lorenz, gen_mackey_glass
from app.trajectory.io import load_path
from app.trajectory.periodic import gen_circle, gen_figure_eight, gen_random_walk
from app.trajectory.workspace import (
    keep_clear_of_base,
    limit_speed,
    resample_path,
    rescale_to_workspace,
)


class TrajectoryType(str, Enum):
    CIRCLE = "circle"
    FIGURE_EIGHT = "figure_eight"
    LORENZ = "lorenz"
    MACKEY_GLASS = "mackey_glass"
    RANDOM_WALK = "random_walk"
    FILE = "file"


PERIODIC = {TrajectoryType.CIRCLE, TrajectoryType.FIGURE_EIGHT}


class TrajectoryFactory:
    """Builds workspace-ready reference paths from the [trajectory] settings."""

    @staticmethod
    def raw(
        kind: TrajectoryType,
        settings: TrajectorySettings,
        n: int,
        dt: float,
        arm: ArmParams,
        rng: Optional[np.random.Generator] = None,
    ) -> ReferencePath:
        """Generator output before workspace placement and speed limiting."""
        if kind == TrajectoryType.CIRCLE:
            s = settings.circle
            return gen_circle(n, s.radius, s.period, dt)
        if kind == TrajectoryType.FIGURE_EIGHT:
            s = settings.figure_eight
            return gen_figure_eight(n, s.a, s.b, s.period, dt)
        if kind == TrajectoryType.LORENZ:
            s = settings.lorenz
            return gen_lorenz(
                n, s.dt_sim, s.projection, s.initial, s.sigma, s.rho, s.beta, s.transient, dt
            )
        if kind == TrajectoryType.MACKEY_GLASS:
            s = settings.mackey_glass
            return gen_mackey_glass(
                n, s.dt_sim, s.tau_delay, s.a, s.b, s.exponent, s.history, s.transient, dt
            )
        if kind == TrajectoryType.RANDOM_WALK:
            s = settings.random_walk
            return gen_random_walk(
                n, s.step_std, s.smooth_sigma, rng, arm, settings.margin, dt
            )
        if kind == TrajectoryType.FILE:
            if not settings.file:
                raise ConfigError("trajectory.file is required when trajectory.name = 'file'")
            file = Path(settings.file)
            if not file.is_absolute() and not file.exists():
                file = PROJECT_ROOT / file
            return resample_path(load_path(file), dt)
        raise ValueError(f"Unknown trajectory type: {kind}")

    @classmethod
    def build(
        cls,
        settings: TrajectorySettings,
        arm: ArmParams,
        n_steps: int,
        dt: float,
        rng: Optional[np.random.Generator] = None,
        name: Optional[str] = None,
    ) -> ReferencePath:
        """A rescaled, speed-limited path of ``n_steps`` samples.

        Speed limiting only stretches a path, so generators are asked for
        ``n_steps`` raw samples and the result is truncated. File paths are
        returned whole and may be shorter than ``n_steps``. Filled paths are
        moved off the arm base when they come within the clearance radius.
        """
        try:
            kind = TrajectoryType(name or settings.name)
        except ValueError:
            raise ConfigError(
                f"Unknown trajectory '{name or settings.name}'; expected one of "
                f"{', '.join(t.value for t in TrajectoryType)}"
            )

        path = cls.raw(kind, settings, n_steps, dt, arm, rng)
        fill = settings.fill and kind not in PERIODIC
        path = rescale_to_workspace(path, arm, margin=settings.margin, fill=fill)
        if fill:
            path = keep_clear_of_base(path, arm, settings.margin, settings.clearance)
        path = limit_speed(path, settings.max_speed)
        if kind != TrajectoryType.FILE:
            path = path.head(n_steps)
        elif len(path) < n_steps:
            logger.warning(
                f"Trajectory file gives {len(path)} steps, fewer than the {n_steps} requested"
            )
        logger.info(
            f"Reference '{path.name}': {len(path)} steps, "
            f"max speed {path.max_speed:.3g} m/s"
        )
        return path
