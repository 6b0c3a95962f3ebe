"""Two-column text format for reference paths.

    # rctrack-path dt=0.01 name=circle
    0.800000000000000 0.000000000000000
    ...

The header line is optional on load; ``dt`` then falls back to the caller's
value and the name to the file stem.
"""

from pathlib import Path
from typing import Optional

import numpy as np

from app.exceptions import ConfigError
from app.trajectory.base import ReferencePath


HEADER_TAG = "rctrack-path"


def save_path(path: ReferencePath, file: Path) -> Path:
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        file,
        path.points,
        fmt="%.15g",
        header=f"{HEADER_TAG} dt={path.dt!r} name={path.name}",
    )
    return file


def _parse_header(line: str) -> dict:
    fields = {}
    for token in line.lstrip("#").split():
        key, sep, value = token.partition("=")
        if sep:
            fields[key] = value
    return fields


def load_path(file: Path, dt: Optional[float] = None) -> ReferencePath:
    """Read a path file.

    Raises:
        ConfigError: if the file is missing or not a two-column numeric table.
    """
    file = Path(file)
    if not file.exists():
        raise ConfigError(f"Trajectory file not found: {file}")

    header = {}
    with file.open("r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                header = _parse_header(line)
                break
            if line.strip():
                break

    try:
        points = np.loadtxt(file, comments="#", ndmin=2)
        file_dt = float(header["dt"]) if "dt" in header else None
    except ValueError as e:
        raise ConfigError(f"Malformed trajectory file {file}: {e}")
    if points.shape[1] != 2 or points.shape[0] < 2:
        raise ConfigError(
            f"Trajectory file {file} must hold at least two rows of cx, cy; "
            f"got shape {points.shape}"
        )

    if dt is None:
        dt = file_dt if file_dt is not None else 0.01
    try:
        return ReferencePath(points=points, dt=dt, name=header.get("name", file.stem))
    except ValueError as e:
        raise ConfigError(f"Invalid trajectory file {file}: {e}")
