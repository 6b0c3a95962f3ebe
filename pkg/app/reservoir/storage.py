"""Controller file I/O.

Layout::

    RCTRACK-ESN-v1\\n
    <JSON header on one line>\\n
    <raw float64 payload>

The header holds the hyperparameters (seed included), the training plant,
dt, training metadata and the column manifest of the payload. Keys are
sorted and no timestamps are stored, so the same seed reproduces the same
bytes.
"""

import json
from pathlib import Path

from pydantic import ValidationError

from app.artifacts import pack_arrays, unpack_arrays
from app.config import ArmParams, EsnParams
from app.exceptions import ControllerFormatError, RCTrackError
from app.logger import logger
from app.reservoir.controller import EsnController
from app.reservoir.esn import EsnWeights


MAGIC = "RCTRACK-ESN-v1"
_MAGIC_PREFIX = "RCTRACK-ESN-"


def save_controller(controller: EsnController, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        "w_r": controller.weights.w_r,
        "w_in": controller.weights.w_in,
        "b": controller.weights.b,
    }
    if controller.weights.w_out is not None:
        arrays["w_out"] = controller.weights.w_out
    columns, payload = pack_arrays(arrays)
    header = {
        "params": controller.params.model_dump(),
        "arm": controller.arm.model_dump(),
        "dt": controller.dt,
        "metadata": controller.metadata,
        "columns": columns,
    }
    with path.open("wb") as f:
        f.write(f"{MAGIC}\n".encode("ascii"))
        f.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        f.write(payload)
    logger.info(f"Controller written to {path}")
    return path


def load_controller(path: Path) -> EsnController:
    """Read a controller file.

    Raises:
        ControllerFormatError: on a foreign version tag or a corrupt file.
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise ControllerFormatError(f"Cannot read controller file {path}: {e}")

    magic_end = blob.find(b"\n")
    magic = blob[:magic_end].decode("ascii", errors="replace") if magic_end > 0 else ""
    if magic != MAGIC:
        if magic.startswith(_MAGIC_PREFIX):
            raise ControllerFormatError(
                f"Unsupported controller version '{magic}' (expected '{MAGIC}')",
                version=magic,
            )
        raise ControllerFormatError(f"{path} is not a controller file")

    header_end = blob.find(b"\n", magic_end + 1)
    if header_end < 0:
        raise ControllerFormatError(f"Controller file {path} is truncated")
    try:
        header = json.loads(blob[magic_end + 1 : header_end])
        arrays = unpack_arrays(header["columns"], blob[header_end + 1 :])
        weights = EsnWeights(
            w_r=arrays["w_r"],
            w_in=arrays["w_in"],
            b=arrays["b"],
            w_out=arrays.get("w_out"),
        )
        controller = EsnController(
            params=EsnParams(**header["params"]),
            weights=weights,
            arm=ArmParams(**header["arm"]),
            dt=header["dt"],
            metadata=header.get("metadata", {}),
        )
    except (
        json.JSONDecodeError,
        UnicodeDecodeError,
        KeyError,
        TypeError,
        ValidationError,
        RCTrackError,
    ) as e:
        raise ControllerFormatError(f"Controller file {path} is corrupt: {e}")

    n_r = controller.params.n_r
    if weights.w_r.shape != (n_r, n_r) or weights.w_in.shape != (n_r, controller.params.dim_in):
        raise ControllerFormatError(f"Controller file {path} has inconsistent shapes")
    return controller
