"""Run directories and the columnar binary + JSON sidecar format.

A columnar artifact ``<stem>`` is two files:

``<stem>.bin``
    the named float64 little-endian arrays, concatenated in C order;
``<stem>.json``
    the sidecar: format tag, one entry per column (name, shape, offset,
    nbytes) and a free ``meta`` mapping (dt, seeds, config, ...).

The bytes only depend on the arrays and the metadata, so identical runs
produce identical files.
"""

import json
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import tomli_w

from app import __version__
from app.exceptions import RCTrackError


COLUMNAR_FORMAT = "rctrack-columnar-v1"
_DTYPE = np.dtype("<f8")


def pack_arrays(arrays: Dict[str, np.ndarray]) -> Tuple[List[dict], bytes]:
    """Serialize arrays; returns (column manifest, payload)."""
    manifest, chunks, offset = [], [], 0
    for name, value in arrays.items():
        data = np.ascontiguousarray(np.asarray(value, dtype=_DTYPE))
        raw = data.tobytes(order="C")
        manifest.append(
            {
                "name": name,
                "shape": list(data.shape),
                "offset": offset,
                "nbytes": len(raw),
            }
        )
        chunks.append(raw)
        offset += len(raw)
    return manifest, b"".join(chunks)


def unpack_arrays(manifest: List[dict], payload: bytes) -> Dict[str, np.ndarray]:
    arrays = {}
    for column in manifest:
        start, size = column["offset"], column["nbytes"]
        if start + size > len(payload):
            raise RCTrackError(f"Column '{column['name']}' runs past the payload end")
        shape = tuple(column["shape"])
        if int(np.prod(shape)) * _DTYPE.itemsize != size:
            raise RCTrackError(f"Column '{column['name']}' size does not match its shape")
        arrays[column["name"]] = (
            np.frombuffer(payload[start : start + size], dtype=_DTYPE)
            .reshape(shape)
            .copy()
        )
    return arrays


def save_columns(stem: Path, arrays: Dict[str, np.ndarray], meta: Dict[str, Any]) -> Path:
    """Write ``<stem>.bin`` and ``<stem>.json``; returns the sidecar path."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    manifest, payload = pack_arrays(arrays)
    stem.with_suffix(".bin").write_bytes(payload)
    sidecar = stem.with_suffix(".json")
    sidecar.write_text(
        json.dumps(
            {"format": COLUMNAR_FORMAT, "columns": manifest, "meta": meta},
            indent=2,
            sort_keys=True,
        )
    )
    return sidecar


def load_columns(stem: Path) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    stem = Path(stem)
    sidecar = json.loads(stem.with_suffix(".json").read_text())
    if sidecar.get("format") != COLUMNAR_FORMAT:
        raise RCTrackError(f"Unknown columnar format: {sidecar.get('format')}")
    arrays = unpack_arrays(sidecar["columns"], stem.with_suffix(".bin").read_bytes())
    return arrays, sidecar.get("meta", {})


def library_versions() -> Dict[str, str]:
    import matplotlib
    import pandas
    import pydantic
    import scipy

    return {
        "rctrack": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pandas.__version__,
        "pydantic": pydantic.__version__,
        "matplotlib": matplotlib.__version__,
    }


class RunDirectory:
    """A self-describing output directory."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def prepare(self) -> "RunDirectory":
        self.root.mkdir(parents=True, exist_ok=True)
        return self

    def path(self, name: str) -> Path:
        return self.root / name

    def write_resolved_config(self, resolved: Dict[str, Any]) -> Path:
        target = self.path("resolved_config.toml")
        target.write_text(tomli_w.dumps(_drop_none(resolved)))
        return target

    def write_manifest(self, command: str, seeds: Dict[str, int]) -> Path:
        target = self.path("manifest.json")
        target.write_text(
            json.dumps(
                {
                    "command": command,
                    "seeds": seeds,
                    "versions": library_versions(),
                    "created": datetime.now().isoformat(timespec="seconds"),
                },
                indent=2,
                sort_keys=True,
            )
        )
        return target


def _drop_none(value: Any) -> Any:
    # TOML has no null
    if isinstance(value, dict):
        return {k: _drop_none(v) for k, v in value.items() if v is not None}
    if isinstance(value, (list, tuple)):
        return [_drop_none(v) for v in value]
    return value
