"""Robustness and uncertainty sweeps.

Every (cell, realization) pair is an independent tracking run with its own
derived seed. Runs are dispatched to an executor from the event loop and
their outcomes are appended to an optional progress manifest as they
complete, so an interrupted sweep can resume without recomputing finished
runs. Cell statistics are always assembled in grid order.
"""

import asyncio
import hashlib
import json
import math
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from app.config import ArmParams, NoiseConfig, TrackConfig
from app.exceptions import UnreachablePointError
from app.logger import logger
from app.plant.arm import PlantState
from app.reservoir.controller import EsnController
from app.schema import SweepKind
from app.seeding import derive_rng, derive_seed
from app.tracking.bridge import build_bridge
from app.tracking.runner import run_tracking
from app.trajectory.base import ReferenceSeries
from app.trajectory.workspace import (
    check_path_reachable,
    derive_reference_series,
    scale_path,
)


AXES = {
    SweepKind.NOISE: ("sigma_d", "sigma_m"),
    SweepKind.SUCCESS: ("sigma_d", "sigma_m"),
    SweepKind.LENGTHS: ("l1", "l2"),
    SweepKind.MASSES: ("m1", "m2"),
}

CSV_FLOAT_FORMAT = "%.12g"


class RunOutcome(BaseModel):
    rmse_position: float
    rmse_full: float
    success: bool
    failed: bool


class SweepCell(BaseModel):
    x: float
    y: float
    mean_rmse: float = math.nan
    std_rmse: float = math.nan
    n: int = 0
    n_failed: int = 0
    success_rate: float = math.nan
    infeasible: bool = False


class SweepResult(BaseModel):
    """Per-cell statistics of a two-parameter sweep.

    ``mean_rmse``/``std_rmse`` are taken over the runs that did not fail;
    failed runs are only counted in ``n_failed``. Infeasible cells have no
    runs at all.
    """

    kind: SweepKind
    x_name: str
    y_name: str
    x_values: List[float]
    y_values: List[float]
    realizations: int = Field(..., ge=1)
    cells: List[SweepCell]

    def cell(self, x: float, y: float) -> SweepCell:
        for c in self.cells:
            if c.x == x and c.y == y:
                return c
        raise KeyError((x, y))

    def grid(self, column: str = "mean_rmse") -> np.ndarray:
        """len(x_values) x len(y_values) array of one statistic."""
        out = np.full((len(self.x_values), len(self.y_values)), math.nan)
        for c in self.cells:
            out[self.x_values.index(c.x), self.y_values.index(c.y)] = float(getattr(c, column))
        return out

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                self.x_name: c.x,
                self.y_name: c.y,
                "mean_rmse": c.mean_rmse,
                "std_rmse": c.std_rmse,
                "n": c.n,
                "n_failed": c.n_failed,
                "success_rate": c.success_rate,
                "infeasible": c.infeasible,
                "kind": self.kind.value,
            }
            for c in self.cells
        ]
        return pd.DataFrame(rows)

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        return path

    @classmethod
    def from_csv(
        cls, path: Path, kind: Optional[SweepKind] = None, realizations: Optional[int] = None
    ) -> "SweepResult":
        """Load a table written by :meth:`write_csv`.

        The sweep kind comes from ``kind`` when given, else from the table's
        ``kind`` column. Tables without that column only load when their axis
        names identify a single kind.
        """
        frame = pd.read_csv(path)
        x_name, y_name = frame.columns[0], frame.columns[1]
        if kind is None and "kind" in frame.columns:
            kind = SweepKind(frame["kind"].iloc[0])
        if kind is None:
            matches = [k for k, axes in AXES.items() if axes == (x_name, y_name)]
            if len(matches) != 1:
                raise ValueError(
                    f"Cannot tell the sweep kind of {path} from its axes ({x_name}, {y_name})"
                )
            kind = matches[0]
        cells = [
            SweepCell(
                x=row[x_name],
                y=row[y_name],
                mean_rmse=row["mean_rmse"],
                std_rmse=row["std_rmse"],
                n=int(row["n"]),
                n_failed=int(row["n_failed"]),
                success_rate=row["success_rate"],
                infeasible=bool(row["infeasible"]),
            )
            for row in frame.to_dict("records")
        ]
        return cls(
            kind=kind,
            x_name=x_name,
            y_name=y_name,
            x_values=list(dict.fromkeys(frame[x_name].tolist())),
            y_values=list(dict.fromkeys(frame[y_name].tolist())),
            realizations=realizations or max(1, int(frame["n"].max())),
            cells=cells,
        )


class ProgressManifest:
    """Append-only JSON-lines record of finished runs.

    The first line holds a fingerprint of the sweep definition; a manifest
    written for a different sweep is discarded.
    """

    def __init__(self, path: Path, fingerprint: str):
        self.path = Path(path)
        self.fingerprint = fingerprint
        self.done: Dict[str, RunOutcome] = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            self._start()
            return
        lines = self.path.read_text().splitlines()
        try:
            header = json.loads(lines[0]) if lines else {}
        except json.JSONDecodeError:
            header = {}
        if header.get("fingerprint") != self.fingerprint:
            logger.warning(
                f"Progress manifest {self.path} belongs to another sweep; starting over"
            )
            self._start()
            return
        torn = False
        for line in lines[1:]:
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                # torn last line of an interrupted write
                torn = True
                continue
            self.done[entry["key"]] = RunOutcome(**entry["outcome"])
        if torn:
            self._rewrite()
        logger.info(f"Resuming sweep: {len(self.done)} runs already recorded")

    def _start(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps({"fingerprint": self.fingerprint}) + "\n")

    def _rewrite(self) -> None:
        self._start()
        with self.path.open("a") as f:
            for key, outcome in self.done.items():
                f.write(json.dumps({"key": key, "outcome": outcome.model_dump()}) + "\n")

    def record(self, key: str, outcome: RunOutcome) -> None:
        self.done[key] = outcome
        with self.path.open("a") as f:
            f.write(json.dumps({"key": key, "outcome": outcome.model_dump()}) + "\n")


class _TrackJob(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    controller: EsnController
    cfg: TrackConfig
    series: ReferenceSeries


def _run_job(job: _TrackJob) -> RunOutcome:
    controller = job.controller.model_copy()
    result = run_tracking(controller, job.cfg, job.series)
    return RunOutcome(
        rmse_position=result.rmse_position,
        rmse_full=result.rmse_full,
        success=result.success,
        failed=result.failure_reason is not None,
    )


def _executor(workers: int) -> Executor:
    if workers > 1:
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=1)


async def execute_jobs(
    jobs: Dict[str, _TrackJob],
    workers: int = 1,
    progress: Optional[ProgressManifest] = None,
) -> Dict[str, RunOutcome]:
    """Run every job not yet in ``progress``; outcomes keyed like ``jobs``."""
    outcomes = dict(progress.done) if progress is not None else {}
    pending = {key: job for key, job in jobs.items() if key not in outcomes}
    if not pending:
        return outcomes

    loop = asyncio.get_running_loop()
    executor = _executor(workers)
    finished = 0

    async def _one(key: str, job: _TrackJob) -> None:
        nonlocal finished
        outcome = await loop.run_in_executor(executor, _run_job, job)
        outcomes[key] = outcome
        if progress is not None:
            progress.record(key, outcome)
        finished += 1
        if finished % 10 == 0 or finished == len(pending):
            logger.info(f"Sweep progress: {finished}/{len(pending)} runs")

    try:
        await asyncio.gather(*(_one(key, job) for key, job in pending.items()))
    finally:
        executor.shutdown(wait=True, cancel_futures=True)
    return outcomes


def _cell_stats(cell: SweepCell, outcomes: List[RunOutcome]) -> SweepCell:
    ok = np.array([o.rmse_position for o in outcomes if not o.failed])
    if ok.size and np.all(ok == ok[0]):
        mean, std = float(ok[0]), 0.0
    elif ok.size:
        mean, std = float(np.mean(ok)), float(np.std(ok))
    else:
        mean, std = math.nan, math.nan
    return cell.model_copy(
        update={
            "mean_rmse": mean,
            "std_rmse": std,
            "n": len(outcomes),
            "n_failed": sum(o.failed for o in outcomes),
            "success_rate": float(np.mean([o.success for o in outcomes])),
        }
    )


def sweep_fingerprint(kind: SweepKind, controller: EsnController, payload: dict) -> str:
    digest = hashlib.sha256()
    digest.update(kind.value.encode())
    if controller.weights.w_out is not None:
        digest.update(np.ascontiguousarray(controller.weights.w_out).tobytes())
    digest.update(json.dumps(payload, sort_keys=True, default=str).encode())
    return digest.hexdigest()


def _key(i: int, j: int, r: int) -> str:
    return f"{i}/{j}/{r}"


class _CellPlan(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    i: int
    j: int
    cell: SweepCell
    cfgs: List[TrackConfig] = Field(default_factory=list)
    series: Optional[ReferenceSeries] = None


def _is_noise_free(cfg: TrackConfig) -> bool:
    return cfg.noise.sigma_d == 0 and cfg.noise.sigma_m == 0


async def _run_plan(
    kind: SweepKind,
    plans: List[_CellPlan],
    controller: EsnController,
    x_values: Sequence[float],
    y_values: Sequence[float],
    n_real: int,
    workers: int,
    progress: Optional[ProgressManifest],
    replicate_noise_free: bool = True,
) -> SweepResult:
    jobs: Dict[str, _TrackJob] = {}
    for plan in plans:
        if plan.cell.infeasible:
            continue
        for r, cfg in enumerate(plan.cfgs):
            if replicate_noise_free and r > 0 and _is_noise_free(cfg):
                # identical to realization 0
                break
            jobs[_key(plan.i, plan.j, r)] = _TrackJob(
                controller=controller, cfg=cfg, series=plan.series
            )
    x_name, y_name = AXES[kind]
    logger.info(
        f"Sweep '{kind.value}': {len(x_values)} x {len(y_values)} cells, "
        f"{n_real} realizations, {len(jobs)} distinct runs"
    )
    outcomes = await execute_jobs(jobs, workers, progress)

    cells = []
    for plan in plans:
        if plan.cell.infeasible:
            cells.append(plan.cell)
            continue
        runs = []
        for r, cfg in enumerate(plan.cfgs):
            key = _key(plan.i, plan.j, r)
            if key not in outcomes:
                key = _key(plan.i, plan.j, 0)
            runs.append(outcomes[key])
        cells.append(_cell_stats(plan.cell, runs))
    return SweepResult(
        kind=kind,
        x_name=x_name,
        y_name=y_name,
        x_values=list(x_values),
        y_values=list(y_values),
        realizations=n_real,
        cells=cells,
    )


def _check_grids(*grids: Sequence[float]) -> None:
    for grid in grids:
        if len(grid) == 0:
            raise ValueError("Sweep grids must not be empty")


async def sweep_noise(
    controller: EsnController,
    series: ReferenceSeries,
    sigma_d_grid: Sequence[float],
    sigma_m_grid: Sequence[float],
    n_real: int,
    cfg: Optional[TrackConfig] = None,
    seed: int = 0,
    workers: int = 1,
    progress_path: Optional[Path] = None,
) -> SweepResult:
    """Mean and spread of rmse_position over a disturbance x noise grid."""
    _check_grids(sigma_d_grid, sigma_m_grid)
    cfg = cfg or TrackConfig()
    plans = []
    for i, sigma_d in enumerate(sigma_d_grid):
        for j, sigma_m in enumerate(sigma_m_grid):
            noise = NoiseConfig(sigma_d=sigma_d, sigma_m=sigma_m)
            cfgs = [
                cfg.model_copy(
                    update={"noise": noise, "seed": derive_seed(seed, "noise", i, j, r)}
                )
                for r in range(n_real)
            ]
            plans.append(
                _CellPlan(i=i, j=j, cell=SweepCell(x=sigma_d, y=sigma_m), cfgs=cfgs, series=series)
            )
    progress = _progress(
        progress_path,
        SweepKind.NOISE,
        controller,
        {
            "d": list(sigma_d_grid),
            "m": list(sigma_m_grid),
            "n": n_real,
            "seed": seed,
            "cfg": cfg.model_dump(mode="json"),
            "ref": _series_digest(series),
        },
    )
    return await _run_plan(
        SweepKind.NOISE, plans, controller, sigma_d_grid, sigma_m_grid, n_real, workers, progress
    )


def _series_digest(series: ReferenceSeries) -> str:
    return hashlib.sha256(np.ascontiguousarray(series.y_d).tobytes()).hexdigest()


def _progress(
    path: Optional[Path], kind: SweepKind, controller: EsnController, payload: dict
) -> Optional[ProgressManifest]:
    if path is None:
        return None
    return ProgressManifest(path, sweep_fingerprint(kind, controller, payload))


def _plant_cell(
    plant: ArmParams,
    series: ReferenceSeries,
    nominal: ArmParams,
    cfg: TrackConfig,
    rescale: bool,
) -> Optional[ReferenceSeries]:
    """Reference for a perturbed plant, or None when it cannot be tracked."""
    path = series.source
    if rescale:
        path = scale_path(path, plant.reach / nominal.reach)
    bad = check_path_reachable(path, plant)
    if bad is not None:
        return None
    try:
        cell_series = derive_reference_series(path, plant)
        start = PlantState.from_angles(plant, cfg.q1_init, cfg.q2_init)
        build_bridge((start.cx, start.cy), cell_series, cfg.bridge_len, plant)
    except UnreachablePointError:
        return None
    return cell_series


async def _sweep_plant(
    kind: SweepKind,
    controller: EsnController,
    series: ReferenceSeries,
    x_grid: Sequence[float],
    y_grid: Sequence[float],
    make_plant,
    rescale: bool,
    n_real: int,
    cfg: Optional[TrackConfig],
    seed: int,
    workers: int,
    progress_path: Optional[Path],
) -> SweepResult:
    if series.source is None:
        raise ValueError("Plant sweeps need a series with its source path")
    _check_grids(x_grid, y_grid)
    cfg = cfg or TrackConfig()
    nominal = controller.arm
    plans = []
    for i, x in enumerate(x_grid):
        for j, y in enumerate(y_grid):
            plant = make_plant(nominal, x, y)
            cell_series = _plant_cell(plant, series, nominal, cfg, rescale)
            if cell_series is None:
                logger.warning(f"Sweep '{kind.value}': cell ({x}, {y}) is infeasible")
                plans.append(_CellPlan(i=i, j=j, cell=SweepCell(x=x, y=y, infeasible=True)))
                continue
            cfgs = [
                cfg.model_copy(
                    update={"plant_params": plant, "seed": derive_seed(seed, kind.value, i, j, r)}
                )
                for r in range(n_real)
            ]
            plans.append(
                _CellPlan(i=i, j=j, cell=SweepCell(x=x, y=y), cfgs=cfgs, series=cell_series)
            )
    progress = _progress(
        progress_path,
        kind,
        controller,
        {
            "x": list(x_grid),
            "y": list(y_grid),
            "n": n_real,
            "seed": seed,
            "cfg": cfg.model_dump(mode="json"),
            "ref": _series_digest(series),
        },
    )
    return await _run_plan(kind, plans, controller, x_grid, y_grid, n_real, workers, progress)


async def sweep_arm_lengths(
    controller: EsnController,
    series: ReferenceSeries,
    l1_grid: Sequence[float],
    l2_grid: Sequence[float],
    n_real: int,
    cfg: Optional[TrackConfig] = None,
    seed: int = 0,
    workers: int = 1,
    progress_path: Optional[Path] = None,
) -> SweepResult:
    """Deploy the nominally trained controller on arms of other lengths.

    The reference is scaled with the reach of each cell's arm; cells whose
    reference (or bridge) enters the unreachable inner disk are infeasible.
    """
    return await _sweep_plant(
        SweepKind.LENGTHS,
        controller,
        series,
        l1_grid,
        l2_grid,
        lambda nominal, l1, l2: nominal.with_lengths(l1, l2),
        True,
        n_real,
        cfg,
        seed,
        workers,
        progress_path,
    )


async def sweep_masses(
    controller: EsnController,
    series: ReferenceSeries,
    m1_grid: Sequence[float],
    m2_grid: Sequence[float],
    n_real: int,
    cfg: Optional[TrackConfig] = None,
    seed: int = 0,
    workers: int = 1,
    progress_path: Optional[Path] = None,
) -> SweepResult:
    """Deploy the nominally trained controller on arms of other masses."""
    return await _sweep_plant(
        SweepKind.MASSES,
        controller,
        series,
        m1_grid,
        m2_grid,
        lambda nominal, m1, m2: nominal.model_copy(update={"m1": m1, "m2": m2}),
        False,
        n_real,
        cfg,
        seed,
        workers,
        progress_path,
    )


def random_initial_angles(seed: int, *keys) -> Tuple[float, float]:
    rng = derive_rng(seed, "initial", *keys)
    return float(rng.uniform(0.0, 2.0 * math.pi)), float(rng.uniform(-math.pi, math.pi))


def _success_cfgs(cfg: TrackConfig, n_trials: int, seed: int, i: int, j: int) -> List[TrackConfig]:
    cfgs = []
    for trial in range(n_trials):
        q1, q2 = random_initial_angles(seed, i, j, trial)
        cfgs.append(
            cfg.model_copy(
                update={
                    "q1_init": q1,
                    "q2_init": q2,
                    "seed": derive_seed(seed, "success", i, j, trial),
                }
            )
        )
    return cfgs


async def success_rate(
    controller: EsnController,
    series: ReferenceSeries,
    cfg: Optional[TrackConfig] = None,
    n_trials: int = 10,
    seed: int = 0,
    workers: int = 1,
) -> float:
    """Fraction of runs from random initial arm configurations that succeed."""
    cfg = cfg or TrackConfig()
    jobs = {
        _key(0, 0, r): _TrackJob(controller=controller, cfg=c, series=series)
        for r, c in enumerate(_success_cfgs(cfg, n_trials, seed, 0, 0))
    }
    outcomes = await execute_jobs(jobs, workers)
    return float(np.mean([o.success for o in outcomes.values()]))


async def sweep_success(
    controller: EsnController,
    series: ReferenceSeries,
    sigma_d_grid: Sequence[float],
    sigma_m_grid: Sequence[float],
    n_trials: int,
    cfg: Optional[TrackConfig] = None,
    seed: int = 0,
    workers: int = 1,
    progress_path: Optional[Path] = None,
) -> SweepResult:
    """Success rate from random initial configurations across a noise grid."""
    _check_grids(sigma_d_grid, sigma_m_grid)
    cfg = cfg or TrackConfig()
    plans = []
    for i, sigma_d in enumerate(sigma_d_grid):
        for j, sigma_m in enumerate(sigma_m_grid):
            noisy = cfg.model_copy(
                update={"noise": NoiseConfig(sigma_d=sigma_d, sigma_m=sigma_m)}
            )
            plans.append(
                _CellPlan(
                    i=i,
                    j=j,
                    cell=SweepCell(x=sigma_d, y=sigma_m),
                    cfgs=_success_cfgs(noisy, n_trials, seed, i, j),
                    series=series,
                )
            )
    progress = _progress(
        progress_path,
        SweepKind.SUCCESS,
        controller,
        {
            "d": list(sigma_d_grid),
            "m": list(sigma_m_grid),
            "n": n_trials,
            "seed": seed,
            "cfg": cfg.model_dump(mode="json"),
            "ref": _series_digest(series),
        },
    )
    return await _run_plan(
        SweepKind.SUCCESS,
        plans,
        controller,
        sigma_d_grid,
        sigma_m_grid,
        n_trials,
        workers,
        progress,
        replicate_noise_free=False,
    )
