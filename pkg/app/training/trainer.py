"""Inverse-model training.

The reservoir is driven through every episode's [y(t); y(t+dt)] sequence
from a zero state; after the washout the harvested states are paired with
the torque u(t) that produced the transition. Whole episodes are held out
for validation.

Unless the reservoir takes raw inputs, a first pass over the training
episodes measures the input statistics that are folded into W_in and b
before the states are harvested. Episodes are regenerated from their seeds
in the second pass.
"""

import math
import time
from functools import partial
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.config import ArmParams, EsnParams, TrainConfig
from app.logger import logger
from app.reservoir.controller import EsnController
from app.reservoir.encoding import (
    MomentAccumulator,
    encoding_metadata,
    fold_input_scaling,
    increment_transform,
)
from app.reservoir.esn import EsnWeights, harvest_states, init_reservoir
from app.reservoir.readout import GramAccumulator
from app.seeding import derive_rng
from app.training.dataset import episode_columns
from app.training.episodes import EpisodeLog, run_episode


COVERAGE_BINS = 10


class TrainingReport(BaseModel):
    n_episodes: int
    n_train_episodes: int
    n_holdout_episodes: int
    n_columns: int
    train_rmse: float
    train_nrmse: float
    holdout_rmse: Optional[float] = None
    holdout_nrmse: Optional[float] = None
    coverage: float
    discarded_episodes: int


class _EpisodeJob(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    arm: ArmParams
    train: TrainConfig
    alpha: float
    weights: EsnWeights
    index: int
    holdout: bool


class _EpisodeHarvest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    index: int
    holdout: bool
    states: Optional[np.ndarray] = None
    targets: Optional[np.ndarray] = None
    gram: Optional[GramAccumulator] = None
    histogram: np.ndarray
    discarded: int


def episode_rng(cfg: TrainConfig, index: int) -> np.random.Generator:
    return derive_rng(cfg.seed, "episode", index)


def coverage_histogram(log: EpisodeLog, p: ArmParams) -> np.ndarray:
    edges = np.linspace(-p.reach, p.reach, COVERAGE_BINS + 1)
    counts, _, _ = np.histogram2d(log.states[0], log.states[1], bins=[edges, edges])
    return counts


def coverage_fraction(counts: np.ndarray, p: ArmParams) -> float:
    """Share of grid cells whose center is reachable and that were visited."""
    edges = np.linspace(-p.reach, p.reach, COVERAGE_BINS + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    cx, cy = np.meshgrid(centers, centers, indexing="ij")
    radius = np.hypot(cx, cy)
    reachable = (radius <= p.reach) & (radius >= p.inner_reach)
    return float(np.count_nonzero((counts > 0) & reachable) / np.count_nonzero(reachable))


def _episode_moments(job: _EpisodeJob, transform: np.ndarray) -> Tuple[int, MomentAccumulator]:
    log = run_episode(job.arm, job.train, episode_rng(job.train, job.index))
    inputs, _ = episode_columns(log, 0)
    return job.index, MomentAccumulator(inputs.shape[0]).add(transform @ inputs)


def _harvest_episode(job: _EpisodeJob) -> _EpisodeHarvest:
    cfg = job.train
    log = run_episode(job.arm, cfg, episode_rng(cfg, job.index))
    inputs, targets = episode_columns(log, 0)
    states = harvest_states(job.weights, job.alpha, inputs)[:, cfg.washout :]
    targets = targets[:, cfg.washout :]
    harvest = _EpisodeHarvest(
        index=job.index,
        holdout=job.holdout,
        histogram=coverage_histogram(log, job.arm),
        discarded=log.discarded,
    )
    if job.holdout:
        harvest.states, harvest.targets = states, targets
    else:
        harvest.gram = GramAccumulator(states.shape[0], targets.shape[0]).add(
            states, targets
        )
    logger.debug(f"Harvested episode {job.index} ({states.shape[1]} columns)")
    return harvest


def holdout_count(cfg: TrainConfig) -> int:
    n = cfg.n_episodes
    if n < 2 or cfg.holdout_fraction == 0:
        return 0
    return min(n - 1, max(1, math.ceil(cfg.holdout_fraction * n)))


def _run_jobs(fn: Callable, jobs: List[_EpisodeJob], workers: int) -> list:
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _fit_encoding(
    jobs: List[_EpisodeJob], ec: EsnParams, weights: EsnWeights, workers: int
) -> Tuple[EsnWeights, dict]:
    """Fold the training-input statistics into the input weights."""
    if ec.input_encoding == "raw":
        return weights, {"kind": "raw"}
    transform = increment_transform(ec.dim_in // 2)
    moments = MomentAccumulator(ec.dim_in)
    results = _run_jobs(
        partial(_episode_moments, transform=transform),
        [job for job in jobs if not job.holdout],
        workers,
    )
    for _, part in sorted(results, key=lambda item: item[0]):
        moments.merge(part)
    mean, std = moments.mean, moments.std
    logger.debug(f"Input encoding '{ec.input_encoding}': std={np.array2string(std, precision=3)}")
    return (
        fold_input_scaling(weights, transform, mean, std),
        encoding_metadata(ec.input_encoding, mean, std),
    )


def fit_controller(
    p: ArmParams,
    tc: TrainConfig,
    ec: EsnParams,
    workers: Optional[int] = None,
) -> EsnController:
    """Train the inverse-model controller on stochastic-torque episodes.

    Episode seeds are derived from ``tc.seed`` by episode index; input
    moments and Gram matrices are merged in index order, so the readout does
    not depend on ``workers``. The encoding statistics are kept in the
    controller metadata under ``input_encoding``.

    Raises:
        ReadoutTrainingError: if the regularized Gram matrix is singular.
    """
    started = time.perf_counter()
    workers = workers or tc.workers
    weights = init_reservoir(ec, np.random.default_rng(ec.seed))

    n_hold = holdout_count(tc)
    n_train = tc.n_episodes - n_hold
    jobs = [
        _EpisodeJob(
            arm=p, train=tc, alpha=ec.alpha, weights=weights, index=i, holdout=i >= n_train
        )
        for i in range(tc.n_episodes)
    ]
    logger.info(
        f"Training on {n_train} episodes of {tc.episode_len} steps "
        f"({n_hold} held out, workers={workers})"
    )
    weights, encoding = _fit_encoding(jobs, ec, weights, workers)
    jobs = [job.model_copy(update={"weights": weights}) for job in jobs]
    harvests = sorted(_run_jobs(_harvest_episode, jobs, workers), key=lambda h: h.index)

    gram = GramAccumulator(ec.n_r, ec.dim_out)
    histogram = np.zeros((COVERAGE_BINS, COVERAGE_BINS))
    for harvest in harvests:
        histogram += harvest.histogram
        if harvest.gram is not None:
            gram.merge(harvest.gram)

    w_out = gram.solve(ec.beta)
    weights = weights.model_copy(update={"w_out": w_out})

    holdout_rmse = holdout_nrmse = None
    held = [h for h in harvests if h.holdout]
    if held:
        count = sum(h.states.shape[1] for h in held)
        sq = sum(float(np.sum((w_out @ h.states - h.targets) ** 2)) for h in held)
        norm = sum(float(np.sum(h.targets**2)) for h in held)
        holdout_rmse = math.sqrt(sq / count)
        holdout_nrmse = math.sqrt(sq / norm) if norm > 0 else math.nan
    train_rmse = gram.residual_rmse(w_out)

    report = TrainingReport(
        n_episodes=tc.n_episodes,
        n_train_episodes=n_train,
        n_holdout_episodes=n_hold,
        n_columns=gram.count,
        train_rmse=train_rmse,
        train_nrmse=train_rmse / gram.target_rms() if gram.target_rms() > 0 else math.nan,
        holdout_rmse=holdout_rmse,
        holdout_nrmse=holdout_nrmse,
        coverage=coverage_fraction(histogram, p),
        discarded_episodes=sum(h.discarded for h in harvests),
    )
    holdout_text = (
        f"{holdout_rmse:.4g} (nrmse {holdout_nrmse:.3f})" if held else "n/a"
    )
    logger.info(
        f"Readout trained in {time.perf_counter() - started:.1f}s: "
        f"train rmse={report.train_rmse:.4g}, holdout rmse={holdout_text}, "
        f"coverage={report.coverage:.2f}"
    )
    return EsnController(
        params=ec,
        weights=weights,
        arm=p,
        dt=tc.dt,
        metadata={
            "train_config": tc.model_dump(exclude={"workers"}),
            "report": report.model_dump(),
            "input_encoding": encoding,
        },
    )
