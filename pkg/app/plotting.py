"""Static figures.

Every figure is rendered from files already written to disk (run logs,
episode logs, sweep CSVs), never from in-memory results, so plotting cannot
change a numeric output.
"""

from pathlib import Path
from typing import Optional

import matplotlib


matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from app.logger import logger  # noqa: E402
from app.schema import SweepKind  # noqa: E402
from app.tracking.runner import load_run_log  # noqa: E402
from app.tracking.sweep import SweepResult  # noqa: E402
from app.training.episodes import load_episode_log  # noqa: E402


# fixed ids and no timestamp, so identical inputs give identical SVG bytes
plt.rcParams["svg.hashsalt"] = "rctrack"
_SVG_METADATA = {"Date": None}


def _save(fig, out: Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", bbox_inches="tight", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.debug(f"Figure written to {out}")
    return out


def plot_run(stem: Path, out: Path) -> Path:
    """Reference vs. tracked path plus q, qd, qdd and torque panels."""
    run = load_run_log(stem)
    t = np.arange(run.actual.shape[1]) * run.dt
    t_u = np.arange(run.torques.shape[1]) * run.dt
    desired = run.desired[:, : run.actual.shape[1]]

    fig = plt.figure(figsize=(12, 8))
    grid = fig.add_gridspec(4, 2, width_ratios=[1, 1.4])
    ax = fig.add_subplot(grid[:, 0])
    ax.plot(desired[0], desired[1], color="black", lw=1.0, label="reference")
    ax.plot(run.actual[0], run.actual[1], color="tab:red", lw=0.8, ls="--", label="tracked")
    ax.axvline(0, color="0.85", lw=0.5)
    ax.axhline(0, color="0.85", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlabel("cx (m)")
    ax.set_ylabel("cy (m)")
    status = "success" if run.success else (run.failure_reason or "not within threshold")
    ax.set_title(f"{run.name}: rmse {run.rmse_position:.3g} m ({status})")
    ax.legend(loc="upper right", fontsize="small")

    panels = [
        (t, run.angles, "q (rad)"),
        (t, run.actual[2:4], "qd (rad/s)"),
        (t, run.accelerations, "qdd (rad/s^2)"),
        (t_u, run.torques, "tau (N m)"),
    ]
    for row, (time, values, label) in enumerate(panels):
        axis = fig.add_subplot(grid[row, 1])
        axis.plot(time, values[0], lw=0.7, label="joint 1")
        axis.plot(time, values[1], lw=0.7, label="joint 2")
        if row == 1:
            axis.plot(t, desired[2], lw=0.5, color="black", ls=":", label="desired")
            axis.plot(t, desired[3], lw=0.5, color="black", ls=":")
        if run.bridge_len:
            axis.axvline(run.bridge_len * run.dt, color="0.6", lw=0.5)
        axis.set_ylabel(label)
        if row == 0:
            axis.legend(loc="upper right", fontsize="x-small", ncol=3)
        if row == len(panels) - 1:
            axis.set_xlabel("t (s)")
    fig.tight_layout()
    return _save(fig, out)


def plot_heatmap(
    csv_path: Path,
    out: Path,
    column: str = "mean_rmse",
    title: Optional[str] = None,
    kind: Optional[SweepKind] = None,
) -> Path:
    """Color-coded statistic over the sweep plane; infeasible cells hatched."""
    result = SweepResult.from_csv(csv_path, kind=kind)
    values = result.grid(column)
    infeasible = result.grid("infeasible")

    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(values.T, origin="lower", cmap="viridis", aspect="auto")
    fig.colorbar(image, ax=ax, label=column)
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            if infeasible[i, j] == 1:
                ax.add_patch(
                    plt.Rectangle(
                        (i - 0.5, j - 0.5), 1, 1, fill=False, hatch="xx", color="0.5", lw=0
                    )
                )
            elif np.isfinite(values[i, j]):
                ax.text(i, j, f"{values[i, j]:.2g}", ha="center", va="center", fontsize=7)
    ax.set_xticks(range(len(result.x_values)), [f"{v:.3g}" for v in result.x_values])
    ax.set_yticks(range(len(result.y_values)), [f"{v:.3g}" for v in result.y_values])
    ax.set_xlabel(result.x_name)
    ax.set_ylabel(result.y_name)
    ax.set_title(title or f"{result.kind.value} sweep")
    return _save(fig, out)


def plot_episode(stem: Path, out: Path, dt: float = 0.01) -> Path:
    """Torque drive and end-effector excursion of one training episode."""
    log = load_episode_log(stem)
    t = np.arange(log.length) * dt
    fig, (ax_path, ax_tau) = plt.subplots(1, 2, figsize=(11, 4))
    ax_path.plot(log.states[0], log.states[1], lw=0.5)
    ax_path.set_aspect("equal")
    ax_path.set_xlabel("cx (m)")
    ax_path.set_ylabel("cy (m)")
    ax_tau.plot(t, log.torques[0], lw=0.6, label="tau1")
    ax_tau.plot(t, log.torques[1], lw=0.6, label="tau2")
    ax_tau.set_xlabel("t (s)")
    ax_tau.set_ylabel("tau (N m)")
    ax_tau.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    return _save(fig, out)
