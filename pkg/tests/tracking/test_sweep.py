import math

import numpy as np
import pytest
import pytest_asyncio

import app.plotting as plotting
from app.schema import SweepKind
from app.tracking.sweep import (
    ProgressManifest,
    RunOutcome,
    SweepCell,
    SweepResult,
    _cell_stats,
    success_rate,
    sweep_arm_lengths,
    sweep_masses,
    sweep_noise,
    sweep_success,
)
from app.trajectory.periodic import gen_circle
from app.trajectory.workspace import derive_reference_series


@pytest_asyncio.fixture
async def circle_series(arm):
    return derive_reference_series(gen_circle(300, radius=0.6), arm)


@pytest.fixture
def quick_track(short_track):
    return short_track.model_copy(update={"test_len": 120})


@pytest.mark.asyncio
async def test_noise_sweep_grid(small_controller, circle_series, quick_track, tmp_path):
    """Tests that a 2 x 2 noise grid yields four cells in grid order."""
    result = await sweep_noise(
        small_controller, circle_series, [0.0, 0.1], [0.0, 0.01], 2, cfg=quick_track, seed=5
    )
    assert [(c.x, c.y) for c in result.cells] == [
        (0.0, 0.0),
        (0.0, 0.01),
        (0.1, 0.0),
        (0.1, 0.01),
    ]
    assert all(c.n == 2 for c in result.cells)
    assert result.grid().shape == (2, 2)

    csv_path = result.write_csv(tmp_path / "sweep_noise.csv")
    frame = result.to_frame()
    assert list(frame.columns[:2]) == ["sigma_d", "sigma_m"]
    assert len(frame) == 4
    loaded = SweepResult.from_csv(csv_path)
    assert loaded.kind == SweepKind.NOISE
    assert loaded.x_values == [0.0, 0.1]


@pytest.mark.asyncio
async def test_noise_free_cell_has_no_spread(small_controller, circle_series, quick_track):
    """Tests that the deterministic cell repeats one run with zero std."""
    result = await sweep_noise(
        small_controller, circle_series, [0.0], [0.0], 3, cfg=quick_track
    )
    cell = result.cell(0.0, 0.0)
    assert cell.std_rmse == 0.0
    assert cell.n == 3


@pytest.mark.asyncio
async def test_sweep_resumes_from_progress(small_controller, circle_series, quick_track, tmp_path):
    """Tests that rerunning a recorded sweep reproduces the same table."""
    progress = tmp_path / "progress.jsonl"
    kwargs = dict(cfg=quick_track, seed=1, progress_path=progress)
    first = await sweep_noise(small_controller, circle_series, [0.0, 0.1], [0.01], 2, **kwargs)
    recorded = progress.read_text().splitlines()
    assert len(recorded) == 1 + 4

    second = await sweep_noise(small_controller, circle_series, [0.0, 0.1], [0.01], 2, **kwargs)
    first.write_csv(tmp_path / "a.csv")
    second.write_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert progress.read_text().splitlines() == recorded


def test_progress_manifest_skips_torn_lines_and_foreign_sweeps(tmp_path):
    """Tests the manifest header check and tolerance to a truncated last line."""
    path = tmp_path / "progress.jsonl"
    manifest = ProgressManifest(path, "abc")
    outcome = RunOutcome(rmse_position=0.1, rmse_full=0.2, success=True, failed=False)
    manifest.record("0/0/0", outcome)
    with path.open("a") as f:
        f.write('{"key": "0/0/1", "outc')

    resumed = ProgressManifest(path, "abc")
    assert list(resumed.done) == ["0/0/0"]
    resumed.record("0/0/1", outcome)
    assert list(ProgressManifest(path, "abc").done) == ["0/0/0", "0/0/1"]
    assert ProgressManifest(path, "other").done == {}
    assert path.read_text().splitlines() == ['{"fingerprint": "other"}']


@pytest.mark.asyncio
async def test_length_sweep_flags_infeasible_cells(small_controller, circle_series, quick_track):
    """Tests that an arm whose hole swallows the reference is marked infeasible."""
    result = await sweep_arm_lengths(
        small_controller, circle_series, [0.5, 0.9], [0.5, 0.2], 1, cfg=quick_track
    )
    bad = result.cell(0.9, 0.2)
    assert bad.infeasible
    assert bad.n == 0 and math.isnan(bad.mean_rmse)
    nominal = result.cell(0.5, 0.5)
    assert not nominal.infeasible
    assert nominal.n == 1


@pytest.mark.asyncio
async def test_mass_sweep_runs_every_cell(small_controller, circle_series, quick_track):
    """Tests that mass perturbations never make a cell infeasible."""
    result = await sweep_masses(
        small_controller, circle_series, [0.5, 1.0], [1.0, 1.5], 1, cfg=quick_track
    )
    assert not any(c.infeasible for c in result.cells)
    assert result.x_name == "m1" and result.y_name == "m2"


@pytest.mark.asyncio
async def test_success_rate_is_a_fraction(small_controller, circle_series, quick_track):
    """Tests the success rate from random initial configurations."""
    rate = await success_rate(small_controller, circle_series, cfg=quick_track, n_trials=3, seed=2)
    assert 0.0 <= rate <= 1.0
    assert rate * 3 == pytest.approx(round(rate * 3))


@pytest.mark.asyncio
async def test_success_sweep_uses_random_starts(small_controller, circle_series, quick_track):
    """Tests that every trial of a noise-free success cell is actually run."""
    result = await sweep_success(
        small_controller, circle_series, [0.0], [0.0], 3, cfg=quick_track, seed=4
    )
    cell = result.cells[0]
    assert cell.n == 3
    assert 0.0 <= cell.success_rate <= 1.0


def _table(kind: SweepKind) -> SweepResult:
    cells = [SweepCell(x=x, y=0.0, mean_rmse=0.01, n=2, success_rate=0.5) for x in (0.0, 0.1)]
    return SweepResult(
        kind=kind,
        x_name="sigma_d",
        y_name="sigma_m",
        x_values=[0.0, 0.1],
        y_values=[0.0],
        realizations=2,
        cells=cells,
    )


def test_success_table_keeps_its_kind(tmp_path, monkeypatch):
    """Tests that a success table shares the noise axes but reloads and plots as success."""
    csv_path = _table(SweepKind.SUCCESS).write_csv(tmp_path / "sweep_success.csv")
    assert SweepResult.from_csv(csv_path).kind == SweepKind.SUCCESS
    assert SweepResult.from_csv(csv_path, kind=SweepKind.NOISE).kind == SweepKind.NOISE

    titles = []

    def capture(fig, out):
        titles.append(fig.axes[0].get_title())
        plotting.plt.close(fig)
        return out

    monkeypatch.setattr(plotting, "_save", capture)
    plotting.plot_heatmap(csv_path, tmp_path / "sweep_success.svg", "success_rate")
    assert titles == ["success sweep"]


def test_table_without_kind_column_needs_unique_axes(tmp_path):
    """Tests that shared axis names without a kind column are refused."""
    frame = _table(SweepKind.NOISE).to_frame().drop(columns="kind")
    frame.to_csv(tmp_path / "noise.csv", index=False)
    with pytest.raises(ValueError, match="sweep kind"):
        SweepResult.from_csv(tmp_path / "noise.csv")
    assert SweepResult.from_csv(tmp_path / "noise.csv", kind=SweepKind.NOISE).kind == SweepKind.NOISE

    lengths = _table(SweepKind.LENGTHS).to_frame().drop(columns="kind")
    lengths = lengths.rename(columns={"sigma_d": "l1", "sigma_m": "l2"})
    lengths.to_csv(tmp_path / "lengths.csv", index=False)
    assert SweepResult.from_csv(tmp_path / "lengths.csv").kind == SweepKind.LENGTHS


def test_cell_stats_exclude_failed_runs():
    """Tests that failed runs are counted but kept out of the mean."""
    outcomes = [
        RunOutcome(rmse_position=0.1, rmse_full=0.1, success=True, failed=False),
        RunOutcome(rmse_position=0.3, rmse_full=0.3, success=False, failed=False),
        RunOutcome(rmse_position=math.inf, rmse_full=math.inf, success=False, failed=True),
    ]
    cell = _cell_stats(SweepCell(x=0.0, y=0.0), outcomes)
    assert cell.mean_rmse == pytest.approx(0.2)
    assert cell.std_rmse == pytest.approx(0.1)
    assert cell.n == 3 and cell.n_failed == 1
    assert cell.success_rate == pytest.approx(1 / 3)


@pytest.mark.asyncio
async def test_empty_grid_is_rejected(small_controller, circle_series):
    """Tests grid validation."""
    with pytest.raises(ValueError):
        await sweep_noise(small_controller, circle_series, [], [0.0], 1)


def test_grid_lookup():
    """Tests SweepResult.grid on a hand-built table."""
    result = SweepResult(
        kind=SweepKind.MASSES,
        x_name="m1",
        y_name="m2",
        x_values=[1.0, 2.0],
        y_values=[3.0],
        realizations=1,
        cells=[SweepCell(x=1.0, y=3.0, mean_rmse=0.5), SweepCell(x=2.0, y=3.0, mean_rmse=0.7)],
    )
    np.testing.assert_array_equal(result.grid(), [[0.5], [0.7]])
    with pytest.raises(KeyError):
        result.cell(5.0, 5.0)
