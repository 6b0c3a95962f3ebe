import math
import threading
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.exceptions import ConfigError


def get_project_root() -> Path:
    """Get the project root directory"""
    return Path(__file__).resolve().parent.parent


PROJECT_ROOT = get_project_root()
WORKSPACE_ROOT = PROJECT_ROOT / "workspace"


class _Section(BaseModel):
    """Base for every configuration section: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")


class ArmParams(_Section):
    """Physical constants of the two-link planar arm."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    m1: float = Field(1.0, gt=0, description="Mass of the inner arm (kg)")
    m2: float = Field(1.0, gt=0, description="Mass of the outer arm (kg)")
    l1: float = Field(0.5, gt=0, description="Length of the inner arm (m)")
    l2: float = Field(0.5, gt=0, description="Length of the outer arm (m)")
    lc1: float = Field(0.25, gt=0, description="Center-of-mass offset, inner arm (m)")
    lc2: float = Field(0.25, gt=0, description="Center-of-mass offset, outer arm (m)")
    I1: float = Field(0.03, gt=0, description="Moment of inertia, inner arm (kg m^2)")
    I2: float = Field(0.03, gt=0, description="Moment of inertia, outer arm (kg m^2)")

    @property
    def reach(self) -> float:
        """Outer radius of the reachable annulus."""
        return self.l1 + self.l2

    @property
    def inner_reach(self) -> float:
        """Inner radius of the reachable annulus."""
        return abs(self.l1 - self.l2)

    def with_lengths(self, l1: float, l2: float) -> "ArmParams":
        """Copy with new arm lengths, centers of mass kept at mid-arm ratio."""
        return self.model_copy(
            update={
                "l1": l1,
                "l2": l2,
                "lc1": l1 * self.lc1 / self.l1,
                "lc2": l2 * self.lc2 / self.l2,
            }
        )


class NoiseConfig(_Section):
    """Torque disturbance and measurement noise amplitudes."""

    sigma_d: float = Field(0.0, ge=0, description="Additive torque disturbance std (N m)")
    sigma_m: float = Field(
        0.0, ge=0, description="Multiplicative measurement noise std (dimensionless)"
    )
    seed: int = Field(
        0, ge=0, description="Noise realization index within the tracking run seed"
    )


class EsnParams(_Section):
    """Reservoir hyperparameters."""

    n_r: int = Field(200, gt=0, description="Reservoir size")
    rho: float = Field(0.76, gt=0, description="Spectral radius of the recurrent matrix")
    gamma: float = Field(0.76, ge=0, description="Input weight scaling")
    alpha: float = Field(0.84, gt=0, le=1, description="Leakage")
    beta: float = Field(7.5e-4, ge=0, description="Ridge regularization coefficient")
    p: float = Field(0.53, gt=0, le=1, description="Link probability of the recurrent matrix")
    w_b: float = Field(2.0, ge=0, description="Bias amplitude")
    dim_in: int = Field(8, gt=0, description="Input dimension")
    dim_out: int = Field(2, gt=0, description="Output dimension")
    seed: int = Field(0, ge=0, description="Random generator seed")
    input_encoding: Literal["raw", "increment"] = Field(
        "increment",
        description="Reservoir inputs: raw [y; y_next], or standardized on the training "
        "data with next-step velocities as increments",
    )

    @model_validator(mode="after")
    def _check_encoding(self) -> "EsnParams":
        if self.input_encoding == "increment" and self.dim_in != 8:
            raise ValueError("increment input encoding needs dim_in = 8")
        return self


class TrainConfig(_Section):
    """Stochastic-torque training protocol."""

    dt: float = Field(0.01, gt=0, description="Integration time step (s)")
    episode_len: int = Field(8000, gt=0, description="Steps per episode")
    total_len: int = Field(200_000, gt=0, description="Total training steps")
    tau_max: float = Field(0.15, gt=0, description="Raw torque amplitude bound (N m)")
    smooth_sigma: float = Field(1.0, ge=0, description="Gaussian filter width (steps)")
    washout: int = Field(100, ge=0, description="Steps excluded from the regression")
    holdout_fraction: float = Field(
        0.1, ge=0, lt=1, description="Fraction of whole episodes held out"
    )
    max_redraws: int = Field(
        10, ge=1, description="Attempts per episode before giving up on non-finite runs"
    )
    workers: int = Field(1, ge=1, description="Processes used for reservoir harvest")
    seed: int = Field(0, ge=0, description="Random generator seed")

    @model_validator(mode="after")
    def _check_lengths(self) -> "TrainConfig":
        if self.episode_len <= self.washout:
            raise ValueError("episode_len must exceed washout")
        if self.total_len % self.episode_len:
            raise ValueError("total_len must be a multiple of episode_len")
        return self

    @property
    def n_episodes(self) -> int:
        return self.total_len // self.episode_len


class TrackConfig(_Section):
    """Closed-loop deployment settings."""

    dt: float = Field(0.01, gt=0, description="Integration time step (s)")
    test_len: int = Field(25_000, gt=0, description="Scored tracking steps")
    bridge_len: int = Field(500, ge=0, description="Minimum bridge steps")
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    plant_params: ArmParams = Field(
        default_factory=ArmParams, description="Plant used for deployment"
    )
    q1_init: float = Field(0.0, description="Initial inner joint angle (rad)")
    q2_init: float = Field(math.pi / 2, description="Initial outer joint angle (rad)")
    divergence_bound: float = Field(
        1e3, gt=0, description="Joint speed norm treated as divergence (rad/s)"
    )
    success_threshold: float = Field(
        0.05, gt=0, description="Success if rmse_position < threshold * (l1 + l2)"
    )
    noise_on_reference: bool = Field(
        False, description="Also corrupt the desired observation with measurement noise"
    )
    seed: int = Field(0, ge=0, description="Random generator seed")


class SimulationSettings(_Section):
    dt: float = Field(..., gt=0, description="Integration time step (s); required")


class TrainingSettings(TrainConfig):
    """Training section of the experiment file: tau_max must be explicit."""

    tau_max: float = Field(..., gt=0, description="Raw torque amplitude bound (N m); required")


class TrackingSettings(_Section):
    test_len: int = Field(25_000, gt=0)
    bridge_len: int = Field(500, ge=0)
    sigma_d: float = Field(0.0, ge=0)
    sigma_m: float = Field(0.0, ge=0)
    q1_init: float = 0.0
    q2_init: float = math.pi / 2
    divergence_bound: float = Field(1e3, gt=0)
    success_threshold: float = Field(0.05, gt=0)
    noise_on_reference: bool = False
    noise_seed: int = Field(0, ge=0, description="Noise realization index")
    plant: Optional[ArmParams] = Field(
        None, description="Deployment plant; defaults to the [arm] section"
    )


class CircleSettings(_Section):
    radius: float = Field(0.8, gt=0)
    period: float = Field(20.0, gt=0, description="Seconds per revolution")


class FigureEightSettings(_Section):
    a: float = Field(0.8, gt=0)
    b: float = Field(0.5, gt=0)
    period: float = Field(30.0, gt=0)


class LorenzSettings(_Section):
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt_sim: float = Field(0.01, gt=0)
    transient: float = Field(10.0, ge=0, description="Discarded time units")
    projection: Tuple[int, int] = (0, 2)
    initial: Tuple[float, float, float] = (1.0, 1.0, 1.0)


class MackeyGlassSettings(_Section):
    tau_delay: float = Field(17.0, gt=0)
    a: float = Field(0.2, ge=0, description="Production coefficient")
    b: float = Field(0.1, ge=0, description="Decay coefficient")
    exponent: float = Field(10.0, gt=0)
    dt_sim: float = Field(0.1, gt=0)
    transient: float = Field(500.0, ge=0)
    history: float = Field(1.2, description="Constant history for t < 0")


class RandomWalkSettings(_Section):
    step_std: float = Field(0.01, gt=0)
    smooth_sigma: float = Field(50.0, ge=0)


class TrajectorySettings(_Section):
    name: str = Field(
        "circle", description="circle | figure_eight | lorenz | mackey_glass | random_walk | file"
    )
    file: Optional[str] = Field(None, description="Two-column path file for name = 'file'")
    margin: float = Field(0.1, ge=0, lt=1)
    fill: bool = Field(True, description="Scale chaotic paths up to the workspace radius")
    clearance: float = Field(
        0.2, ge=0, lt=1, description="Filled paths keep this fraction of l1 + l2 away from the base"
    )
    max_speed: float = Field(0.5, gt=0, description="End-effector speed bound (m/s)")
    circle: CircleSettings = Field(default_factory=CircleSettings)
    figure_eight: FigureEightSettings = Field(default_factory=FigureEightSettings)
    lorenz: LorenzSettings = Field(default_factory=LorenzSettings)
    mackey_glass: MackeyGlassSettings = Field(default_factory=MackeyGlassSettings)
    random_walk: RandomWalkSettings = Field(default_factory=RandomWalkSettings)


class SweepSettings(_Section):
    sigma_d_grid: List[float] = Field(
        default_factory=lambda: [0.0, 0.1, 1.0, 10**0.5, 10.0]
    )
    sigma_m_grid: List[float] = Field(
        default_factory=lambda: [0.0, 1e-2, 10**-1.5, 1e-1, 10**-0.5]
    )
    l1_grid: List[float] = Field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6, 0.7])
    l2_grid: List[float] = Field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6, 0.7])
    m1_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5])
    m2_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5])
    realizations: int = Field(10, ge=1)
    trials: int = Field(10, ge=1, description="Initial configurations for kind=success")


class ExperimentConfig(_Section):
    """Root of an experiment file."""

    seed: int = Field(0, ge=0, description="Master seed")
    output_dir: str = Field("workspace/runs", description="Output directory")
    workers: int = Field(0, ge=0, description="Worker processes; 0 = all cores")
    simulation: SimulationSettings
    arm: ArmParams = Field(default_factory=ArmParams)
    esn: EsnParams = Field(default_factory=EsnParams)
    training: TrainingSettings
    tracking: TrackingSettings = Field(default_factory=TrackingSettings)
    trajectory: TrajectorySettings = Field(default_factory=TrajectorySettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)

    def train_config(self) -> TrainConfig:
        data = self.training.model_dump()
        data["dt"] = self.simulation.dt
        return TrainConfig(**data)

    def track_config(self) -> TrackConfig:
        t = self.tracking
        return TrackConfig(
            dt=self.simulation.dt,
            test_len=t.test_len,
            bridge_len=t.bridge_len,
            noise=NoiseConfig(sigma_d=t.sigma_d, sigma_m=t.sigma_m, seed=t.noise_seed),
            plant_params=t.plant or self.arm,
            q1_init=t.q1_init,
            q2_init=t.q2_init,
            divergence_bound=t.divergence_bound,
            success_threshold=t.success_threshold,
            noise_on_reference=t.noise_on_reference,
        )


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{field}: {item['msg']}")
    return "; ".join(lines)


def parse_experiment_config(raw: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig(**raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_format_validation_error(e)}")


def load_experiment_config(path: Path) -> ExperimentConfig:
    """Read and validate a TOML experiment file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        # message carries "(at line X, column Y)"
        raise ConfigError(f"Malformed configuration {path}: {e}")
    return parse_experiment_config(raw)


class Config:
    _instance = None
    _lock = threading.Lock()
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            with self._lock:
                if not self._initialized:
                    self._config: Optional[ExperimentConfig] = None
                    self._path: Optional[Path] = None
                    self._initialized = True

    @staticmethod
    def _get_config_path() -> Path:
        root = PROJECT_ROOT
        config_path = root / "config" / "config.toml"
        if config_path.exists():
            return config_path
        example_path = root / "config" / "config.example.toml"
        if example_path.exists():
            return example_path
        raise ConfigError("No configuration file found in config directory")

    def load(self, path: Optional[Path] = None) -> ExperimentConfig:
        """Load an experiment file (the default one when ``path`` is None)."""
        with self._lock:
            self._path = Path(path) if path else self._get_config_path()
            self._config = load_experiment_config(self._path)
            return self._config

    def reload_config(self) -> ExperimentConfig:
        """Reload the current configuration file into memory"""
        return self.load(self._path)

    @property
    def experiment(self) -> ExperimentConfig:
        if self._config is None:
            self.load()
        return self._config

    @property
    def path(self) -> Optional[Path]:
        return self._path

    @property
    def workspace_root(self) -> Path:
        """Get the workspace root directory"""
        return WORKSPACE_ROOT

    @property
    def root_path(self) -> Path:
        """Get the root path of the application"""
        return PROJECT_ROOT


config = Config()
