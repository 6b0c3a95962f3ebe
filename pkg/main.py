#!/usr/bin/env python
import argparse
import asyncio
import sys
from pathlib import Path
from typing import List, Optional

from app.config import ExperimentConfig, config, parse_experiment_config
from app.exceptions import ConfigError, RCTrackError
from app.flow.flow_factory import FlowFactory, FlowType
from app.logger import logger, run_log
from app.schema import SWEEP_KIND_VALUES, ExitCode, SweepKind


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=Path, help="Experiment TOML file")
    common.add_argument("--seed", type=int, help="Master seed")
    common.add_argument("--out", "-o", type=Path, help="Output directory")
    common.add_argument(
        "--workers", type=int, help="Worker processes (default: all cores)"
    )
    common.add_argument("--sigma-d", type=float, help="Torque disturbance amplitude")
    common.add_argument("--sigma-m", type=float, help="Measurement noise amplitude")
    common.add_argument("--l1", type=float, help="Inner arm length (m)")
    common.add_argument("--l2", type=float, help="Outer arm length (m)")
    common.add_argument(
        "--trajectory",
        "-t",
        help="Trajectory name or a two-column path file",
    )
    common.add_argument("--speed", type=float, help="End-effector speed bound (m/s)")
    common.add_argument("--controller", type=Path, help="Controller file")

    parser = argparse.ArgumentParser(
        description="Reservoir-computing inverse-model tracking control of a two-link arm"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("train", parents=[common], help="Train a controller")
    commands.add_parser("track", parents=[common], help="Track one reference")
    sweep = commands.add_parser("sweep", parents=[common], help="Run a robustness sweep")
    sweep.add_argument("kind", choices=SWEEP_KIND_VALUES, help="Sweep family")
    commands.add_parser(
        "demo", parents=[common], help="Train and track the four showcase references"
    )
    return parser.parse_args(argv)


def apply_overrides(experiment: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Fold command-line flags into the experiment and validate the result."""
    raw = experiment.model_dump()
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.workers is not None:
        raw["workers"] = args.workers
    if args.sigma_d is not None:
        raw["tracking"]["sigma_d"] = args.sigma_d
    if args.sigma_m is not None:
        raw["tracking"]["sigma_m"] = args.sigma_m
    if args.speed is not None:
        raw["trajectory"]["max_speed"] = args.speed
    if args.trajectory is not None:
        if Path(args.trajectory).is_file():
            raw["trajectory"]["name"] = "file"
            raw["trajectory"]["file"] = str(args.trajectory)
        else:
            raw["trajectory"]["name"] = args.trajectory
    if args.l1 is not None or args.l2 is not None:
        l1 = args.l1 if args.l1 is not None else experiment.arm.l1
        l2 = args.l2 if args.l2 is not None else experiment.arm.l2
        resized = experiment.arm.with_lengths(l1, l2).model_dump()
        if args.command == "train":
            raw["arm"] = resized
        else:
            # deployment plant only; the controller keeps its training arm
            raw["tracking"]["plant"] = resized
    return parse_experiment_config(raw)


async def run(args: argparse.Namespace) -> ExitCode:
    experiment = apply_overrides(config.load(args.config), args)
    out_dir = args.out or Path(experiment.output_dir) / args.command
    kwargs = {"controller_path": args.controller, "workers": args.workers}
    if args.command == "sweep":
        kwargs["kind"] = SweepKind(args.kind)

    flow = FlowFactory.create_flow(FlowType(args.command), experiment, out_dir, **kwargs)
    with run_log(out_dir):
        outcome = await flow.execute()
    logger.info(f"{args.command} finished with exit code {int(outcome.exit_code)}")
    return outcome.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    try:
        code = asyncio.run(run(args))
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        code = ExitCode.CONFIG_ERROR
    except RCTrackError as e:
        logger.error(f"{type(e).__name__}: {e}")
        code = ExitCode.RUNTIME_ERROR
    except KeyboardInterrupt:
        logger.warning("Interrupted; finished sweep runs are kept for resuming")
        code = ExitCode.RUNTIME_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        code = ExitCode.RUNTIME_ERROR
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
