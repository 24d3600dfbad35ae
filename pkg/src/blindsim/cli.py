from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from dotenv import load_dotenv

from .engine.config import ScenarioConfig, load_config
from .engine.scenario import characterize_bank, run_scenario
from .exceptions import ConfigError, UnbracketedBandError, UserError
from .export import sweep_metrics, write_calibration, write_run, write_sweep_csv
from .lifecycle import ProgressHooks
from .logger import logger
from .version import __version__

EXIT_OK = 0
EXIT_UNBRACKETED = 1
EXIT_CONFIG = 2


def _load(args: argparse.Namespace) -> ScenarioConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = _load(args)
    report = run_scenario(config, ProgressHooks(every=max(1, config.engine.slots // 10)))
    write_run(report, Path(args.out), str(args.config))
    print(report)
    return EXIT_OK


def parse_grid(spec: str) -> tuple[list[float], int]:
    """``min,max,points,trials`` to a linear power grid and a trial count."""
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != 4:
        raise ConfigError("expected min,max,points,trials", "--grid")
    try:
        low, high, points, trials = float(parts[0]), float(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise ConfigError(f"cannot parse {spec!r}", "--grid") from None
    if not 0 <= low < high or points < 2 or trials < 1:
        raise ConfigError("need 0 <= min < max, points >= 2 and trials >= 1", "--grid")
    return [float(p) for p in np.linspace(low, high, points)], trials


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _load(args)
    grid, trials = parse_grid(args.grid)
    detector_ids = None
    if args.detector:
        detector_ids = [d for item in args.detector for d in item.split(",") if d]
    try:
        profile = characterize_bank(config, grid, trials, detector_ids)
    except UserError as e:
        raise ConfigError(e.message, "--detector") from None
    pairs = [arm for arm in config.topology.arms if all(d in profile.points for d in arm)]
    write_calibration(profile, Path(args.out), pairs or None)
    print(profile)
    return EXIT_OK


def parse_values(spec: str) -> list[Any]:
    values = [yaml.safe_load(v) for v in spec.split(",") if v.strip()]
    if not values:
        raise ConfigError("no values to sweep", "--values")
    return values


def _sweep_point(config: ScenarioConfig, key: str, value: Any) -> dict[str, float | None]:
    return sweep_metrics(run_scenario(config.with_value(key, value)))


def _threads(jobs: int) -> int:
    configured = os.getenv("BLINDSIM_THREADS")
    if configured:
        try:
            return max(1, min(jobs, int(configured)))
        except ValueError:
            raise ConfigError(f"not an integer: {configured!r}", "BLINDSIM_THREADS") from None
    return max(1, min(jobs, os.cpu_count() or 1))


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args)
    values = parse_values(args.values)
    # Validate every point before spending time on any of them.
    for value in values:
        config.with_value(args.param, value)

    threads = _threads(len(values))
    logger.info("sweeping %s over %d value(s) on %d worker(s)", args.param, len(values), threads)
    if threads == 1:
        metrics = [_sweep_point(config, args.param, v) for v in values]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            metrics = list(
                pool.map(_sweep_point, [config] * len(values), [args.param] * len(values), values)
            )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(args.param, list(zip(values, metrics)), out / "sweep.csv")
    logger.info("wrote sweep.csv to %s", out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blindsim", description="Detector-blinding attacks on a BB84 receiver, and Bob's VOA monitor"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", required=True, help="Scenario YAML file")
        sub.add_argument("--seed", type=int, help="Override engine.seed")
        sub.add_argument("--out", default="out", help="Output directory (default: out)")

    run = commands.add_parser("run", help="Run one scenario and write slots/summary/verdict files")
    common(run)
    run.set_defaults(handler=cmd_run)

    calibrate = commands.add_parser("calibrate", help="Characterize P_0%%/P_100%% of Bob's detectors")
    common(calibrate)
    calibrate.add_argument(
        "--detector", action="append", help="Detector id(s) to characterize (default: all)"
    )
    calibrate.add_argument("--grid", required=True, help="Power grid as min,max,points,trials (watts)")
    calibrate.set_defaults(handler=cmd_calibrate)

    sweep = commands.add_parser("sweep", help="Run a scenario once per parameter value")
    common(sweep)
    sweep.add_argument("--param", required=True, help="section.key to sweep, e.g. bob.voa_fixed_db")
    sweep.add_argument("--values", required=True, help="Comma-separated values")
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error("configuration error: %s", e)
        return EXIT_CONFIG
    except UnbracketedBandError as e:
        logger.error("calibration failed: %s", e)
        return EXIT_UNBRACKETED


if __name__ == "__main__":
    sys.exit(main())
