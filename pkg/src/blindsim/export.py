"""Result files. Every file is a deterministic function of (config, seed)."""

from __future__ import annotations

import csv
import hashlib
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .detectors.characterize import ThresholdProfile
from .engine.records import SLOT_CSV_COLUMNS, SlotRecord
from .engine.scenario import ScenarioReport
from .exceptions import BlindsimException
from .logger import logger
from .monitor.controllability import eq1_predicate, theta_values
from .monitor.verdict import AttackVerdict
from .util._json import dump_json
from .version import __version__

SWEEP_CSV_COLUMNS = ("parameter", "value", "metric", "metric_value")
THRESHOLD_CSV_COLUMNS = ("detector", "index", "never_click_w", "always_click_w")


@dataclass(frozen=True)
class RunManifest:
    config_path: str | None
    seed: int
    out_dir: str
    files: Mapping[str, str] = field(default_factory=dict)
    """SHA-256 hex digest of every emitted file, by file name."""

    version: str = __version__


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, obj: Any) -> None:
    path.write_text(dump_json(obj), encoding="utf-8")


def write_slots_csv(records: Iterable[SlotRecord], path: Path) -> None:
    _write_csv(path, SLOT_CSV_COLUMNS, (record.csv_row() for record in records))


def verdict_dict(verdict: AttackVerdict) -> dict[str, Any]:
    def test(result) -> dict[str, Any]:
        return {
            "statistic": result.statistic,
            "p_value": result.p_value,
            "applicable": result.applicable,
            "dof": result.dof,
            "note": result.note,
        }

    return {
        "alarm": verdict.alarm,
        "alpha": verdict.alpha,
        "reasons": list(verdict.reasons),
        "scaling_test": test(verdict.scaling),
        "double_click_test": test(verdict.double_click),
        "damage": verdict.damage,
        "multi_fraction": verdict.multi_fraction,
        "eq1": (
            None
            if verdict.eq1 is None
            else {"canonical": verdict.eq1.canonical, "literal": verdict.eq1.literal}
        ),
        "theta": [
            {"pair": list(t.pair), "index": t.index, "value": t.value, "controllable": t.controllable}
            for t in verdict.theta
        ],
    }


def write_run(report: ScenarioReport, out_dir: Path, config_path: str | None = None) -> RunManifest:
    """Writes slots.csv, summary.json, verdict.json and the manifest that digests them."""
    out_dir.mkdir(parents=True, exist_ok=True)
    write_slots_csv(report.records, out_dir / "slots.csv")
    _write_json(out_dir / "summary.json", report.summary())
    _write_json(out_dir / "verdict.json", verdict_dict(report.verdict))
    files = {name: sha256_file(out_dir / name) for name in ("slots.csv", "summary.json", "verdict.json")}
    manifest = RunManifest(config_path, report.config.engine.seed, str(out_dir), files)
    _write_json(out_dir / "manifest.json", manifest)
    logger.info("wrote %s to %s", ", ".join(files), out_dir)
    return manifest


def theta_dict(profile: ThresholdProfile, pairs: Iterable[Sequence[str]] | None = None) -> dict[str, Any]:
    eq1 = eq1_predicate(profile)
    try:
        values = theta_values(profile, pairs)
    except BlindsimException as e:
        logger.warning("theta not evaluated: %s", e.message)
        values = []
    return {
        "eq1": {"canonical": eq1.canonical, "literal": eq1.literal},
        "theta": [
            {"pair": list(t.pair), "index": t.index, "value": t.value, "controllable": t.controllable}
            for t in values
        ],
        "not_linear": sorted(profile.not_linear),
    }


def write_calibration(
    profile: ThresholdProfile, out_dir: Path, pairs: Iterable[Sequence[str]] | None = None
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [
        (detector_id, index, repr(point.never_click_w), repr(point.always_click_w))
        for detector_id, points in profile.points.items()
        for index, point in enumerate(points)
    ]
    _write_csv(out_dir / "thresholds.csv", THRESHOLD_CSV_COLUMNS, rows)
    _write_json(out_dir / "theta.json", theta_dict(profile, pairs))
    logger.info("wrote thresholds.csv, theta.json to %s", out_dir)


def sweep_metrics(report: ScenarioReport) -> dict[str, float | None]:
    summary = report.summary()
    temperatures = report.max_temperature_k.values()
    return {
        "click_rate": summary["click_rate"],
        "qber": summary["qber"],
        "eve_control_fraction": summary["eve_control_fraction"],
        "multi_fraction": summary["multi_fraction"],
        "alarm": float(report.verdict.alarm),
        "scaling_p": report.verdict.scaling.p_value,
        "double_p": report.verdict.double_click.p_value,
        "max_temperature_k": max(temperatures) if temperatures else None,
        "thermal_blinded": float(report.thermally_blinded),
        "damaged": float(report.stats.damaged),
    }


def write_sweep_csv(
    parameter: str, results: Sequence[tuple[Any, Mapping[str, float | None]]], path: Path
) -> None:
    """Long format: one row per (value, metric), values in the order given."""
    rows = [
        (parameter, value, metric, "" if metric_value is None else repr(float(metric_value)))
        for value, metrics in results
        for metric, metric_value in metrics.items()
    ]
    _write_csv(path, SWEEP_CSV_COLUMNS, rows)
