import csv
import json

import pytest

from blindsim.cli import EXIT_CONFIG, EXIT_OK, EXIT_UNBRACKETED, main, parse_grid, parse_values
from blindsim.exceptions import ConfigError

SCENARIO = """
engine:
  seed: 11
  slots: 400
detector:
  class: active
eve:
  strategy: active-blind-cw
bob:
  basis_mechanism: active-two-detector
  voa_mode: {voa_mode}
  voa_fixed_db: {voa_db}
"""


@pytest.fixture
def scenario(tmp_path, monkeypatch):
    monkeypatch.setenv("BLINDSIM_THREADS", "1")

    def write(voa_mode="fixed", voa_db=0):
        path = tmp_path / f"scenario-{voa_mode}-{voa_db}.yaml"
        path.write_text(SCENARIO.format(voa_mode=voa_mode, voa_db=voa_db), encoding="utf-8")
        return str(path)

    return write


def _read_csv(path):
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


def test_run_writes_every_result_file(scenario, tmp_path):
    out = tmp_path / "run"
    assert main(["run", "--config", scenario(), "--out", str(out)]) == EXIT_OK
    for name in ("slots.csv", "summary.json", "verdict.json", "manifest.json"):
        assert (out / name).exists()
    rows = _read_csv(out / "slots.csv")
    assert rows[0][:3] == ["slot", "alice_bit", "alice_basis"]
    assert len(rows) == 401
    summary = json.loads((out / "summary.json").read_text())
    assert summary["slots"] == 400
    assert summary["seed"] == 11
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["files"]) == {"slots.csv", "summary.json", "verdict.json"}
    assert manifest["seed"] == 11
    assert manifest["version"]


def test_runs_are_byte_identical(scenario, tmp_path):
    config = scenario()
    for name in ("a", "b"):
        assert main(["run", "--config", config, "--out", str(tmp_path / name)]) == EXIT_OK
    first = json.loads((tmp_path / "a" / "manifest.json").read_text())
    second = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert first["files"] == second["files"]
    assert (tmp_path / "a" / "slots.csv").read_bytes() == (tmp_path / "b" / "slots.csv").read_bytes()


def test_seed_override_changes_the_run(scenario, tmp_path):
    config = scenario()
    main(["run", "--config", config, "--out", str(tmp_path / "a")])
    main(["run", "--config", config, "--seed", "12", "--out", str(tmp_path / "b")])
    assert json.loads((tmp_path / "b" / "summary.json").read_text())["seed"] == 12
    assert (tmp_path / "a" / "slots.csv").read_bytes() != (tmp_path / "b" / "slots.csv").read_bytes()


def test_attenuation_above_ceiling_is_a_config_error(scenario, tmp_path):
    out = tmp_path / "run"
    assert main(["run", "--config", scenario(voa_db=90), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG


def test_calibrate_writes_thresholds_and_theta(scenario, tmp_path):
    out = tmp_path / "cal"
    code = main(["calibrate", "--config", scenario(), "--grid", "0,2e-5,201,200", "--out", str(out)])
    assert code == EXIT_OK
    rows = _read_csv(out / "thresholds.csv")
    assert rows[0] == ["detector", "index", "never_click_w", "always_click_w"]
    assert [row[0] for row in rows[1:]] == ["D0", "D1"]
    for row in rows[1:]:
        assert float(row[2]) == pytest.approx(4e-6, abs=0.2e-6)
        assert float(row[3]) == pytest.approx(7e-6, abs=0.2e-6)
    theta = json.loads((out / "theta.json").read_text())
    [value] = theta["theta"]
    assert value["pair"] == ["D0", "D1"]
    assert value["value"] == pytest.approx(4 / 7, abs=0.05)
    assert value["controllable"]
    assert theta["eq1"]["canonical"]


def test_calibrate_with_band_endpoints_within_a_grid_step(tmp_path, monkeypatch):
    path = tmp_path / "band.yaml"
    path.write_text(
        "detector:\n  class: active\n  never_click_power_w: 4.0e-6\n  always_click_power_w: 8.0e-6\n"
        "bob:\n  basis_mechanism: active-two-detector\n",
        encoding="utf-8",
    )
    out = tmp_path / "cal"
    args = ["calibrate", "--config", str(path), "--detector", "D0", "--grid", "1e-6,16e-6,64,400"]
    assert main([*args, "--out", str(out)]) == EXIT_OK
    [row] = _read_csv(out / "thresholds.csv")[1:]
    step = 15e-6 / 63
    assert float(row[2]) == pytest.approx(4e-6, abs=step)
    assert float(row[3]) == pytest.approx(8e-6, abs=step)


def test_grid_below_the_band_fails_calibration(scenario, tmp_path):
    code = main(["calibrate", "--config", scenario(), "--grid", "0,3e-6,11,20", "--out", str(tmp_path)])
    assert code == EXIT_UNBRACKETED


def test_calibrate_unknown_detector(scenario, tmp_path):
    args = ["calibrate", "--config", scenario(), "--detector", "D5", "--grid", "0,2e-5,21,10"]
    assert main([*args, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_sweep_writes_long_format(scenario, tmp_path):
    out = tmp_path / "sweep"
    args = ["sweep", "--config", scenario(), "--param", "bob.voa_fixed_db", "--values", "0,10,20,30"]
    assert main([*args, "--out", str(out)]) == EXIT_OK
    rows = _read_csv(out / "sweep.csv")
    assert rows[0] == ["parameter", "value", "metric", "metric_value"]
    values = [row[1] for row in rows[1:]]
    assert sorted(set(values), key=float) == ["0", "10", "20", "30"]
    assert values == sorted(values, key=float)
    assert {row[0] for row in rows[1:]} == {"bob.voa_fixed_db"}
    metrics = {row[2] for row in rows[1:]}
    assert {"click_rate", "alarm", "thermal_blinded"} <= metrics
    assert len(rows) - 1 == 4 * len(metrics)


@pytest.mark.parametrize(
    "param, values",
    [("bob.voa_fixed_db", ""), ("bob.voa_fixed_db", " , "), ("engine.tick_ns", "1,2"), ("bob.nope", "1")],
)
def test_sweep_rejects_bad_arguments(scenario, tmp_path, param, values):
    args = ["sweep", "--config", scenario(), "--param", param, "--values", values]
    assert main([*args, "--out", str(tmp_path / "sweep")]) == EXIT_CONFIG
    assert not (tmp_path / "sweep" / "sweep.csv").exists()


def test_sweep_rejects_an_invalid_point_before_running(scenario, tmp_path):
    args = ["sweep", "--config", scenario(), "--param", "bob.voa_fixed_db", "--values", "0,90"]
    assert main([*args, "--out", str(tmp_path / "sweep")]) == EXIT_CONFIG


def test_parse_grid():
    grid, trials = parse_grid("1e-6, 2e-6, 3, 50")
    assert grid == pytest.approx([1e-6, 1.5e-6, 2e-6])
    assert trials == 50
    for spec in ("1,2,3", "2e-6,1e-6,3,5", "0,1,1,5", "0,1,3,0", "a,b,c,d"):
        with pytest.raises(ConfigError):
            parse_grid(spec)


def test_parse_values():
    assert parse_values("0, 10,2.5,fixed") == [0, 10, 2.5, "fixed"]
    with pytest.raises(ConfigError):
        parse_values(",,")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("blindsim ")
