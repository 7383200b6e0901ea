import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from timebin_qec.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return path


BASE = {
    "schema_version": 1,
    "seed": 5,
    "trials": 300,
    "workers": 1,
    "qubit": {"kind": "haar"},
    "channel": {"kind": "uniform_theta"},
}


@pytest.mark.parametrize("command", ["reject", "correct"])
def test_experiment_writes_report_and_csv(command, tmp_path, capsys):
    out = tmp_path / "out"
    assert main([command, "--config", str(write(tmp_path, BASE)), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["protocol"] == command and report["seed"] == 5
    assert report["aggregates"]["trials"] == 300
    if command == "correct":
        agg = report["aggregates"]
        assert "mean_port1" in agg and "mean_port2" in agg
    rows = list(csv.reader((out / "trials.csv").open()))
    assert len(rows) == 301
    assert "wrote" in capsys.readouterr().out


def test_noiseless_config_accepts_everything(tmp_path):
    out = tmp_path / "o"
    assert main(["reject", "--config", str(CONFIGS / "fixed_noiseless.json"), "--out", str(out)]) == 0
    agg = json.loads((out / "report.json").read_text())["aggregates"]
    assert agg["mean_accept"] == 1.0


def test_repeated_runs_are_byte_identical(tmp_path):
    cfg = write(tmp_path, dict(BASE, shot_noise=True))
    for name in ("a", "b"):
        assert main(["correct", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    for f in ("report.json", "trials.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_worker_count_does_not_change_files(tmp_path):
    serial = write(tmp_path, dict(BASE, trials=2500, workers=1), "s.json")
    parallel = write(tmp_path, dict(BASE, trials=2500, workers=3), "p.json")
    main(["reject", "--config", str(serial), "--out", str(tmp_path / "s")])
    main(["reject", "--config", str(parallel), "--out", str(tmp_path / "p")])
    for f in ("report.json", "trials.csv"):
        assert (tmp_path / "s" / f).read_bytes() == (tmp_path / "p" / f).read_bytes()


def test_seed_and_trial_overrides(tmp_path):
    cfg = write(tmp_path, BASE)
    main(["reject", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "9", "--trials", "20"])
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["seed"] == 9 and report["config"]["trials"] == 20
    assert report["config"]["channel"]["seed"] == 9


def test_explicit_channel_seed_survives_override(tmp_path):
    cfg = write(tmp_path, dict(BASE, channel={"kind": "uniform_theta", "seed": 77}))
    main(["reject", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "9"])
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["config"]["channel"]["seed"] == 77


def test_sweep_outputs(tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(CONFIGS / "sweep_reject.json"), "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "sweep.csv").open()))
    assert [float(r["p_accept"]) for r in rows] == pytest.approx([1, 0.75, 0.5, 0.25, 0], abs=1e-15)
    assert rows[-1]["fidelity_accept"] == ""
    doc = json.loads((out / "sweep.json").read_text())
    assert len(doc["rows"]) == 5 and doc["columns"][0] == "theta"


def test_sweep_grid_form(tmp_path):
    cfg = write(tmp_path, {
        "schema_version": 1,
        "sweep": {"protocol": "correct", "start": 0, "stop": 1.5707963267948966, "steps": 7},
    })
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader((tmp_path / "o" / "sweep.csv").open()))
    assert len(rows) == 7
    for r in rows:
        theta = float(r["theta"])
        assert float(r["p_port1"]) == pytest.approx(np.cos(theta) ** 2, abs=1e-12)
        assert float(r["p_port1"]) + float(r["p_port2"]) == pytest.approx(1.0, abs=1e-12)


def test_verify_passes(capsys):
    assert main(["verify", "--config", str(CONFIGS / "verify.json")]) == 0
    out = capsys.readouterr().out
    assert "reject" in out and "correct" in out and "MISMATCH" not in out


def test_verify_detects_corrupted_oracle(monkeypatch, tmp_path, capsys):
    import timebin_qec.oracle as oracle

    def broken(basis, mode):
        m = np.eye(basis.dim, dtype=complex)
        m[0, 0] = -1.0
        return m

    monkeypatch.setattr(oracle, "hwp_matrix", broken)
    cfg = write(tmp_path, {"schema_version": 1, "verify": {"samples": 5}})
    assert main(["verify", "--config", str(cfg)]) == 1
    assert "MISMATCH" in capsys.readouterr().out


@pytest.mark.parametrize(
    "obj,command,field",
    [
        (dict(BASE, colour="red"), "reject", "colour"),
        (dict(BASE, trials=0), "reject", "trials"),
        (dict(BASE, schema_version=2), "reject", "schema_version"),
        (dict(BASE, channel={"kind": "small_theta"}), "reject", "theta_max"),
        (dict(BASE, channel={"kind": "small_theta", "theta_max": 3}), "reject", "theta_max"),
        (dict(BASE, qubit={"kind": "fixed", "alpha": 1, "beta": 1}), "reject", "qubit"),
        ({"schema_version": 1, "trials": 10}, "correct", "channel"),
        ({"schema_version": 1}, "sweep", "sweep"),
        ({"schema_version": 1, "sweep": {"thetas": []}}, "sweep", "empty"),
        ({"schema_version": 1}, "verify", "verify.samples"),
        ("{not json", "reject", "JSON"),
    ],
)
def test_config_errors_exit_2(obj, command, field, tmp_path, caplog):
    cfg = write(tmp_path, obj)
    assert main([command, "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert field in caplog.text
    assert not (tmp_path / "o").exists()


def test_zero_trials_override_exit_2(tmp_path):
    cfg = write(tmp_path, BASE)
    assert main(["reject", "--config", str(cfg), "--trials", "0"]) == 2


def test_missing_config_exit_3(tmp_path):
    assert main(["reject", "--config", str(tmp_path / "nope.json")]) == 3


def test_unwritable_output_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = write(tmp_path, dict(BASE, trials=3))
    assert main(["reject", "--config", str(cfg), "--out", str(blocker / "sub")]) == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "timebin_qec", "reject", "--config",
         str(CONFIGS / "fixed_noiseless.json"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "mean acceptance 1" in proc.stdout
