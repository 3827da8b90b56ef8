"""Command-line interface: exit codes, flag precedence, and outputs."""

import json
import subprocess
import sys

from mimosim.cli import main
from mimosim.config import SimConfig

from helpers import read_csv


def small_config(**overrides):
    base = dict(
        num_ues=8,
        num_drops=1,
        num_realizations=1,
        num_prbs=10,
        deployments=("single-central",),
        schemes=("network",),
        antennas=(24,),
        seed=3,
    )
    base.update(overrides)
    return SimConfig(**base)


def test_simulate_with_config_file(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    small_config().save(cfg_path)
    out = tmp_path / "run"
    rc = main(["simulate", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    assert "records.csv" in capsys.readouterr().out
    _, rows = read_csv(out / "records.csv")
    assert len(rows) == 1


def test_flags_override_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    small_config(num_drops=3).save(cfg_path)
    out = tmp_path / "run"
    rc = main(
        ["simulate", "--config", str(cfg_path), "--out", str(out), "--drops", "1"]
    )
    assert rc == 0
    payload = json.loads((out / "manifest.json").read_text())
    assert payload["config"]["num_drops"] == 1
    _, rows = read_csv(out / "records.csv")
    assert len(rows) == 1


def test_simulate_unknown_deployment_exits_2(tmp_path, capsys):
    rc = main(
        ["simulate", "--out", str(tmp_path), "--deployment", "bogus", "--drops", "1"]
    )
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err


def test_simulate_bad_antenna_list_exits_2(tmp_path):
    rc = main(["simulate", "--out", str(tmp_path), "--antennas", "24,x"])
    assert rc == 2


def test_simulate_bad_config_file_exits_2(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text("{")
    rc = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "run")])
    assert rc == 2


def test_snrmap_requires_deployment_and_antennas(tmp_path):
    assert main(["snrmap", "--out", str(tmp_path), "--antennas", "24"]) == 2
    assert main(["snrmap", "--out", str(tmp_path), "--deployment", "two-indoor"]) == 2


def test_snrmap_small_run(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    small_config().save(cfg_path)
    out = tmp_path / "map"
    rc = main(
        [
            "snrmap",
            "--config", str(cfg_path),
            "--out", str(out),
            "--deployment", "single-central",
            "--antennas", "24",
            "--grid-step", "25",
            "--realizations", "2",
        ]
    )
    assert rc == 0
    _, rows = read_csv(out / "snr_map.csv")
    assert len(rows) == 8
    assert (out / "walls.csv").exists()


def test_snrmap_zero_realizations_exits_2(tmp_path):
    rc = main(
        [
            "snrmap",
            "--out", str(tmp_path),
            "--deployment", "single-central",
            "--antennas", "24",
            "--grid-step", "25",
            "--realizations", "0",
        ]
    )
    assert rc == 2


def test_capacity_cli(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    small_config(num_ues=4).save(cfg_path)
    out = tmp_path / "cap"
    rc = main(
        [
            "capacity",
            "--config", str(cfg_path),
            "--out", str(out),
            "--deployment", "two-indoor",
            "--antennas", "4",
        ]
    )
    assert rc == 0
    _, rows = read_csv(out / "capacity.csv")
    assert len(rows) == 1
    row = rows[0]
    assert float(row["capacity_bound"]) >= float(row["se_total_power"]) - 1e-9
    # The recorded config reflects the forced Gaussian modulation.
    payload = json.loads((out / "manifest.json").read_text())
    assert payload["config"]["modulation"] == "gaussian"


def test_tables_cli(tmp_path):
    rc = main(["tables", "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "qam256_infotable.csv").read_text().splitlines()
    assert lines[0].startswith("# info table qam256")
    assert lines[1] == "snr_db,mi_bits,mmse"


def test_threads_env_override(tmp_path, monkeypatch):
    cfg_path = tmp_path / "cfg.json"
    small_config(num_drops=2).save(cfg_path)
    monkeypatch.delenv("MIMOSIM_THREADS", raising=False)
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("MIMOSIM_THREADS", "2")
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
    assert (
        (tmp_path / "a" / "records.csv").read_bytes()
        == (tmp_path / "b" / "records.csv").read_bytes()
    )
    monkeypatch.setenv("MIMOSIM_THREADS", "abc")
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "c")]) == 2


def test_numerical_failure_exits_3(tmp_path, monkeypatch, capsys):
    import mimosim.cli
    from mimosim.exceptions import NumericalError

    def boom(cfg, out_dir):
        raise NumericalError("synthetic failure")

    monkeypatch.setattr(mimosim.cli, "run_sweep", boom)
    rc = main(["simulate", "--out", str(tmp_path)])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_missing_out_flag_exits_2_in_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "mimosim.cli", "simulate"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "--out" in proc.stderr
