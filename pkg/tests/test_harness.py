"""End-to-end harness runs: outputs, reproducibility, skips, and trends."""

import dataclasses
import json

import numpy as np
import pytest

from mimosim.config import SimConfig
from mimosim.exceptions import ConfigurationError
from mimosim.harness import (
    CAPACITY_HEADER,
    LONG_HEADER,
    MAP_HEADER,
    RECORDS_HEADER,
    SKIPS_HEADER,
    SUMMARY_HEADER,
    modulation_alphabet,
    run_capacity_compare,
    run_snr_map,
    run_sweep,
    thread_count,
)

from helpers import read_csv


def tiny_config(**overrides):
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


def test_sweep_outputs_single_cell(tmp_path):
    cfg = tiny_config()
    manifest = run_sweep(cfg, tmp_path)

    header, rows = read_csv(tmp_path / "records.csv")
    assert ",".join(header) == RECORDS_HEADER
    assert len(rows) == 1
    row = rows[0]
    assert row["deployment"] == "single-central"
    assert row["scheme"] == "network"
    assert row["modulation"] == "qam256"
    assert row["M"] == "24"
    assert row["K"] == "8"
    assert float(row["sigmaE2_db"]) == float("-inf")
    assert row["drop"] == "0"
    assert row["realization"] == "0"
    assert float(row["sum_se"]) > 0.0
    assert 1.0 / 8.0 <= float(row["jain"]) <= 1.0

    lheader, lrows = read_csv(tmp_path / "records_long.csv")
    assert ",".join(lheader) == LONG_HEADER
    assert len(lrows) == 8
    assert sorted(int(r["ue_index"]) for r in lrows) == list(range(8))
    assert sum(float(r["se"]) for r in lrows) == pytest.approx(float(row["sum_se"]))

    sheader, srows = read_csv(tmp_path / "summary.csv")
    assert ",".join(sheader) == SUMMARY_HEADER
    assert len(srows) == 1
    assert srows[0]["num_records"] == "1"
    assert float(srows[0]["sum_se_mean"]) == pytest.approx(float(row["sum_se"]))

    kheader, krows = read_csv(tmp_path / "skips.csv")
    assert ",".join(kheader) == SKIPS_HEADER
    assert krows == []

    # Line 2 of every CSV points back at the manifest.
    for name in ("records.csv", "records_long.csv", "summary.csv", "skips.csv"):
        lines = (tmp_path / name).read_text().splitlines()
        assert lines[1] == f"# manifest: {cfg.config_hash()}"

    payload = json.loads((tmp_path / "manifest.json").read_text())
    assert payload["config_hash"] == cfg.config_hash() == manifest.config_hash
    assert payload["seed"] == cfg.seed
    assert payload["outputs"] == [
        "records.csv", "records_long.csv", "summary.csv", "skips.csv"
    ]
    assert SimConfig.from_dict(payload["config"]) == cfg


def test_sweep_same_seed_byte_identical(tmp_path):
    cfg = tiny_config(num_drops=2)
    run_sweep(cfg, tmp_path / "a")
    run_sweep(cfg, tmp_path / "b")
    for name in ("records.csv", "records_long.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_thread_count_does_not_change_outputs(tmp_path):
    cfg = tiny_config(num_drops=3)
    run_sweep(cfg, tmp_path / "serial")
    run_sweep(dataclasses.replace(cfg, threads=3), tmp_path / "pooled")
    for name in ("records.csv", "records_long.csv", "summary.csv"):
        assert (
            (tmp_path / "serial" / name).read_bytes()
            == (tmp_path / "pooled" / name).read_bytes()
        )


def test_thread_count_env_override(monkeypatch):
    cfg = tiny_config(threads=2)
    monkeypatch.delenv("MIMOSIM_THREADS", raising=False)
    assert thread_count(cfg) == 2
    monkeypatch.setenv("MIMOSIM_THREADS", "5")
    assert thread_count(cfg) == 5
    monkeypatch.setenv("MIMOSIM_THREADS", "zero")
    with pytest.raises(ConfigurationError):
        thread_count(cfg)
    monkeypatch.setenv("MIMOSIM_THREADS", "0")
    with pytest.raises(ConfigurationError):
        thread_count(cfg)


def test_modulation_alphabet_names():
    assert modulation_alphabet("gaussian").mi(1e9) > 20
    assert modulation_alphabet("qam256") is modulation_alphabet("qam256")
    with pytest.raises(ConfigurationError):
        modulation_alphabet("qam9000")


def test_sweep_antenna_trend_and_grid_completeness(tmp_path):
    cfg = SimConfig(
        num_ues=24,
        num_drops=2,
        num_realizations=1,
        num_prbs=10,
        deployments=("two-indoor",),
        schemes=("local", "lsmimo", "network"),
        antennas=(24, 48, 96),
        seed=7,
    )
    run_sweep(cfg, tmp_path)
    _, rows = read_csv(tmp_path / "records.csv")
    _, skips = read_csv(tmp_path / "skips.csv")

    ran = {(r["scheme"], int(r["M"])) for r in rows}
    skipped = {(r["scheme"], int(r["M"])) for r in skips}
    full = {(s, m) for s in cfg.schemes for m in cfg.antennas}
    assert ran | skipped == full
    assert ran & skipped == set()
    # Per-site ZF toward all 24 UEs is infeasible only at 12 antennas/site.
    assert skipped == {("lsmimo", 24)}
    assert all("antennas per site" in r["reason"] for r in skips)

    _, srows = read_csv(tmp_path / "summary.csv")
    mean_by = {
        (r["scheme"], int(r["M"])): float(r["sum_se_mean"]) for r in srows
    }
    network = [mean_by[("network", m)] for m in cfg.antennas]
    assert network[0] <= network[1] <= network[2]
    # Pooled-array ZF beats per-site ZF once both are feasible.
    assert mean_by[("network", 96)] > mean_by[("local", 96)]


def test_sweep_estimation_error_is_paired_and_degrading(tmp_path):
    cfg = tiny_config(
        deployments=("two-indoor",),
        num_drops=2,
        num_realizations=2,
        nmse_db=(float("-inf"), -10.0),
        seed=5,
    )
    run_sweep(cfg, tmp_path)
    _, rows = read_csv(tmp_path / "records.csv")
    by_level = {}
    for r in rows:
        key = (r["drop"], r["realization"])
        by_level.setdefault(key, {})[float(r["sigmaE2_db"])] = float(r["sum_se"])
    assert len(by_level) == 4
    for key, levels in by_level.items():
        assert set(levels) == {float("-inf"), -10.0}
        assert levels[-10.0] < levels[float("-inf")], key


def test_sweep_single_ue_matched_filter(tmp_path):
    cfg = tiny_config(num_ues=1, schemes=("mrt-single",), seed=2)
    run_sweep(cfg, tmp_path / "one")
    _, rows = read_csv(tmp_path / "one" / "records.csv")
    assert len(rows) == 1
    assert rows[0]["scheme"] == "mrt-single"
    assert float(rows[0]["jain"]) == 1.0

    run_sweep(dataclasses.replace(cfg, num_ues=2), tmp_path / "two")
    _, rows2 = read_csv(tmp_path / "two" / "records.csv")
    _, skips2 = read_csv(tmp_path / "two" / "skips.csv")
    assert rows2 == []
    assert len(skips2) == 1
    assert "num_ues == 1" in skips2[0]["reason"]


def test_sweep_placement_skip_has_reason(tmp_path):
    cfg = tiny_config(
        deployments=("forty-indoor",), schemes=("network", "local"), antennas=(48,)
    )
    run_sweep(cfg, tmp_path)
    _, rows = read_csv(tmp_path / "records.csv")
    _, skips = read_csv(tmp_path / "skips.csv")
    assert rows == []
    assert len(skips) == 2
    for r in skips:
        assert r["deployment"] == "forty-indoor"
        assert r["M"] == "48"
        assert "divisible" in r["reason"]


def test_snr_map_outputs(tmp_path):
    cfg = tiny_config()
    run_snr_map(
        cfg, "single-central", 24, tmp_path / "a", grid_step_m=25.0, realizations=3
    )
    header, rows = read_csv(tmp_path / "a" / "snr_map.csv")
    assert ",".join(header) == MAP_HEADER
    assert len(rows) == 8  # 4 x-cells times 2 y-cells at a 25 m step
    xs = sorted({float(r["x"]) for r in rows})
    ys = sorted({float(r["y"]) for r in rows})
    assert xs == [12.5, 37.5, 62.5, 87.5]
    assert ys == [12.5, 37.5]
    assert all(np.isfinite(float(r["snr_db"])) for r in rows)

    walls_lines = (tmp_path / "a" / "walls.csv").read_text().splitlines()
    assert walls_lines[0] == "x1,y1,x2,y2"
    assert walls_lines[1] == f"# manifest: {cfg.config_hash()}"

    run_snr_map(
        cfg, "single-central", 24, tmp_path / "b", grid_step_m=25.0, realizations=3
    )
    assert (
        (tmp_path / "a" / "snr_map.csv").read_bytes()
        == (tmp_path / "b" / "snr_map.csv").read_bytes()
    )


def test_snr_map_rejects_bad_arguments(tmp_path):
    cfg = tiny_config()
    with pytest.raises(ConfigurationError):
        run_snr_map(cfg, "single-central", 24, tmp_path, grid_step_m=0.0)
    with pytest.raises(ConfigurationError):
        run_snr_map(cfg, "single-central", 24, tmp_path, realizations=0)
    with pytest.raises(ConfigurationError):
        run_snr_map(cfg, "no-such-layout", 24, tmp_path)


def test_snr_map_mirror_symmetry(tmp_path):
    # The floor plan and the two-indoor anchors are symmetric about both
    # x = 50 and y = 25, so the averaged map must match under mirroring up
    # to residual sampling noise.
    cfg = tiny_config(seed=13)
    run_snr_map(cfg, "two-indoor", 24, tmp_path, grid_step_m=12.5, realizations=200)
    _, rows = read_csv(tmp_path / "snr_map.csv")
    assert len(rows) == 32
    value = {(float(r["x"]), float(r["y"])): float(r["snr_db"]) for r in rows}
    diffs = []
    for (x, y), v in value.items():
        diffs.append(abs(v - value[(100.0 - x, y)]))
        diffs.append(abs(v - value[(x, 50.0 - y)]))
    assert max(diffs) < 1.5
    assert float(np.mean(diffs)) < 0.5


def test_capacity_compare(tmp_path):
    cfg = SimConfig(
        num_ues=4,
        num_drops=2,
        num_realizations=1,
        num_prbs=10,
        modulation="gaussian",
        deployments=("two-indoor",),
        seed=11,
    )
    run_capacity_compare(cfg, "two-indoor", [4, 5, 2, 8], tmp_path)
    header, rows = read_csv(tmp_path / "capacity.csv")
    assert ",".join(header) == CAPACITY_HEADER
    assert len(rows) == 4  # M in {4, 8}, 2 drops, 1 realization
    for r in rows:
        bound = float(r["capacity_bound"])
        se_total = float(r["se_total_power"])
        se_per_bs = float(r["se_per_bs"])
        assert bound > 0.0
        assert bound >= se_total - 1e-9
        assert se_total >= se_per_bs - 1e-9

    _, skips = read_csv(tmp_path / "skips.csv")
    reasons = {int(r["M"]): r["reason"] for r in skips}
    assert set(reasons) == {5, 2}
    assert "divisible" in reasons[5]
    assert "antennas in total" in reasons[2]


def test_capacity_compare_rejects_unknown_deployment(tmp_path):
    cfg = tiny_config(modulation="gaussian")
    with pytest.raises(ConfigurationError):
        run_capacity_compare(cfg, "bogus", [4], tmp_path)
