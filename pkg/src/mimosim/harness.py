"""Experiment orchestration: sweep runs, the coverage map, capacity
comparisons, and CSV persistence with a reproducibility manifest.

Seed discipline: every random stream is derived from the master seed with a
fixed spawn key (stream label plus grid coordinates), so any subset of the
grid, any worker count, and any execution order reproduce the same draws.
"""

from __future__ import annotations

import dataclasses
import datetime
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import DualMacProblem, solve_dual_mac
from .channel import (
    KIND_LOS,
    KIND_NLOS,
    KIND_OUTDOOR,
    apply_estimation_error,
    classify_links,
    generate_channel,
    sample_error_unit,
)
from .config import SimConfig
from .exceptions import ConfigurationError
from .geometry import (
    DEPLOYMENT_NAMES,
    Deployment,
    UeDrop,
    build_floor_plan,
    export_walls,
    place_deployment,
    sample_ue_drop,
)
from .metrics import MetricsRecord, aggregate, compute_sinr, make_record, spectral_efficiency
from .modulation import GaussianInput, InfoTable, build_info_table, square_qam
from .precoding import (
    SCHEME_LOCAL,
    SCHEME_LSMIMO,
    SCHEME_MRT_SINGLE,
    SCHEME_NETWORK,
    SCHEME_NETWORK_TOTAL,
    associate_ues,
    audit_budgets,
    precode_local,
    precode_lsmimo,
    precode_mrt_single,
    precode_network,
)

# Stream labels for the counter-based seed split.
_STREAM_DROP = 0
_STREAM_PROFILE = 1
_STREAM_FADING = 2
_STREAM_ERROR = 3
_STREAM_MAP_SHADOW = 4
_STREAM_MAP_FADING = 5

RECORDS_HEADER = (
    "deployment,scheme,modulation,M,K,sigmaE2_db,drop,realization,"
    "sum_se,jain,se_p5,se_p95"
)
LONG_HEADER = "deployment,scheme,modulation,M,K,sigmaE2_db,drop,realization,ue_index,se"
SUMMARY_HEADER = (
    "deployment,scheme,modulation,M,K,sigmaE2_db,num_records,"
    "sum_se_mean,sum_se_p5,sum_se_p95,jain_mean,jain_p5,jain_p95"
)
SKIPS_HEADER = "deployment,scheme,modulation,M,K,sigmaE2_db,reason"
MAP_HEADER = "x,y,snr_db"
CAPACITY_HEADER = "deployment,M,K,drop,realization,capacity_bound,se_total_power,se_per_bs"

_MAP_CHUNK = 512
_UE_HEIGHT_M = 1.5


def _stream(master_seed: int, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=master_seed, spawn_key=tuple(int(v) for v in key)
    )


def thread_count(cfg: SimConfig) -> int:
    """Worker count, overridable through the MIMOSIM_THREADS environment."""
    env = os.environ.get("MIMOSIM_THREADS")
    if env is None:
        return cfg.threads
    try:
        n = int(env)
    except ValueError:
        raise ConfigurationError(f"MIMOSIM_THREADS must be an integer, got {env!r}")
    if n < 1:
        raise ConfigurationError("MIMOSIM_THREADS must be positive")
    return n


@lru_cache(maxsize=None)
def _qam256_table() -> InfoTable:
    return build_info_table(square_qam(256))


def modulation_alphabet(name: str):
    """The MI/MMSE provider behind a configured modulation name."""
    if name == "gaussian":
        return GaussianInput()
    if name == "qam256":
        return _qam256_table()
    raise ConfigurationError(f"unknown modulation {name!r}")


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility sidecar referenced by every output CSV."""

    config_hash: str
    seed: int
    code_version: str
    started_utc: str
    finished_utc: str
    outputs: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "seed": self.seed,
            "code_version": self.code_version,
            "started_utc": self.started_utc,
            "finished_utc": self.finished_utc,
            "outputs": list(self.outputs),
        }

    def save(self, path, config: SimConfig | None = None) -> None:
        payload = self.to_dict()
        if config is not None:
            payload["config"] = config.to_dict()
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _reason(text: str) -> str:
    """Skip reasons stay single-field in naively split CSV."""
    return text.replace(",", ";")


def _write_csv(path, header: str, manifest_hash: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        fh.write(f"# manifest: {manifest_hash}\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _insert_manifest_line(path, manifest_hash: str) -> None:
    lines = Path(path).read_text().splitlines(keepends=True)
    lines.insert(1, f"# manifest: {manifest_hash}\n")
    Path(path).write_text("".join(lines))


# ---------------------------------------------------------------------------
# Sweep


def _effective_budgets(cfg: SimConfig, deployment: Deployment) -> tuple[float, ...]:
    """Per-site power spent on the simulated representative subcarriers."""
    return tuple(site.power_budget * cfg.budget_fraction for site in deployment.sites)


def _scheme_skip_reason(cfg: SimConfig, deployment: Deployment, scheme: str):
    k = cfg.num_ues
    if scheme == SCHEME_MRT_SINGLE and k != 1:
        return f"single-UE matched filter needs num_ues == 1, got {k}"
    if scheme == SCHEME_LSMIMO:
        m_i = min(site.num_antennas for site in deployment.sites)
        if m_i < k:
            return f"per-site ZF toward all {k} UEs needs {k} antennas per site, got {m_i}"
    if scheme in (SCHEME_NETWORK, SCHEME_NETWORK_TOTAL):
        if deployment.total_antennas < k:
            return f"joint ZF needs {k} antennas in total, got {deployment.total_antennas}"
    return None


def _build_precoder(scheme, design, deployment, assoc, alphabet, noise_var, budgets):
    if scheme == SCHEME_LOCAL:
        return precode_local(design, assoc, deployment, alphabet, noise_var, budgets)
    if scheme == SCHEME_LSMIMO:
        return precode_lsmimo(design, assoc, deployment, alphabet, noise_var, budgets)
    if scheme == SCHEME_NETWORK:
        return precode_network(
            design, deployment, alphabet, noise_var, budgets, constraint="per-bs"
        )
    if scheme == SCHEME_NETWORK_TOTAL:
        return precode_network(
            design, deployment, alphabet, noise_var, budgets, constraint="total"
        )
    if scheme == SCHEME_MRT_SINGLE:
        return precode_mrt_single(design, deployment, budgets)
    raise ConfigurationError(f"unknown scheme {scheme!r}")


def _drop_profiles(cfg, plan, deployment, dep_idx, drop_idx, positions):
    """Large-scale link state for one (deployment, drop), fixed across M.

    Site anchor positions do not depend on the per-site antenna count, and
    the per-site draw order is fixed, so every antenna sweep point sees the
    same pathloss and shadowing for a given drop.
    """
    rng = np.random.default_rng(
        _stream(cfg.seed, _STREAM_PROFILE, dep_idx, drop_idx)
    )
    ch_cfg = cfg.channel_config
    return [
        classify_links(plan, site, positions, ch_cfg, rng) for site in deployment.sites
    ]


def _sweep_task(cfg, plan, deployment, alphabet, name, dep_idx, m, drop_idx, schemes):
    ch_cfg = cfg.channel_config
    offsets = cfg.subcarrier_offsets_hz
    noise = cfg.noise_variance_watts
    budgets = _effective_budgets(cfg, deployment)
    drop = sample_ue_drop(
        plan,
        cfg.num_ues,
        seed=_stream(cfg.seed, _STREAM_DROP, drop_idx),
        drop_index=drop_idx,
        ue_height_m=_UE_HEIGHT_M,
    )
    profiles = _drop_profiles(cfg, plan, deployment, dep_idx, drop_idx, drop.positions)
    needs_assoc = any(s in (SCHEME_LOCAL, SCHEME_LSMIMO) for s in schemes)
    records = []
    for r in range(cfg.num_realizations):
        tensor = generate_channel(
            profiles,
            deployment,
            drop,
            ch_cfg,
            offsets,
            realization_index=r,
            seed=_stream(cfg.seed, _STREAM_FADING, dep_idx, m, drop_idx, r),
        )
        # One error draw per realization, shared across the sigma_E^2 sweep
        # and all schemes, so those comparisons are paired.
        unit = sample_error_unit(
            tensor.coeffs.shape,
            seed=_stream(cfg.seed, _STREAM_ERROR, dep_idx, m, drop_idx, r),
        )
        for nmse_db in cfg.nmse_db:
            design = apply_estimation_error(tensor, cfg.sigma_e2_of(nmse_db), unit)
            assoc = associate_ues(design, deployment) if needs_assoc else None
            for scheme in schemes:
                precoder = _build_precoder(
                    scheme, design, deployment, assoc, alphabet, noise, budgets
                )
                audit_budgets(precoder)
                sinrs = compute_sinr(tensor, precoder, noise)
                se = spectral_efficiency(sinrs, alphabet, cfg.se_per_subcarrier)
                records.append(
                    make_record(name, scheme, cfg.modulation, m, nmse_db, drop_idx, r, se)
                )
    return records


def run_sweep(cfg: SimConfig, out_dir) -> RunManifest:
    """Run the full (deployment, M, scheme, sigma_E^2) grid and write CSVs.

    Outputs: records.csv (one row per evaluated cell/drop/realization),
    records_long.csv (per-UE SE rows), summary.csv (per-cell aggregates),
    skips.csv (one row per infeasible cell with its reason), manifest.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    manifest_hash = cfg.config_hash()
    alphabet = modulation_alphabet(cfg.modulation)
    plan = build_floor_plan()

    deployments: dict[tuple[str, int], Deployment] = {}
    skips: list[tuple] = []
    runnable: dict[tuple[str, int], list[str]] = {}
    for name in cfg.deployments:
        for m in cfg.antennas:
            try:
                dep = place_deployment(
                    plan, name, m, p_sum_dbm=cfg.p_sum_dbm, carrier_hz=cfg.carrier_hz
                )
            except ConfigurationError as exc:
                for nmse_db in cfg.nmse_db:
                    for scheme in cfg.schemes:
                        skips.append(
                            (name, scheme, cfg.modulation, m, cfg.num_ues, nmse_db,
                             _reason(str(exc)))
                        )
                continue
            deployments[(name, m)] = dep
            good = []
            for scheme in cfg.schemes:
                reason = _scheme_skip_reason(cfg, dep, scheme)
                if reason is None:
                    good.append(scheme)
                else:
                    for nmse_db in cfg.nmse_db:
                        skips.append(
                            (name, scheme, cfg.modulation, m, cfg.num_ues, nmse_db,
                             _reason(reason))
                        )
            if good:
                runnable[(name, m)] = good

    tasks = [
        (name, DEPLOYMENT_NAMES.index(name), m, drop_idx)
        for name in cfg.deployments
        for m in cfg.antennas
        if (name, m) in runnable
        for drop_idx in range(cfg.num_drops)
    ]

    def _run(task):
        name, dep_idx, m, drop_idx = task
        return _sweep_task(
            cfg,
            plan,
            deployments[(name, m)],
            alphabet,
            name,
            dep_idx,
            m,
            drop_idx,
            runnable[(name, m)],
        )

    workers = thread_count(cfg)
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run, tasks))
    else:
        chunks = [_run(t) for t in tasks]
    records: list[MetricsRecord] = [rec for chunk in chunks for rec in chunk]

    _write_csv(
        out / "records.csv",
        RECORDS_HEADER,
        manifest_hash,
        (
            (
                r.deployment,
                r.scheme,
                r.modulation,
                r.num_antennas,
                r.num_ues,
                r.sigma_e2_db,
                r.drop,
                r.realization,
                r.sum_se,
                r.jain,
                r.se_p5,
                r.se_p95,
            )
            for r in records
        ),
    )
    _write_csv(
        out / "records_long.csv",
        LONG_HEADER,
        manifest_hash,
        (
            (
                r.deployment,
                r.scheme,
                r.modulation,
                r.num_antennas,
                r.num_ues,
                r.sigma_e2_db,
                r.drop,
                r.realization,
                ue,
                float(r.per_ue_se[ue]),
            )
            for r in records
            for ue in range(r.num_ues)
        ),
    )
    _write_csv(
        out / "summary.csv",
        SUMMARY_HEADER,
        manifest_hash,
        (
            (
                s.deployment,
                s.scheme,
                s.modulation,
                s.num_antennas,
                s.num_ues,
                s.sigma_e2_db,
                s.num_records,
                s.sum_se_mean,
                s.sum_se_p5,
                s.sum_se_p95,
                s.jain_mean,
                s.jain_p5,
                s.jain_p95,
            )
            for s in aggregate(records)
        ),
    )
    _write_csv(out / "skips.csv", SKIPS_HEADER, manifest_hash, skips)
    manifest = RunManifest(
        config_hash=manifest_hash,
        seed=cfg.seed,
        code_version=__version__,
        started_utc=started,
        finished_utc=_utc_now(),
        outputs=("records.csv", "records_long.csv", "summary.csv", "skips.csv"),
    )
    manifest.save(out / "manifest.json", config=cfg)
    return manifest


# ---------------------------------------------------------------------------
# Coverage map


def _shadow_sigma_db(cfg, kind: str) -> float:
    ch_cfg = cfg.channel_config
    return {
        KIND_LOS: ch_cfg.los.shadow_sigma_db,
        KIND_NLOS: ch_cfg.nlos.shadow_sigma_db,
        KIND_OUTDOOR: ch_cfg.outdoor_shadow_sigma_db,
    }[kind]


def run_snr_map(
    cfg: SimConfig,
    deployment: str,
    num_antennas: int,
    out_dir,
    grid_step_m: float = 1.0,
    realizations: int = 300,
) -> RunManifest:
    """Single-served-UE SNR at every grid position, averaged in dB.

    Each grid point is evaluated independently: shadowing and fading are
    redrawn per realization (every sample is its own drop), the matched
    filter spends the per-site budgets coherently, and the map value is the
    mean over realizations of 10*log10(mean over subcarriers of the linear
    SNR).  Writes snr_map.csv, the floor-plan walls.csv, and manifest.json.
    """
    if grid_step_m <= 0:
        raise ConfigurationError("grid step must be positive")
    if realizations < 1:
        raise ConfigurationError("need at least one realization")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    manifest_hash = cfg.config_hash()
    plan = build_floor_plan()
    dep = place_deployment(
        plan, deployment, num_antennas, p_sum_dbm=cfg.p_sum_dbm, carrier_hz=cfg.carrier_hz
    )
    dep_idx = DEPLOYMENT_NAMES.index(deployment)
    ch_cfg = cfg.channel_config
    offsets = cfg.subcarrier_offsets_hz
    noise = cfg.noise_variance_watts
    budgets = np.array(_effective_budgets(cfg, dep))

    xs = np.arange(grid_step_m / 2.0, plan.width_m, grid_step_m)
    ys = np.arange(grid_step_m / 2.0, plan.depth_m, grid_step_m)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, _UE_HEIGHT_M)])
    values = np.zeros(pts.shape[0])

    for start in range(0, pts.shape[0], _MAP_CHUNK):
        chunk_idx = start // _MAP_CHUNK
        sub = pts[start : start + _MAP_CHUNK]
        # Geometry (distance, walls, link class) is deterministic; the base
        # shadowing draw is discarded and redrawn per realization below.
        base_rng = np.random.default_rng(
            _stream(cfg.seed, _STREAM_MAP_SHADOW, dep_idx, num_antennas, 0, chunk_idx)
        )
        base = [classify_links(plan, site, sub, ch_cfg, base_rng) for site in dep.sites]
        sigmas = [
            np.array([_shadow_sigma_db(cfg, p.kind) for p in site_prof])
            for site_prof in base
        ]
        ue = UeDrop(positions=sub, drop_index=chunk_idx, seed="map-grid")
        acc = np.zeros(sub.shape[0])
        for r in range(realizations):
            shadow_rng = np.random.default_rng(
                _stream(
                    cfg.seed, _STREAM_MAP_SHADOW, dep_idx, num_antennas, r + 1, chunk_idx
                )
            )
            profiles = []
            for site_prof, sigma in zip(base, sigmas):
                draws = shadow_rng.standard_normal(len(site_prof)) * sigma
                profiles.append(
                    [
                        dataclasses.replace(p, shadowing_db=float(s))
                        for p, s in zip(site_prof, draws)
                    ]
                )
            tensor = generate_channel(
                profiles,
                dep,
                ue,
                ch_cfg,
                offsets,
                realization_index=r,
                seed=_stream(
                    cfg.seed, _STREAM_MAP_FADING, dep_idx, num_antennas, r, chunk_idx
                ),
            )
            amp = np.zeros((sub.shape[0], offsets.size))
            for i, rows_i in enumerate(dep.site_slices):
                amp += np.sqrt(budgets[i] / offsets.size) * np.linalg.norm(
                    tensor.coeffs[:, rows_i, :], axis=1
                )
            acc += 10.0 * np.log10((amp**2 / noise).mean(axis=1))
        values[start : start + sub.shape[0]] = acc / realizations

    _write_csv(
        out / "snr_map.csv",
        MAP_HEADER,
        manifest_hash,
        ((float(p[0]), float(p[1]), float(v)) for p, v in zip(pts, values)),
    )
    export_walls(plan, out / "walls.csv")
    _insert_manifest_line(out / "walls.csv", manifest_hash)
    manifest = RunManifest(
        config_hash=manifest_hash,
        seed=cfg.seed,
        code_version=__version__,
        started_utc=started,
        finished_utc=_utc_now(),
        outputs=("snr_map.csv", "walls.csv"),
    )
    manifest.save(out / "manifest.json", config=cfg)
    return manifest


# ---------------------------------------------------------------------------
# Capacity comparison


def run_capacity_compare(cfg: SimConfig, deployment: str, m_list, out_dir) -> RunManifest:
    """Sum-capacity bound vs. joint ZF spectral efficiency, per realization.

    Gaussian modulation throughout.  Writes capacity.csv with one row per
    (M, drop, realization): the dual-MAC bound under the pooled budget, the
    ZF SE under the same pooled budget, and the ZF SE after per-site
    rescaling.  Infeasible M values go to skips.csv with a reason.
    """
    if deployment not in DEPLOYMENT_NAMES:
        raise ConfigurationError(
            f"unknown deployment {deployment!r}; expected one of {DEPLOYMENT_NAMES}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    manifest_hash = cfg.config_hash()
    alphabet = GaussianInput()
    plan = build_floor_plan()
    ch_cfg = cfg.channel_config
    offsets = cfg.subcarrier_offsets_hz
    noise = cfg.noise_variance_watts
    dep_idx = DEPLOYMENT_NAMES.index(deployment)
    rows: list[tuple] = []
    skips: list[tuple] = []
    for m in m_list:
        try:
            dep = place_deployment(
                plan, deployment, int(m), p_sum_dbm=cfg.p_sum_dbm, carrier_hz=cfg.carrier_hz
            )
        except ConfigurationError as exc:
            skips.append(
                (deployment, SCHEME_NETWORK, "gaussian", int(m), cfg.num_ues,
                 float("-inf"), _reason(str(exc)))
            )
            continue
        reason = _scheme_skip_reason(cfg, dep, SCHEME_NETWORK)
        if reason is not None:
            skips.append(
                (deployment, SCHEME_NETWORK, "gaussian", int(m), cfg.num_ues,
                 float("-inf"), _reason(reason))
            )
            continue
        budgets = _effective_budgets(cfg, dep)
        total_power = float(sum(budgets))
        for drop_idx in range(cfg.num_drops):
            drop = sample_ue_drop(
                plan,
                cfg.num_ues,
                seed=_stream(cfg.seed, _STREAM_DROP, drop_idx),
                drop_index=drop_idx,
                ue_height_m=_UE_HEIGHT_M,
            )
            profiles = _drop_profiles(cfg, plan, dep, dep_idx, drop_idx, drop.positions)
            for r in range(cfg.num_realizations):
                tensor = generate_channel(
                    profiles,
                    dep,
                    drop,
                    ch_cfg,
                    offsets,
                    realization_index=r,
                    seed=_stream(cfg.seed, _STREAM_FADING, dep_idx, m, drop_idx, r),
                )
                problem = DualMacProblem(
                    channels=tensor.coeffs,
                    noise_var=noise,
                    total_power=total_power,
                    se_per_subcarrier=cfg.se_per_subcarrier,
                )
                bound = solve_dual_mac(problem).sum_se
                ses = {}
                for constraint in ("total", "per-bs"):
                    precoder = precode_network(
                        tensor, dep, alphabet, noise, budgets, constraint=constraint
                    )
                    audit_budgets(precoder)
                    sinrs = compute_sinr(tensor, precoder, noise)
                    ses[constraint] = spectral_efficiency(
                        sinrs, alphabet, cfg.se_per_subcarrier
                    ).total
                rows.append(
                    (
                        deployment,
                        int(m),
                        cfg.num_ues,
                        drop_idx,
                        r,
                        bound,
                        ses["total"],
                        ses["per-bs"],
                    )
                )
    _write_csv(out / "capacity.csv", CAPACITY_HEADER, manifest_hash, rows)
    _write_csv(out / "skips.csv", SKIPS_HEADER, manifest_hash, skips)
    manifest = RunManifest(
        config_hash=manifest_hash,
        seed=cfg.seed,
        code_version=__version__,
        started_utc=started,
        finished_utc=_utc_now(),
        outputs=("capacity.csv", "skips.csv"),
    )
    manifest.save(out / "manifest.json", config=cfg)
    return manifest
