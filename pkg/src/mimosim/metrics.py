"""SINR evaluation, spectral efficiency, fairness, and sweep aggregation.

SINRs are computed analytically from the true channel and the beamformers
(the data symbols and noise are unit-variance and independent, so their
expectations are exact).  Per-UE spectral efficiency converts each
subcarrier's mutual information into bits/s/Hz of the full system band;
one representative subcarrier stands for a proportional share of the grid,
so desk-scale runs keep the same saturation ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor
from .precoding import Precoder
from .units import se_scale


@dataclass(frozen=True, eq=False)
class SpectralEfficiency:
    per_ue: np.ndarray
    total: float


@dataclass(frozen=True, eq=False)
class MetricsRecord:
    """One evaluated (cell, drop, realization) point of a sweep."""

    deployment: str
    scheme: str
    modulation: str
    num_antennas: int
    num_ues: int
    sigma_e2_db: float
    drop: int
    realization: int
    per_ue_se: np.ndarray
    sum_se: float
    jain: float
    se_p5: float
    se_p95: float

    @property
    def cell_key(self) -> tuple:
        return (
            self.deployment,
            self.scheme,
            self.modulation,
            self.num_antennas,
            self.sigma_e2_db,
        )


@dataclass(frozen=True)
class SummaryRow:
    """Aggregated statistics of one sweep cell."""

    deployment: str
    scheme: str
    modulation: str
    num_antennas: int
    num_ues: int
    sigma_e2_db: float
    num_records: int
    sum_se_mean: float
    sum_se_p5: float
    sum_se_p95: float
    jain_mean: float
    jain_p5: float
    jain_p95: float


def compute_sinr(h: ChannelTensor, precoder: Precoder, noise_var: float) -> np.ndarray:
    """Per-(UE, subcarrier) SINR of every active stream, zeros elsewhere.

    SINR_k(f) = |h_k^H w_k|^2 / (noise + sum_{j != k} |h_k^H w_j|^2), with
    the interference sum running over all other active streams.
    """
    coeffs = h.coeffs
    w = precoder.w
    num_ues, num_m, num_f = coeffs.shape
    if w.shape != (num_m, num_ues, num_f):
        raise ValueError(
            f"precoder shape {w.shape} does not match channel {coeffs.shape}"
        )
    if not noise_var > 0.0:
        raise ValueError("noise variance must be positive")
    cross = np.abs(np.einsum("kmf,mjf->kjf", coeffs.conj(), w)) ** 2
    signal = np.einsum("kkf->kf", cross)
    interference = cross.sum(axis=1) - signal
    sinr = signal / (noise_var + interference)
    return np.where(precoder.scheduled, sinr, 0.0)


def spectral_efficiency(
    sinrs: np.ndarray, alphabet, per_subcarrier_scale: float = se_scale()
) -> SpectralEfficiency:
    """Per-UE and sum SE from a K x F SINR grid and a modulation's MI curve."""
    grid = np.asarray(sinrs, float)
    if grid.ndim != 2:
        raise ValueError("sinrs must be a (num_ues, num_subcarriers) grid")
    mi = np.asarray(alphabet.mi(grid.ravel()), float).reshape(grid.shape)
    per_ue = per_subcarrier_scale * mi.sum(axis=1)
    return SpectralEfficiency(per_ue=per_ue, total=float(per_ue.sum()))


def jain_index(per_ue_se) -> float:
    """(sum S_k)^2 / (K * sum S_k^2); 1 when equal, 1/K for a single earner."""
    values = np.asarray(per_ue_se, float).ravel()
    if values.size == 0:
        raise ValueError("fairness of an empty vector is undefined")
    if np.any(values < 0.0):
        raise ValueError("per-UE SEs must be nonnegative")
    square_sum = float((values**2).sum())
    if square_sum == 0.0:
        raise ValueError("fairness of an all-zero vector is undefined")
    return float(values.sum()) ** 2 / (values.size * square_sum)


def percentile_nearest_rank(values, pct: float) -> float:
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    data = np.sort(np.asarray(values, float).ravel())
    if data.size == 0:
        raise ValueError("percentile of an empty vector is undefined")
    if not 0.0 < pct <= 100.0:
        raise ValueError("percentile must be in (0, 100]")
    rank = max(1, math.ceil(pct / 100.0 * data.size))
    return float(data[rank - 1])


def make_record(
    deployment: str,
    scheme: str,
    modulation: str,
    num_antennas: int,
    sigma_e2_db: float,
    drop: int,
    realization: int,
    se: SpectralEfficiency,
) -> MetricsRecord:
    """Bundle one evaluation into a record row with its UE-level percentiles."""
    per_ue = np.asarray(se.per_ue, float)
    return MetricsRecord(
        deployment=deployment,
        scheme=scheme,
        modulation=modulation,
        num_antennas=int(num_antennas),
        num_ues=int(per_ue.size),
        sigma_e2_db=float(sigma_e2_db),
        drop=int(drop),
        realization=int(realization),
        per_ue_se=per_ue,
        sum_se=float(se.total),
        jain=jain_index(per_ue),
        se_p5=percentile_nearest_rank(per_ue, 5.0),
        se_p95=percentile_nearest_rank(per_ue, 95.0),
    )


def aggregate(records) -> list[SummaryRow]:
    """Mean / p5 / p95 of sum SE and fairness per sweep cell.

    Cells appear in first-seen order; merging is associative, so partial
    lists from parallel workers aggregate to the same rows in any order
    once the record list itself is ordered.
    """
    groups: dict[tuple, list[MetricsRecord]] = {}
    for rec in records:
        groups.setdefault(rec.cell_key, []).append(rec)
    rows = []
    for key, recs in groups.items():
        sums = np.array([r.sum_se for r in recs])
        jains = np.array([r.jain for r in recs])
        rows.append(
            SummaryRow(
                deployment=key[0],
                scheme=key[1],
                modulation=key[2],
                num_antennas=key[3],
                num_ues=recs[0].num_ues,
                sigma_e2_db=key[4],
                num_records=len(recs),
                sum_se_mean=float(sums.mean()),
                sum_se_p5=percentile_nearest_rank(sums, 5.0),
                sum_se_p95=percentile_nearest_rank(sums, 95.0),
                jain_mean=float(jains.mean()),
                jain_p5=percentile_nearest_rank(jains, 5.0),
                jain_p95=percentile_nearest_rank(jains, 95.0),
            )
        )
    return rows
