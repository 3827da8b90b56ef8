"""Downlink precoder construction for the multi-cell schemes.

All schemes build zero-forcing directions from a design tensor (true or
estimated CSI) and pour power over the resulting parallel streams with the
alphabet-aware allocator.  A stream's effective gain is 1/||t_k||^2 for the
unit-diagonal right inverse T, so the received SNR of stream k is
q_k * g_k / noise_var and allocators operate on g_k / noise_var directly.

Schemes:

- ``local``: each site zero-forces only toward its own associated UEs
  (greedy semi-orthogonal scheduling when it has more UEs than antennas)
  and spends its own budget; other cells' interference is ignored when
  allocating and appears only in evaluation.
- ``lsmimo``: each site zero-forces toward every UE in the network and
  powers only the columns of its own UEs; needs M_i >= K.
- ``network`` / ``network-totalpower``: all sites act as one distributed
  array with a global ZF; the per-BS variant rescales the whole precoder
  so the most loaded site exactly meets its budget.
- ``mrt-single``: per-site matched filtering toward one UE, power split
  evenly over subcarriers; contributions add coherently since each site's
  received amplitude is real by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor, NoisyChannelTensor
from .exceptions import FeasibilityError, NumericalError
from .geometry import Deployment
from .powalloc import ParallelChannels, allocate

SCHEME_LOCAL = "local"
SCHEME_LSMIMO = "lsmimo"
SCHEME_NETWORK = "network"
SCHEME_NETWORK_TOTAL = "network-totalpower"
SCHEME_MRT_SINGLE = "mrt-single"
SCHEME_NAMES = (
    SCHEME_LOCAL,
    SCHEME_LSMIMO,
    SCHEME_NETWORK,
    SCHEME_NETWORK_TOTAL,
    SCHEME_MRT_SINGLE,
)

ZF_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class Precoder:
    """Stacked beamformers w[m, k, f]; zero columns are inactive streams."""

    w: np.ndarray
    scheduled: np.ndarray
    site_slices: tuple[slice, ...]
    scheme: str
    budgets: tuple[float, ...]
    scale_factor: float = 1.0

    def per_bs_powers(self) -> np.ndarray:
        return np.array(
            [np.sum(np.abs(self.w[rows]) ** 2) for rows in self.site_slices]
        )

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2))


@dataclass(frozen=True, eq=False)
class Association:
    """Serving site per UE plus the inverse map."""

    serving_bs: np.ndarray
    per_bs_ues: tuple[tuple[int, ...], ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(u) for u in self.per_bs_ues)


def associate_ues(h: ChannelTensor, deployment: Deployment) -> Association:
    """Assign each UE to the site with the best average received SNR.

    The score is the mean squared coefficient magnitude over the site's
    antennas and all subcarriers, weighted by its per-antenna power budget;
    ties go to the lowest site index.
    """
    scores = np.stack(
        [
            (np.abs(h.coeffs[:, rows, :]) ** 2).mean(axis=(1, 2))
            * (site.power_budget / site.num_antennas)
            for site, rows in zip(deployment.sites, deployment.site_slices)
        ]
    )
    serving = np.argmax(scores, axis=0)
    per_bs = tuple(
        tuple(int(k) for k in np.flatnonzero(serving == i))
        for i in range(deployment.num_sites)
    )
    return Association(serving_bs=serving.astype(np.int64), per_bs_ues=per_bs)


def schedule_users(h_rows: np.ndarray, max_streams: int) -> np.ndarray:
    """Greedy semi-orthogonal user selection on one subcarrier.

    Starts from the largest-norm row and repeatedly adds the row with the
    largest component orthogonal to the span of the selection.  Returns
    sorted indices into ``h_rows``; fewer than ``max_streams`` only if the
    remaining rows are numerically inside the selected span.
    """
    rows = np.asarray(h_rows)
    k = rows.shape[0]
    if k <= max_streams:
        return np.arange(k)
    residual = rows.astype(np.complex128, copy=True)
    norms2 = np.einsum("km,km->k", residual, residual.conj()).real
    floor = 1e-14 * float(norms2.max(initial=0.0))
    available = np.ones(k, bool)
    selected: list[int] = []
    for _ in range(max_streams):
        masked = np.where(available, norms2, -1.0)
        best = int(np.argmax(masked))
        if masked[best] <= floor:
            break
        selected.append(best)
        available[best] = False
        q = residual[best] / np.sqrt(norms2[best])
        residual -= np.outer(residual @ q.conj(), q)
        norms2 = np.einsum("km,km->k", residual, residual.conj()).real
    return np.array(sorted(selected), np.int64)


def zf_pseudo_inverse(h_rows: np.ndarray, cond_limit: float = ZF_COND_LIMIT):
    """Right inverse T of a K' x M row-channel matrix, with stream gains.

    T satisfies ``h_rows @ T = I`` (computed through the SVD), and
    ``gains[k] = 1 / ||t_k||^2`` is the effective power gain of stream k.
    """
    rows = np.atleast_2d(np.asarray(h_rows, np.complex128))
    if rows.shape[0] > rows.shape[1]:
        raise NumericalError(
            "more streams than antennas in ZF group",
            info={"shape": rows.shape},
        )
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s[-1] <= 0.0 or s[0] / s[-1] > cond_limit:
        raise NumericalError(
            "rank-deficient ZF group",
            info={"cond": float("inf") if s[-1] <= 0 else float(s[0] / s[-1])},
        )
    t = (vh.conj().T / s[None, :]) @ u.conj().T
    gains = 1.0 / np.einsum("mk,mk->k", t, t.conj()).real
    return t, gains


def _zf_with_retry(rows: np.ndarray, ids: np.ndarray):
    """ZF that drops the weakest stream on rank deficiency and retries."""
    rows = np.asarray(rows, np.complex128)
    ids = np.asarray(ids, np.int64)
    while True:
        try:
            t, gains = zf_pseudo_inverse(rows)
            return t, gains, ids
        except NumericalError:
            if rows.shape[0] <= 1:
                raise
            norms = np.einsum("km,km->k", rows, rows.conj()).real
            weakest = int(np.argmin(norms))
            keep = np.ones(rows.shape[0], bool)
            keep[weakest] = False
            rows = rows[keep]
            ids = ids[keep]


def _design_coeffs(h) -> np.ndarray:
    if isinstance(h, (ChannelTensor, NoisyChannelTensor)):
        return h.coeffs
    raise TypeError("expected a channel tensor")


def _effective_budgets(deployment: Deployment, budgets) -> np.ndarray:
    if budgets is None:
        return np.array([s.power_budget for s in deployment.sites], float)
    out = np.asarray(budgets, float).ravel()
    if out.size != deployment.num_sites:
        raise ValueError("one effective budget per site required")
    return out


def _pour_streams(entries, gains, noise_var, budget, alphabet, w, scheduled):
    """Allocate ``budget`` over streams and write the scaled beamformers."""
    if not entries:
        return
    ch = ParallelChannels(np.asarray(gains) / noise_var, budget)
    alloc = allocate(ch, alphabet)
    for (ue, f, rows, t_col), q in zip(entries, alloc.powers):
        norm = np.linalg.norm(t_col)
        if q > 0.0 and norm > 0.0:
            w[rows, ue, f] += t_col * (np.sqrt(q) / norm)
        scheduled[ue, f] = True


def precode_local(
    h,
    assoc: Association,
    deployment: Deployment,
    alphabet,
    noise_var: float,
    budgets=None,
) -> Precoder:
    """Per-site ZF toward the site's own UEs with per-site budgets."""
    coeffs = _design_coeffs(h)
    num_ues, num_m, num_f = coeffs.shape
    budget_arr = _effective_budgets(deployment, budgets)
    w = np.zeros((num_m, num_ues, num_f), np.complex128)
    scheduled = np.zeros((num_ues, num_f), bool)
    for i, rows_i in enumerate(deployment.site_slices):
        ues = np.array(assoc.per_bs_ues[i], np.int64)
        if ues.size == 0:
            continue
        m_i = deployment.sites[i].num_antennas
        entries, gains = [], []
        for f in range(num_f):
            local_rows = coeffs[ues, rows_i, f].conj()
            order = ues
            if ues.size > m_i:
                sel = schedule_users(local_rows, m_i)
                local_rows = local_rows[sel]
                order = ues[sel]
            t, g, kept = _zf_with_retry(local_rows, order)
            for j, ue in enumerate(kept):
                entries.append((int(ue), f, rows_i, t[:, j]))
                gains.append(g[j])
        _pour_streams(entries, gains, noise_var, budget_arr[i], alphabet, w, scheduled)
    return Precoder(
        w=w,
        scheduled=scheduled,
        site_slices=deployment.site_slices,
        scheme=SCHEME_LOCAL,
        budgets=tuple(budget_arr),
    )


def precode_lsmimo(
    h,
    assoc: Association,
    deployment: Deployment,
    alphabet,
    noise_var: float,
    budgets=None,
) -> Precoder:
    """Per-site ZF toward every UE; power only on the site's own UEs."""
    coeffs = _design_coeffs(h)
    num_ues, num_m, num_f = coeffs.shape
    for site in deployment.sites:
        if site.num_antennas < num_ues:
            raise FeasibilityError(
                f"large-scale ZF needs at least {num_ues} antennas per site, "
                f"got {site.num_antennas}"
            )
    budget_arr = _effective_budgets(deployment, budgets)
    w = np.zeros((num_m, num_ues, num_f), np.complex128)
    scheduled = np.zeros((num_ues, num_f), bool)
    all_ids = np.arange(num_ues, dtype=np.int64)
    for i, rows_i in enumerate(deployment.site_slices):
        served = set(assoc.per_bs_ues[i])
        if not served:
            continue
        entries, gains = [], []
        for f in range(num_f):
            local_rows = coeffs[:, rows_i, f].conj()
            t, g, kept = _zf_with_retry(local_rows, all_ids)
            for j, ue in enumerate(kept):
                if int(ue) in served:
                    entries.append((int(ue), f, rows_i, t[:, j]))
                    gains.append(g[j])
        _pour_streams(entries, gains, noise_var, budget_arr[i], alphabet, w, scheduled)
    return Precoder(
        w=w,
        scheduled=scheduled,
        site_slices=deployment.site_slices,
        scheme=SCHEME_LSMIMO,
        budgets=tuple(budget_arr),
    )


def precode_network(
    h,
    deployment: Deployment,
    alphabet,
    noise_var: float,
    budgets=None,
    constraint: str = "per-bs",
) -> Precoder:
    """Global ZF over the stacked array under one of two power constraints.

    ``total``: the joint allocation spends the sum of the site budgets.
    ``per-bs``: afterwards the entire precoder is scaled by the single
    factor that makes the most-loaded site exactly meet its budget.
    """
    if constraint not in ("per-bs", "total"):
        raise ValueError(f"unknown power constraint {constraint!r}")
    coeffs = _design_coeffs(h)
    num_ues, num_m, num_f = coeffs.shape
    if num_ues > num_m:
        raise FeasibilityError(
            f"network ZF needs at least {num_ues} antennas in total, got {num_m}"
        )
    budget_arr = _effective_budgets(deployment, budgets)
    full = slice(0, num_m)
    w = np.zeros((num_m, num_ues, num_f), np.complex128)
    scheduled = np.zeros((num_ues, num_f), bool)
    all_ids = np.arange(num_ues, dtype=np.int64)
    entries, gains = [], []
    for f in range(num_f):
        rows = coeffs[:, :, f].conj()
        t, g, kept = _zf_with_retry(rows, all_ids)
        for j, ue in enumerate(kept):
            entries.append((int(ue), f, full, t[:, j]))
            gains.append(g[j])
    _pour_streams(
        entries, gains, noise_var, float(budget_arr.sum()), alphabet, w, scheduled
    )
    scale = 1.0
    scheme = SCHEME_NETWORK_TOTAL
    if constraint == "per-bs":
        scheme = SCHEME_NETWORK
        used = np.array(
            [np.sum(np.abs(w[rows]) ** 2) for rows in deployment.site_slices]
        )
        loaded = used > 0.0
        if loaded.any():
            # The joint allocation spends sum(budgets) overall, so the most
            # loaded site is always at or above its own budget and the common
            # factor never exceeds one.
            scale = float(min(1.0, (budget_arr[loaded] / used[loaded]).min()))
            w *= np.sqrt(scale)
    return Precoder(
        w=w,
        scheduled=scheduled,
        site_slices=deployment.site_slices,
        scheme=scheme,
        budgets=tuple(budget_arr),
        scale_factor=scale,
    )


def precode_mrt_single(
    h,
    deployment: Deployment,
    budgets=None,
) -> Precoder:
    """Matched filter toward a single UE, power split evenly over f.

    Each site transmits sqrt(P_i / F) along its own channel block, so the
    received amplitude is sum_i sqrt(P_i / F) * ||h_{k,i}(f)|| — real and
    positive, hence coherent across sites without extra phase alignment.
    """
    coeffs = _design_coeffs(h)
    num_ues, num_m, num_f = coeffs.shape
    if num_ues != 1:
        raise ValueError("single-UE matched filtering expects exactly one UE")
    budget_arr = _effective_budgets(deployment, budgets)
    w = np.zeros((num_m, 1, num_f), np.complex128)
    for i, rows_i in enumerate(deployment.site_slices):
        amp = np.sqrt(budget_arr[i] / num_f)
        block = coeffs[0, rows_i, :]
        norms = np.linalg.norm(block, axis=0)
        good = norms > 0.0
        w[rows_i, 0, good] = amp * block[:, good] / norms[good][None, :]
    scheduled = np.ones((1, num_f), bool)
    return Precoder(
        w=w,
        scheduled=scheduled,
        site_slices=deployment.site_slices,
        scheme=SCHEME_MRT_SINGLE,
        budgets=tuple(budget_arr),
    )


def audit_budgets(precoder: Precoder, rel_tol: float = 1e-9) -> None:
    """Verify a built precoder against its stored power budgets.

    Every scheme except the total-power network variant must respect each
    site's budget; that variant is only held to the pooled sum.  The network
    rescale factor must lie in (0, 1].
    """
    budgets = np.asarray(precoder.budgets, float)
    if precoder.scheme == SCHEME_NETWORK_TOTAL:
        total = precoder.total_power
        cap = float(budgets.sum())
        if total > cap * (1.0 + rel_tol):
            raise NumericalError(
                "total power budget exceeded",
                info={"used": total, "budget": cap, "scheme": precoder.scheme},
            )
    else:
        used = precoder.per_bs_powers()
        over = used > budgets * (1.0 + rel_tol)
        if over.any():
            site = int(np.argmax(used - budgets))
            raise NumericalError(
                "per-site power budget exceeded",
                info={
                    "site": site,
                    "used": float(used[site]),
                    "budget": float(budgets[site]),
                    "scheme": precoder.scheme,
                },
            )
    if not 0.0 < precoder.scale_factor <= 1.0:
        raise NumericalError(
            "rescale factor outside (0, 1]",
            info={"scale": precoder.scale_factor, "scheme": precoder.scheme},
        )


def mrt_single_snr(h, deployment: Deployment, noise_var: float, budgets=None) -> np.ndarray:
    """Per-subcarrier received SNR of the single-UE matched filter."""
    coeffs = _design_coeffs(h)
    if coeffs.shape[0] != 1:
        raise ValueError("single-UE matched filtering expects exactly one UE")
    num_f = coeffs.shape[2]
    budget_arr = _effective_budgets(deployment, budgets)
    amp = np.zeros(num_f)
    for i, rows_i in enumerate(deployment.site_slices):
        amp += np.sqrt(budget_arr[i] / num_f) * np.linalg.norm(
            coeffs[0, rows_i, :], axis=0
        )
    return amp**2 / noise_var
