"""Power allocation over parallel channels under a sum-power budget.

Two allocators share the model ``y_j = sqrt(q_j) h_j s_j + n_j`` summarized
by per-channel gains ``g_j`` (received snr per unit transmit power):

* :func:`waterfill` maximizes ``sum log2(1 + g_j q_j)`` -- optimal for
  Gaussian inputs.
* :func:`mercury_waterfill` maximizes ``sum MI(g_j q_j)`` for a finite
  alphabet, using the alphabet's MMSE function: a power ``q_j`` is optimal
  when ``g_j * mmse(g_j q_j) = 1/mu`` on active channels, with the level
  ``mu`` found by bisection so the budget is met.

Both return exact-budget allocations (``sum q_j = P`` to float accuracy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .modulation import GaussianInput

__all__ = [
    "GAIN_FLOOR",
    "ParallelChannels",
    "PowerAllocation",
    "allocate",
    "kkt_residual",
    "mercury_waterfill",
    "waterfill",
]

# Channels with gains below this are treated as unusable (fully shadowed
# links would otherwise blow up the 1/g terms).
GAIN_FLOOR = 1e-20


@dataclass(frozen=True)
class ParallelChannels:
    """A bank of independent parallel channels.

    gains  -- g_j >= 0, received snr per unit transmit power (1/W)
    budget -- total transmit power P > 0 (W)
    """

    gains: np.ndarray
    budget: float


@dataclass
class PowerAllocation:
    powers: np.ndarray
    water_level: float
    active: np.ndarray
    saturated: bool = False

    @property
    def total(self) -> float:
        return float(self.powers.sum())


def _validated(ch: ParallelChannels) -> tuple[np.ndarray, float]:
    g = np.asarray(ch.gains, float).ravel()
    if g.size == 0:
        raise ValueError("empty gains")
    if not np.all(np.isfinite(g)) or np.any(g < 0.0):
        raise ValueError("gains must be finite and nonnegative")
    p = float(ch.budget)
    if not np.isfinite(p) or p <= 0.0:
        raise ValueError("budget must be positive and finite")
    if not np.any(g > GAIN_FLOOR):
        raise ValueError("no usable channel: all gains are (numerically) zero")
    return g, p


def waterfill(ch: ParallelChannels, tol: float = 1e-12, max_iters: int = 200) -> PowerAllocation:
    """Classic water-filling: q_j = max(0, mu - 1/g_j) with sum q_j = P.

    The level mu is located by bisection to ``|sum q - P| <= tol * P`` and
    then refined in closed form on the identified active set, so the budget
    holds to float accuracy.
    """
    g, p = _validated(ch)
    usable = g > GAIN_FLOOR
    inv = 1.0 / g[usable]
    lo = float(inv.min())
    hi = lo + p
    mu = hi
    for _ in range(max_iters):
        mu = 0.5 * (lo + hi)
        total = np.maximum(mu - inv, 0.0).sum()
        if abs(total - p) <= tol * p:
            break
        if total > p:
            hi = mu
        else:
            lo = mu
    # Exact level for the active set found by the bisection.
    for _ in range(inv.size):
        act = inv < mu
        mu_exact = (p + inv[act].sum()) / act.sum()
        if np.all(mu_exact > inv[act]) and not np.any((~act) & (inv < mu_exact)):
            mu = mu_exact
            break
        mu = mu_exact
    act = inv < mu
    q_usable = np.where(act, mu - inv, 0.0)
    total = q_usable.sum()
    if total > 0.0:
        # ``(p + 1/g) - 1/g`` cancels badly when p << 1/g; the rescale pins
        # the budget to float accuracy without disturbing the active set.
        q_usable *= p / total
    powers = np.zeros(g.shape)
    powers[usable] = q_usable
    active = np.zeros(g.shape, bool)
    active[usable] = act
    return PowerAllocation(powers=powers, water_level=float(mu), active=active)


def mercury_waterfill(
    ch: ParallelChannels,
    alphabet,
    tol: float = 1e-12,
    max_iters: int = 200,
) -> PowerAllocation:
    """Finite-alphabet water-filling via bisection on the level mu.

    On active channels the solution satisfies ``g_j mmse(g_j q_j) = 1/mu``,
    i.e. ``q_j = mmse_inv(1/(mu g_j)) / g_j`` whenever ``mu g_j > 1``.  The
    total allocated power is increasing in mu, so mu is bisected (in log
    scale) over [1/max(g), 1e12] until the budget matches.  If the alphabet
    saturates (MMSE numerically zero beyond some snr) and even the bracket
    top cannot absorb the budget, the leftover is spread uniformly over the
    active channels, where MI is flat and the split is immaterial.
    """
    g_full, p = _validated(ch)
    usable = g_full > GAIN_FLOOR
    g = g_full[usable]

    inverse = getattr(alphabet, "_mmse_inv_newton", alphabet.mmse_inv)

    def powers_at(mu: float) -> tuple[np.ndarray, np.ndarray]:
        v = 1.0 / (mu * g)
        act = v < 1.0
        q = np.zeros(g.shape)
        if act.any():
            q[act] = np.asarray(inverse(v[act]), float) / g[act]
        return q, act

    lo = 1.0 / float(g.max())
    hi = 1e12
    q_hi, act_hi = powers_at(hi)
    saturated = False
    if q_hi.sum() < p:
        # Budget exceeds what the alphabet can absorb at the bracket top.
        mu = hi
        q = q_hi
        act = act_hi
        q[act] += (p - q.sum()) / act.sum()
        saturated = True
    else:
        mu = hi
        total = q_hi.sum()
        converged = False
        for _ in range(max_iters):
            mu = math.sqrt(lo * hi)
            q, act = powers_at(mu)
            total = q.sum()
            if abs(total - p) <= tol * p:
                converged = True
                break
            if total > p:
                hi = mu
            else:
                lo = mu
            if hi - lo <= 4.0 * np.finfo(float).eps * hi:
                converged = True
                break
        if not converged:
            raise NumericalError(
                "mercury/water-filling bisection did not converge",
                info={"mu": mu, "budget": p, "residual": float(total - p)},
            )
        if total > 0.0:
            q *= p / total  # spread the tiny bisection residual, keeping q >= 0
    powers = np.zeros(g_full.shape)
    powers[usable] = q
    active = np.zeros(g_full.shape, bool)
    active[usable] = act & (q > 0.0)
    return PowerAllocation(
        powers=powers, water_level=float(mu), active=active, saturated=saturated
    )


def kkt_residual(alloc: PowerAllocation, ch: ParallelChannels, alphabet) -> float:
    """max over active channels of |g * mmse(g q) * mu - 1|.

    Channels driven into the saturated (MMSE = 0) region of the alphabet are
    excluded: MI is flat there and the stationarity condition is vacuous.
    """
    g = np.asarray(ch.gains, float).ravel()
    sel = alloc.active & (g > GAIN_FLOOR)
    if not sel.any():
        return 0.0
    m = np.asarray(alphabet.mmse(g[sel] * alloc.powers[sel]), float)
    pos = m > 0.0
    if not pos.any():
        return 0.0
    return float(np.abs(g[sel][pos] * m[pos] * alloc.water_level - 1.0).max())


def allocate(ch: ParallelChannels, alphabet) -> PowerAllocation:
    """Dispatch: closed-form water-filling for Gaussian inputs, else mercury."""
    if isinstance(alphabet, GaussianInput):
        return waterfill(ch)
    return mercury_waterfill(ch, alphabet)
