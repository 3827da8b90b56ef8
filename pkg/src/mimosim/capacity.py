"""Sum-capacity upper bound of the downlink under a total power constraint.

The bound is the sum capacity of the dual uplink with a pooled power budget:

    max  sum_f log2 det(I + noise^-1 * sum_k p_kf h_kf h_kf^H)
    s.t. p >= 0,  sum p <= P_tot

solved by sum-power iterative water-filling.  Each round computes every
stream's effective channel against the interference of all other streams at
their current powers, water-fills the whole budget jointly across the
(UE, subcarrier) grid, and damps the update by averaging with weight
(K-1)/K on the previous iterate, which keeps the objective nondecreasing.

Since UEs have one antenna each, everything is carried out on the K x K
Gram matrices of the per-subcarrier channel columns, never on M x M
matrices, so the cost per iteration is O(F * K^3) independent of M.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, NumericalError
from .powalloc import ParallelChannels, waterfill
from .units import se_scale

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERS = 1000
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DualMacProblem:
    """Channel columns h[k, m, f], noise variance, and pooled power budget."""

    channels: np.ndarray
    noise_var: float
    total_power: float
    tolerance: float = DEFAULT_TOLERANCE
    max_iters: int = DEFAULT_MAX_ITERS
    # bits -> bits/s/Hz factor for one representative subcarrier; callers
    # simulating fewer subcarriers than the full grid pass a rescaled value.
    se_per_subcarrier: float = se_scale()

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.channels, np.complex128)
        if coeffs.ndim != 3:
            raise ConfigurationError(
                "channels must be a (num_ues, num_antennas, num_subcarriers) array"
            )
        object.__setattr__(self, "channels", coeffs)
        if not self.total_power > 0.0:
            raise ConfigurationError("total power must be positive")
        if not self.noise_var > 0.0:
            raise ConfigurationError("noise variance must be positive")
        if not self.tolerance >= 0.0:
            raise ConfigurationError("tolerance must be nonnegative")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be at least 1")
        if not self.se_per_subcarrier > 0.0:
            raise ConfigurationError("se_per_subcarrier must be positive")

    @property
    def num_ues(self) -> int:
        return self.channels.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.channels.shape[2]


@dataclass(frozen=True, eq=False)
class DualMacSolution:
    """Optimal powers with the objective in bits and in sum-SE units."""

    powers: np.ndarray
    objective_bits: float
    sum_se: float
    iterations: int
    residual: float
    objective_trace: np.ndarray = field(repr=False)


def _objective_bits(gram: np.ndarray, powers: np.ndarray, noise_var: float) -> float:
    """sum_f log2 det(I + noise^-1 H P H^H) via the K x K determinant identity."""
    scaled = _scaled_gram(gram, powers, noise_var)
    sign, logdet = np.linalg.slogdet(scaled)
    if not np.all(sign.real > 0.0):
        raise NumericalError("indefinite Gram system in capacity objective")
    return float(logdet.sum() / np.log(2.0))


def _scaled_gram(gram: np.ndarray, powers: np.ndarray, noise_var: float) -> np.ndarray:
    """I + S G S with S = diag(sqrt(p/noise)), batched over subcarriers."""
    s = np.sqrt(powers.T / noise_var)  # (F, K)
    out = gram * s[:, :, None] * s[:, None, :]
    out[:, np.arange(out.shape[1]), np.arange(out.shape[1])] += 1.0
    return out


_BINV_DIAG_FLOOR = 1e-30


def _effective_gains(
    gram: np.ndarray, powers: np.ndarray, noise_var: float
) -> np.ndarray:
    """Per-stream SNR slope against everyone else's current interference.

    For stream (k, f) this is h^H A_{-k}^{-1} h / noise with
    A_{-k} = I + noise^-1 sum_{j != k} p_j h_j h_j^H.  With B = I + S G S
    and S = diag(sqrt(p/noise)), the Woodbury identity reduces it to
    (1 / [B^{-1}]_kk - 1) / p_k.  The diagonal of B^{-1} lies in (0, 1] and
    comes straight out of a positive-definite inverse, so the slope never
    suffers the catastrophic cancellation of the naive downdate
    c / (1 - p_k c / noise) at high per-stream SNR.  Zero-power streams fall
    back to the plain quadratic form, whose downdate is the identity.
    """
    scaled = _scaled_gram(gram, powers, noise_var)
    diag = np.einsum("fkk->fk", np.linalg.inv(scaled)).real
    diag = np.clip(diag, _BINV_DIAG_FLOOR, 1.0)
    p = powers.T  # (F, K)
    gains = (1.0 / diag - 1.0) / np.where(p > 0.0, p, 1.0)
    zero = p <= 0.0
    if zero.any():
        s = np.sqrt(p / noise_var)  # (F, K)
        x = gram * s[:, :, None]  # columns x_k = S g_k
        quad = np.einsum("fjk,fjk->fk", x.conj(), np.linalg.solve(scaled, x)).real
        c = np.maximum(np.einsum("fkk->fk", gram).real - quad, 0.0)
        gains = np.where(zero, c / noise_var, gains)
    return np.maximum(gains, 0.0).T  # (K, F)


def solve_dual_mac(problem: DualMacProblem) -> DualMacSolution:
    """Sum-power iterative water-filling with damped updates."""
    coeffs = problem.channels
    num_k, _, num_f = coeffs.shape
    noise = problem.noise_var
    budget = problem.total_power
    # Gram[f, j, k] = h_j^H h_k at subcarrier f, computed once.
    gram = np.einsum("jmf,kmf->fjk", coeffs.conj(), coeffs)

    powers = np.full((num_k, num_f), budget / (num_k * num_f))
    objective = _objective_bits(gram, powers, noise)
    trace = [objective]
    keep = (num_k - 1) / num_k
    residual = np.inf
    for iteration in range(1, problem.max_iters + 1):
        gains = _effective_gains(gram, powers, noise)
        filled = waterfill(ParallelChannels(gains.ravel(), budget)).powers
        powers = keep * powers + (1.0 - keep) * filled.reshape(num_k, num_f)
        new_objective = _objective_bits(gram, powers, noise)
        floor = objective - _MONOTONE_SLACK * max(1.0, abs(objective))
        if new_objective < floor:
            raise NumericalError(
                "sum-capacity objective decreased",
                info={"iteration": iteration, "drop": objective - new_objective},
            )
        residual = abs(new_objective - objective) / max(1.0, abs(new_objective))
        objective = new_objective
        trace.append(objective)
        if residual < problem.tolerance:
            return DualMacSolution(
                powers=powers,
                objective_bits=objective,
                sum_se=objective * problem.se_per_subcarrier,
                iterations=iteration,
                residual=residual,
                objective_trace=np.array(trace),
            )
    raise NumericalError(
        "sum-capacity water-filling did not converge",
        info={
            "iterations": problem.max_iters,
            "residual": residual,
            "objective_bits": objective,
            "powers": powers,
        },
    )


def sum_capacity_bound(problem: DualMacProblem) -> float:
    """The bound in sum-SE units (bits/s/Hz)."""
    return solve_dual_mac(problem).sum_se
