"""Unit conversions and physical constants shared across modules."""

from __future__ import annotations

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def _as_scalar_or_array(out):
    return out.item() if np.ndim(out) == 0 else out


def dbm_to_watts(dbm):
    """Convert a power level in dBm to watts (scalar or array)."""
    out = 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)
    return _as_scalar_or_array(out)


def watts_to_dbm(watts):
    """Convert a power in watts to dBm (scalar or array)."""
    out = 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0
    return _as_scalar_or_array(out)


def db_to_linear(db):
    """Convert a ratio in dB to linear scale (scalar or array)."""
    out = 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return _as_scalar_or_array(out)


def linear_to_db(value):
    """Convert a linear ratio to dB (scalar or array)."""
    out = 10.0 * np.log10(np.asarray(value, dtype=float))
    return _as_scalar_or_array(out)


def se_scale(
    subcarriers_per_prb: int = 12,
    symbols_per_slot: int = 14,
    slot_duration_s: float = 1e-3,
    bandwidth_hz: float = 20e6,
) -> float:
    """Bits/s/Hz contributed per information bit on one representative subcarrier.

    Each simulated subcarrier stands for a whole resource block (12 actual
    subcarriers), and a 1 ms slot carries 14 symbols over the full system
    bandwidth; with the defaults the factor is 12*14/(1e-3*20e6) = 0.0084.
    """
    return subcarriers_per_prb * symbols_per_slot / (slot_duration_s * bandwidth_hz)
