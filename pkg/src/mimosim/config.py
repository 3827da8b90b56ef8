"""Run configuration: sweep grid, radio constants, and JSON persistence."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelConfig
from .exceptions import ConfigurationError
from .geometry import DEPLOYMENT_NAMES
from .precoding import SCHEME_NAMES
from .units import dbm_to_watts, se_scale

CONFIG_VERSION = 1

MODULATION_NAMES = ("qam256", "gaussian")

DEFAULT_SCHEMES = ("local", "lsmimo", "network")
DEFAULT_ANTENNAS = tuple(range(24, 241, 24))


@dataclass(frozen=True)
class SimConfig:
    """Full description of one experiment run.

    The defaults reproduce the full-scale setup: a 20 MHz band with 1200
    active subcarriers grouped into 100 resource blocks, one representative
    subcarrier simulated per block.  ``num_prbs`` is the number of
    representative subcarriers actually simulated; lowering it (desk scale)
    widens the slice of the band each one stands for, so power and SE
    normalization stay consistent with the full-scale numbers.
    """

    version: int = CONFIG_VERSION
    carrier_hz: float = 2.1e9
    bandwidth_hz: float = 20e6
    active_bandwidth_hz: float = 18e6
    subcarrier_spacing_hz: float = 15e3
    num_subcarriers: int = 1200
    num_prbs: int = 100
    wall_loss_db: float = 12.0
    p_sum_dbm: float = 26.0
    noise_dbm: float = -125.1
    num_ues: int = 24
    num_drops: int = 300
    num_realizations: int = 10
    modulation: str = "qam256"
    deployments: tuple[str, ...] = DEPLOYMENT_NAMES
    schemes: tuple[str, ...] = DEFAULT_SCHEMES
    antennas: tuple[int, ...] = DEFAULT_ANTENNAS
    nmse_db: tuple[float, ...] = (float("-inf"),)
    seed: int = 1
    threads: int = 1

    def __post_init__(self) -> None:
        for name in ("deployments", "schemes"):
            object.__setattr__(self, name, tuple(str(v) for v in getattr(self, name)))
        object.__setattr__(self, "antennas", tuple(int(v) for v in self.antennas))
        object.__setattr__(self, "nmse_db", tuple(float(v) for v in self.nmse_db))
        if self.version != CONFIG_VERSION:
            raise ConfigurationError(
                f"unsupported config version {self.version!r} (expected {CONFIG_VERSION})"
            )
        positive = (
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("active_bandwidth_hz", self.active_bandwidth_hz),
            ("subcarrier_spacing_hz", self.subcarrier_spacing_hz),
            ("num_subcarriers", self.num_subcarriers),
            ("num_prbs", self.num_prbs),
            ("num_ues", self.num_ues),
            ("num_drops", self.num_drops),
            ("num_realizations", self.num_realizations),
            ("threads", self.threads),
        )
        for name, value in positive:
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if self.wall_loss_db < 0:
            raise ConfigurationError("wall_loss_db must be nonnegative")
        if self.seed < 0:
            raise ConfigurationError("seed must be nonnegative")
        if self.num_subcarriers % 12 != 0:
            raise ConfigurationError("num_subcarriers must be a multiple of 12")
        if self.num_prbs > self.num_subcarriers // 12:
            raise ConfigurationError(
                "num_prbs cannot exceed one representative subcarrier per resource block"
            )
        if self.num_subcarriers % self.num_prbs != 0:
            raise ConfigurationError("num_subcarriers must be divisible by num_prbs")
        active = self.num_subcarriers * self.subcarrier_spacing_hz
        if not math.isclose(active, self.active_bandwidth_hz, rel_tol=1e-9):
            raise ConfigurationError(
                "active_bandwidth_hz must equal num_subcarriers * subcarrier_spacing_hz"
            )
        if self.active_bandwidth_hz > self.bandwidth_hz:
            raise ConfigurationError("active bandwidth exceeds system bandwidth")
        if self.modulation not in MODULATION_NAMES:
            raise ConfigurationError(
                f"unknown modulation {self.modulation!r}; expected one of {MODULATION_NAMES}"
            )
        if not self.deployments:
            raise ConfigurationError("at least one deployment is required")
        for name in self.deployments:
            if name not in DEPLOYMENT_NAMES:
                raise ConfigurationError(
                    f"unknown deployment {name!r}; expected one of {DEPLOYMENT_NAMES}"
                )
        if not self.schemes:
            raise ConfigurationError("at least one scheme is required")
        for name in self.schemes:
            if name not in SCHEME_NAMES:
                raise ConfigurationError(
                    f"unknown scheme {name!r}; expected one of {SCHEME_NAMES}"
                )
        if not self.antennas:
            raise ConfigurationError("at least one antenna count is required")
        for m in self.antennas:
            if m < 1:
                raise ConfigurationError(f"antenna count must be positive, got {m}")
        if not self.nmse_db:
            raise ConfigurationError("at least one nmse_db value is required")
        for v in self.nmse_db:
            if math.isnan(v) or v == math.inf:
                raise ConfigurationError(f"nmse_db value {v!r} is not a valid level")

    # ------------------------------------------------------------------
    # Derived quantities

    @property
    def noise_variance_watts(self) -> float:
        """Per-subcarrier receiver noise variance in watts."""
        return float(dbm_to_watts(self.noise_dbm))

    @property
    def budget_fraction(self) -> float:
        """Share of a site's power budget spent on the simulated subcarriers.

        Each site spreads its budget evenly over all active subcarriers, so
        simulating ``num_prbs`` representatives engages that fraction of it.
        """
        return self.num_prbs / self.num_subcarriers

    @property
    def se_per_subcarrier(self) -> float:
        """SE normalization for one bit on one representative subcarrier."""
        return se_scale(
            subcarriers_per_prb=self.num_subcarriers / self.num_prbs,
            bandwidth_hz=self.bandwidth_hz,
        )

    @property
    def subcarrier_offsets_hz(self) -> np.ndarray:
        """Baseband offsets of the representative subcarriers.

        The active band's subcarriers are split into ``num_prbs`` equal
        groups and each group's center subcarrier (fractional index when the
        group has even size) is simulated, symmetric around the carrier.
        """
        group = self.num_subcarriers / self.num_prbs
        idx = (np.arange(self.num_prbs) + 0.5) * group - 0.5
        return (idx - (self.num_subcarriers - 1) / 2.0) * self.subcarrier_spacing_hz

    @property
    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(carrier_hz=self.carrier_hz, wall_loss_db=self.wall_loss_db)

    def sigma_e2_of(self, nmse_db: float) -> float:
        """Linear estimation-error variance for one sweep level."""
        return 0.0 if nmse_db == -math.inf else float(10.0 ** (nmse_db / 10.0))

    # ------------------------------------------------------------------
    # Persistence

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["deployments"] = list(self.deployments)
        out["schemes"] = list(self.schemes)
        out["antennas"] = list(self.antennas)
        out["nmse_db"] = ["-inf" if v == -math.inf else v for v in self.nmse_db]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config root must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(data)
        if "nmse_db" in kwargs:
            values = []
            for v in kwargs["nmse_db"]:
                if isinstance(v, str):
                    if v.strip().lower() not in ("-inf", "-infinity"):
                        raise ConfigurationError(f"bad nmse_db entry {v!r}")
                    values.append(-math.inf)
                else:
                    values.append(float(v))
            kwargs["nmse_db"] = tuple(values)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(f"bad config: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SimConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def config_hash(self) -> str:
        """Stable digest of everything that determines the outputs.

        ``threads`` is excluded: worker count must never change results, so
        runs differing only in it share a hash (and thus identical CSVs).
        """
        payload = self.to_dict()
        payload.pop("threads")
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()
