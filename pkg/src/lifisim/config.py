"""Scenario configuration: defaults, file loading, and validation.

A scenario is a flat mapping of primitive values so it pickles cheaply
into worker processes and hashes stably into result-file headers. Every
key has a default matching the measurement campaign the simulator is
grounded in; a config file only lists overrides. Unknown keys are
rejected rather than ignored so typos cannot silently run the wrong
experiment.
"""

import hashlib
import json
from dataclasses import dataclass, asdict, fields
from typing import Optional

import numpy as np
import yaml

from .blockage import BlockageConfig
from .channel import LambertianSource
from .geometry import Room, ap_positions, device_layout
from .orientation import BUILTIN_STATS, OrwpConfig


class ConfigError(ValueError):
    """Raised for malformed, inconsistent, or unknown configuration."""


#: Labeled evaluation spots: (x, y, default facing direction in degrees).
PRESET_LOCATIONS = {
    "L1": (2.5, 2.5, 90.0),
    "L2": (1.25, 2.5, 0.0),
    "L3": (2.5, 0.5, 180.0),
}

_CHOICES = {
    "direction": ("downlink", "uplink"),
    "device": ("sr", "mdr"),
    "activity": ("sitting", "walking"),
    "scheme": ("asm", "sm", "mimo"),
    "orientation": ("fixed", "random"),
}


@dataclass(frozen=True)
class Scenario:
    """Complete experiment description with measurement-backed defaults."""

    direction: str = "downlink"
    device: str = "mdr"
    activity: str = "sitting"
    scheme: str = "asm"
    n_active: int = 4               # fixed active count for scheme="sm"

    room_width: float = 5.0
    room_depth: float = 5.0
    room_height: float = 3.0
    rho_walls: float = 0.6
    rho_floor: float = 0.2
    rho_ceiling: float = 0.8
    ap_height: float = 2.95
    n_ap_side: int = 4

    semiangle_deg: float = 60.0     # half-power semiangle of every emitter
    fov_deg: float = 60.0           # receiver field of view
    pd_area: float = 0.25e-4        # m^2
    responsivity: float = 1.0       # A/W; cancels in the SNR definitions

    noise_power: float = 1.0e-14    # sigma_n^2 = N0 * B, W^2
    mesh_resolution: float = 0.5
    include_nlos: bool = True

    kappa_b: float = 0.0            # blockers per m^2
    self_blockage: bool = True
    blocker_length: float = 0.7
    blocker_width: float = 0.2
    blocker_height: float = 1.75
    user_distance: float = 0.3      # body prism offset behind the device

    target_ber: float = 3.8e-3
    spectral_efficiency: float = 5.0   # downlink bits per channel use
    uplink_tse: float = 2.0            # per-source PAM bits; M = 2**uplink_tse
    symbol_rate: float = 1.0

    ue_height: Optional[float] = None   # None derives from activity
    location: str = "L1"
    omega_deg: Optional[float] = None   # None takes the preset facing
    orientation: str = "fixed"          # single-point sweeps: fixed | random

    speed: float = 1.0
    n_waypoints: int = 500

    grid_step: float = 0.25
    orientations_per_point: int = 500
    n_directions: int = 24
    mc_symbols: int = 100_000
    mi_samples: int = 0             # 0 disables the MI estimate columns
    snr_start_db: float = 0.0       # target received SNR grid (downlink)
    snr_stop_db: float = 70.0
    snr_step_db: float = 2.0
    uplink_snr_start_db: float = 100.0   # transmit SNR E_s/sigma^2 grid
    uplink_snr_stop_db: float = 180.0
    uplink_snr_step_db: float = 4.0

    seed: int = 0

    # -- derived helpers -------------------------------------------------

    def room(self):
        return Room(width=self.room_width, depth=self.room_depth,
                    height=self.room_height, rho_walls=self.rho_walls,
                    rho_floor=self.rho_floor, rho_ceiling=self.rho_ceiling)

    def aps(self):
        return ap_positions(self.room(), n_per_side=self.n_ap_side,
                            height=self.ap_height)

    def stats(self):
        return BUILTIN_STATS[self.activity]

    def layout(self):
        return device_layout(self.device)

    def source(self):
        return LambertianSource(semiangle_deg=self.semiangle_deg,
                                area=self.pd_area, fov_deg=self.fov_deg)

    def blockage(self):
        return BlockageConfig(kappa_b=self.kappa_b, d_p=self.user_distance,
                              length=self.blocker_length,
                              width=self.blocker_width,
                              height=self.blocker_height,
                              self_blocker=self.self_blockage)

    def orwp(self):
        return OrwpConfig(n_waypoints=self.n_waypoints, speed=self.speed,
                          width=self.room_width, depth=self.room_depth)

    def ue_height_m(self):
        if self.ue_height is not None:
            return self.ue_height
        return 0.8 if self.activity == "sitting" else 1.4

    def location_xy(self):
        x, y, _ = PRESET_LOCATIONS[self.location]
        return x, y

    def omega(self):
        if self.omega_deg is not None:
            return self.omega_deg
        return PRESET_LOCATIONS[self.location][2]

    def uplink_pam_order(self):
        M = 2.0 ** self.uplink_tse
        if M != int(M) or M < 2:
            raise ConfigError("uplink_tse must give an integer PAM order >= 2")
        return int(M)

    def snr_grid_db(self):
        n = int(round((self.snr_stop_db - self.snr_start_db)
                      / self.snr_step_db)) + 1
        return np.linspace(self.snr_start_db, self.snr_stop_db, n)

    def uplink_snr_grid_db(self):
        n = int(round((self.uplink_snr_stop_db - self.uplink_snr_start_db)
                      / self.uplink_snr_step_db)) + 1
        return np.linspace(self.uplink_snr_start_db,
                           self.uplink_snr_stop_db, n)


_FIELD_TYPES = {f.name: f.type for f in fields(Scenario)}


def _coerce(key, value):
    """Check one entry's type, allowing int where float is declared."""
    expected = _FIELD_TYPES[key]
    if expected is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected integer, got {value!r}")
        return value
    if expected is float or expected == Optional[float]:
        if value is None and expected == Optional[float]:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected number, got {value!r}")
        return float(value)
    if expected is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected string, got {value!r}")
        return value
    raise ConfigError(f"{key}: unsupported field type {expected}")


def _validate(s):
    for key, choices in _CHOICES.items():
        if getattr(s, key) not in choices:
            raise ConfigError(f"{key} must be one of {choices}")
    if s.location not in PRESET_LOCATIONS:
        raise ConfigError(f"location must be one of {sorted(PRESET_LOCATIONS)}")
    positive = ("room_width", "room_depth", "room_height", "ap_height",
                "semiangle_deg", "fov_deg", "pd_area", "noise_power",
                "mesh_resolution", "blocker_length", "blocker_width",
                "blocker_height", "speed", "grid_step", "snr_step_db",
                "symbol_rate", "orientations_per_point",
                "n_directions", "n_waypoints", "n_ap_side", "n_active")
    for key in positive:
        if getattr(s, key) <= 0:
            raise ConfigError(f"{key} must be positive")
    if s.mc_symbols < 0:
        raise ConfigError("mc_symbols must be nonnegative (0 disables)")
    for key in ("rho_walls", "rho_floor", "rho_ceiling"):
        v = getattr(s, key)
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"{key} must lie in [0, 1]")
    if s.kappa_b < 0 or s.user_distance < 0:
        raise ConfigError("kappa_b and user_distance must be nonnegative")
    if not 0.0 < s.target_ber < 0.5:
        raise ConfigError("target_ber must lie in (0, 0.5)")
    if s.ap_height > s.room_height:
        raise ConfigError("ap_height cannot exceed room_height")
    if s.ue_height is not None and not 0 <= s.ue_height <= s.room_height:
        raise ConfigError("ue_height must lie inside the room")
    if np.log2(s.n_active) % 1 != 0:
        raise ConfigError("n_active must be a power of two")
    if s.snr_stop_db < s.snr_start_db:
        raise ConfigError("snr_stop_db must be >= snr_start_db")
    if s.uplink_snr_stop_db < s.uplink_snr_start_db:
        raise ConfigError("uplink_snr_stop_db must be >= uplink_snr_start_db")
    if s.uplink_snr_step_db <= 0:
        raise ConfigError("uplink_snr_step_db must be positive")
    if s.seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    r = s.spectral_efficiency
    if r != int(r) or r < 1:
        raise ConfigError("spectral_efficiency must be a positive integer")
    if s.scheme == "sm":
        m = r - np.log2(s.n_active)
        if m % 1 != 0 or m < 1:
            raise ConfigError(
                "sm scheme needs spectral_efficiency - log2(n_active) >= 1")
    if s.scheme == "mimo" and r % s.n_active != 0:
        raise ConfigError(
            "mimo scheme needs spectral_efficiency divisible by n_active")
    if s.mi_samples != 0 and s.mi_samples < 1000:
        raise ConfigError("mi_samples must be 0 (disabled) or >= 1000")
    s.uplink_pam_order()


def scenario_from_dict(overrides):
    """Build a validated Scenario from a mapping of overrides."""
    if overrides is None:
        overrides = {}
    if not isinstance(overrides, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(overrides) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    values = {k: _coerce(k, v) for k, v in overrides.items()}
    s = Scenario(**values)
    _validate(s)
    return s


def load_scenario(path):
    """Read a YAML config file and return the validated Scenario."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    return scenario_from_dict(data)


def scenario_hash(scenario):
    """Short stable digest of every field, for result-file headers."""
    payload = json.dumps(asdict(scenario), sort_keys=True)
    return hashlib.sha1(payload.encode()).hexdigest()[:12]
