"""Simulation configuration and the ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .buffers import BUFFER_MODES, DynamicBufferPolicy
from .errors import ConfigurationError
from .selection import STRATEGIES

__all__ = ["SimConfig", "parse_config_text", "load_config", "parse_snr_range", "CONFIG_KEYS"]

RELAY_DETECTORS = ("rake", "mmse", "perfect")
DEST_DETECTORS = ("rake", "mmse", "ml")
SCHEMES = ("buffered", "nonbuffered")


@dataclass(frozen=True)
class SimConfig:
    """Everything one simulation run needs.

    ``packets`` is the number of packets delivered to the destination per
    sweep point; one packet is ``M`` symbols from each of the ``K`` users.
    """

    K: int = 3
    L: int = 6
    N: int = 16
    M: int = 1000
    J: int = 6
    buffer_mode: str = "fixed"
    J_min: int = 1
    J_max: int = 12
    gamma: float = 0.5
    d1: float = 2.0
    d2: int = 2
    d3: int = 2
    scheme: str = "buffered"
    selection: str = "exhaustive"
    relay_detector: str = "mmse"
    dest_detector: str = "rake"
    snr_min: float = 0.0
    snr_max: float = 16.0
    snr_step: float = 2.0
    packets: int = 200
    seed: int = 1
    channel_law: str = "uniform"
    estimation: bool = False
    pilots: int = 16
    max_epochs: int | None = None
    out: str | None = None

    def __post_init__(self):
        if self.K < 1 or self.N < 1 or self.M < 1:
            raise ConfigurationError(f"need K, N, M >= 1, got K={self.K}, N={self.N}, M={self.M}")
        if self.L < 2:
            raise ConfigurationError(f"need at least two relays, got L={self.L}")
        if self.snr_min > self.snr_max:
            raise ConfigurationError(f"snr min {self.snr_min} exceeds max {self.snr_max}")
        if not self.snr_step > 0:
            raise ConfigurationError(f"snr step must be positive, got {self.snr_step}")
        if self.packets < 0:
            raise ConfigurationError("packets must be non-negative")
        if self.selection not in STRATEGIES:
            raise ConfigurationError(f"unknown selection {self.selection!r}; expected one of {STRATEGIES}")
        if self.relay_detector not in RELAY_DETECTORS:
            raise ConfigurationError(f"unknown relay detector {self.relay_detector!r}; expected one of {RELAY_DETECTORS}")
        if self.dest_detector not in DEST_DETECTORS:
            raise ConfigurationError(f"unknown destination detector {self.dest_detector!r}; expected one of {DEST_DETECTORS}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.buffer_mode not in BUFFER_MODES:
            raise ConfigurationError(f"unknown buffer mode {self.buffer_mode!r}; expected one of {BUFFER_MODES}")
        if self.selection == "none" and self.L % 2:
            raise ConfigurationError(f"the fixed pairing needs an even number of relays, got {self.L}")
        if self.estimation and self.pilots < 1:
            raise ConfigurationError("channel estimation needs at least one pilot")
        if self.dest_detector == "ml" and 2 * self.K > 16:
            raise ConfigurationError("joint ML destination supports at most 8 users")
        self.policy()  # validates the buffer parameters

    def policy(self) -> DynamicBufferPolicy:
        return DynamicBufferPolicy(
            mode=self.buffer_mode,
            J=self.J,
            J_min=self.J_min,
            J_max=self.J_max,
            gamma=self.gamma,
            d1=self.d1,
            d2=self.d2,
            d3=self.d3,
        )

    def snr_points(self) -> list[float]:
        n = int(np.floor((self.snr_max - self.snr_min) / self.snr_step + 1e-9)) + 1
        return [float(self.snr_min + i * self.snr_step) for i in range(n)]

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


def parse_snr_range(text: str):
    """``"min:max:step"`` or a single value, returned as ``(min, max, step)``."""
    parts = [p.strip() for p in str(text).split(":")]
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, v, 1.0
        if len(parts) == 3:
            lo, hi, step = (float(p) for p in parts)
            return lo, hi, step
    except ValueError:
        pass
    raise ConfigurationError(f"SNR must be 'min:max:step' or a single value, got {text!r}")


def _to_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _to_optional_int(text: str):
    return None if text.strip().lower() in ("", "none") else int(text)


def _to_optional_str(text: str):
    return None if text.strip().lower() in ("", "none") else text.strip()


# config key -> (SimConfig field, converter)
CONFIG_KEYS = {
    "users": ("K", int),
    "relays": ("L", int),
    "chips": ("N", int),
    "symbols": ("M", int),
    "buffer.J": ("J", int),
    "buffer.size": ("J", int),
    "buffer.mode": ("buffer_mode", str),
    "buffer.Jmin": ("J_min", int),
    "buffer.Jmax": ("J_max", int),
    "buffer.gamma": ("gamma", float),
    "buffer.d1": ("d1", float),
    "buffer.d2": ("d2", int),
    "buffer.d3": ("d3", int),
    "scheme": ("scheme", str),
    "selection": ("selection", str),
    "relay.detector": ("relay_detector", str),
    "dest.detector": ("dest_detector", str),
    "packets": ("packets", int),
    "seed": ("seed", int),
    "channel.law": ("channel_law", str),
    "estimation": ("estimation", _to_bool),
    "pilots": ("pilots", int),
    "max_epochs": ("max_epochs", _to_optional_int),
    "out": ("out", _to_optional_str),
}


def _normalise_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    aliases = {
        "relay_detector": "relay.detector",
        "dest_detector": "dest.detector",
        "buffer_size": "buffer.J",
        "buffer_mode": "buffer.mode",
        "channel_law": "channel.law",
    }
    return aliases.get(k, k)


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into SimConfig keyword arguments.

    Blank lines and everything after ``#`` are ignored. ``snr`` takes the
    same ``min:max:step`` form as the command line.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _normalise_key(key)
        if key == "snr":
            values["snr_min"], values["snr_max"], values["snr_step"] = parse_snr_range(value)
            continue
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        name, conv = CONFIG_KEYS[key]
        try:
            values[name] = conv(value)
        except ValueError:
            raise ConfigurationError(f"{source}:{lineno}: bad value {value!r} for {key}") from None
    return values


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config_text(text, source=str(path))
