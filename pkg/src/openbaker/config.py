"""Flat key-value run configuration.

Grammar: one `key = value` per line, `#` starts a comment, blank lines
ignored.  Keys are dotted section paths (e.g. `map.D`, `count.radii`).
Lists are comma-separated; `pi` is accepted where an angle is expected.
The full key reference lives in the README.
"""

from __future__ import annotations

import math
from pathlib import Path

from .classical import OpenBakerSpec


class ConfigError(ValueError):
    """Raised for unparseable or inconsistent run configuration."""


def parse_config(text: str) -> dict:
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = value.strip()
    return cfg


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def get_str(cfg: dict, key: str, default=None, choices=None) -> str:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r}")
    val = cfg[key]
    if choices and val not in choices:
        raise ConfigError(f"{key}: expected one of {sorted(choices)}, got {val!r}")
    return val


def get_int(cfg: dict, key: str, default=None) -> int:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r}")
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {cfg[key]!r}") from exc


def get_float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r}")
    return _parse_float(cfg[key], key)


def _parse_float(token: str, key: str) -> float:
    token = token.strip()
    if token == "pi":
        return math.pi
    try:
        return float(token)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {token!r}") from exc


def get_int_list(cfg: dict, key: str, default=None) -> list:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r}")
    try:
        return [int(tok) for tok in cfg[key].split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated integers") from exc


def get_float_list(cfg: dict, key: str, default=None) -> list:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r}")
    return [_parse_float(tok, key) for tok in cfg[key].split(",") if tok.strip()]


def get_spec(cfg: dict) -> OpenBakerSpec:
    """Build the baker spec from map.D and map.kept."""
    D = get_int(cfg, "map.D")
    kept = get_int_list(cfg, "map.kept")
    try:
        return OpenBakerSpec(D, tuple(kept))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def get_dimensions(cfg: dict, D: int) -> list:
    """Dimension list: either `spectrum.N = 20,100` or the geometric
    sequence `spectrum.N0 = 20` + `spectrum.kmax = 3` expanding to N0*D^k."""
    if "spectrum.N" in cfg:
        dims = get_int_list(cfg, "spectrum.N")
    elif "spectrum.N0" in cfg:
        N0 = get_int(cfg, "spectrum.N0")
        kmax = get_int(cfg, "spectrum.kmax")
        if kmax < 0:
            raise ConfigError("spectrum.kmax must be >= 0")
        dims = [N0 * D**k for k in range(kmax + 1)]
    else:
        raise ConfigError("missing spectrum.N or spectrum.N0/spectrum.kmax")
    for N in dims:
        if N < 1:
            raise ConfigError(f"dimension {N} must be positive")
    return dims
