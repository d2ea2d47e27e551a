"""TOML run configuration, validated against a JSON schema before use."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import tomli

from .errors import ConfigError
from .model import Economy, GoodSpec, PerceptionMode

_GOOD = {
    "type": "object",
    "properties": {
        "e": {"type": "number", "exclusiveMinimum": 0},
        "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    },
    "required": ["e"],
    "additionalProperties": False,
}
_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_AXIS = {
    "type": "object",
    "properties": {
        "min": {"type": "number"},
        "max": {"type": "number"},
        "n": {"type": "integer", "minimum": 1},
    },
    "required": ["min", "max", "n"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "revenue": {"type": "number", "minimum": 0},
        "economy": {
            "type": "object",
            "properties": {
                "mode": {"enum": [m.value for m in PerceptionMode]},
                "goods": {"type": "array", "items": _GOOD, "minItems": 2, "maxItems": 2},
            },
            "required": ["goods"],
            "additionalProperties": False,
        },
        "trace": {
            "type": "object",
            "properties": {
                "t1": _PAIR,
                "t2": _PAIR,
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {"theta2": _AXIS, "e2": _AXIS},
            "additionalProperties": False,
        },
        "existence": {
            "type": "object",
            "properties": {
                "e_i": {"type": "number", "exclusiveMinimum": 0},
                "e_j": {"type": "number", "exclusiveMinimum": 0},
                "revenue": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "verify": {
            "type": "object",
            "properties": {
                "samples": {"type": "integer", "minimum": 1},
                "grid_n": {"type": "integer", "minimum": 10},
            },
            "additionalProperties": False,
        },
    },
    "required": ["economy"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class RunConfig:
    economy: Economy
    revenue: float = 0.0
    trace: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    existence: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)


def parse_config(raw: dict) -> RunConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    econ = raw["economy"]
    goods = [GoodSpec(g["e"], g.get("theta", 1.0)) for g in econ["goods"]]
    mode = PerceptionMode(econ.get("mode", PerceptionMode.TAXED_ONLY.value))
    return RunConfig(
        economy=Economy(goods[0], goods[1], mode),
        revenue=float(raw.get("revenue", 0.0)),
        trace=dict(raw.get("trace", {})),
        sweep=dict(raw.get("sweep", {})),
        existence=dict(raw.get("existence", {})),
        verify=dict(raw.get("verify", {})),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None
    return parse_config(raw)
