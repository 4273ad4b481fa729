"""TOML configuration for system parameters and simulation settings.

A document holds the parameter keys ``p, alpha, mu1..mu6, M1..M5`` either at top
level or in a ``[system]`` table, plus optional ``[simulation]`` and ``[meta]``
tables. Floats are read as :class:`decimal.Decimal` and rounded once to the
nearest double, so decimal inputs survive ``dump_params``/``load_params`` exactly.
"""

from __future__ import annotations

import os
import tomllib
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Mapping

from vnfchain.core.errors import ConfigError
from vnfchain.models.simulation import DEFAULT_SEED, DEFAULT_SLOTS, DEFAULT_WARMUP, SimConfig
from vnfchain.models.system import BUFFER_COUNT, MU_COUNT, SystemParams, validate

from .logging import get_logger

CONFIG_ENV_VAR = "VNFCHAIN_CONFIG"

PROBABILITY_KEYS: tuple[str, ...] = ("p", "alpha") + tuple(f"mu{i}" for i in range(1, MU_COUNT + 1))
CAPACITY_KEYS: tuple[str, ...] = tuple(f"M{i}" for i in range(1, BUFFER_COUNT + 1))
PARAM_KEYS: tuple[str, ...] = PROBABILITY_KEYS + CAPACITY_KEYS
SIMULATION_KEYS: tuple[str, ...] = ("slots", "warmup", "seed", "runs")
META_KEYS: tuple[str, ...] = ("name", "description")

_logger = get_logger("vnfchain.services.config")


@dataclass(frozen=True, slots=True)
class SimulationSettings:
    slots: int = DEFAULT_SLOTS
    warmup: int = DEFAULT_WARMUP
    seed: int = DEFAULT_SEED
    runs: int = 1

    def to_config(self) -> SimConfig:
        try:
            return SimConfig(slots=self.slots, warmup=self.warmup, seed=self.seed)
        except ValueError as error:
            raise ConfigError(str(error), key="simulation") from error


@dataclass(frozen=True, slots=True)
class ConfigDocument:
    params: SystemParams
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    meta: dict[str, str] = field(default_factory=dict)
    source: str | None = None


def _probability(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (Decimal, int)):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    return float(value)


def _capacity(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", key=key)
    return value


def _params_from_mapping(values: Mapping[str, Any]) -> SystemParams:
    unknown = sorted(set(values) - set(PARAM_KEYS))
    if unknown:
        raise ConfigError("unknown key", key=unknown[0])
    missing = [key for key in PARAM_KEYS if key not in values]
    if missing:
        raise ConfigError("missing key", key=missing[0])
    params = SystemParams(
        p=_probability("p", values["p"]),
        alpha=_probability("alpha", values["alpha"]),
        mu=tuple(_probability(f"mu{i}", values[f"mu{i}"]) for i in range(1, MU_COUNT + 1)),
        buffer=tuple(_capacity(key, values[key]) for key in CAPACITY_KEYS),
    )
    return validate(params)


def _simulation_from_table(table: Any) -> SimulationSettings:
    if not isinstance(table, Mapping):
        raise ConfigError("expected a table", key="simulation")
    unknown = sorted(set(table) - set(SIMULATION_KEYS))
    if unknown:
        raise ConfigError("unknown key", key=f"simulation.{unknown[0]}")
    values = {key: _capacity(f"simulation.{key}", table[key]) for key in table}
    return SimulationSettings(**values)


def _meta_from_table(table: Any) -> dict[str, str]:
    if not isinstance(table, Mapping):
        raise ConfigError("expected a table", key="meta")
    meta: dict[str, str] = {}
    for key, value in table.items():
        if key not in META_KEYS:
            raise ConfigError("unknown key", key=f"meta.{key}")
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key=f"meta.{key}")
        meta[key] = value
    return meta


def parse_config(text: str, *, source: str | None = None) -> ConfigDocument:
    try:
        document = tomllib.loads(text, parse_float=Decimal)
    except tomllib.TOMLDecodeError as error:
        raise ConfigError(f"malformed TOML: {error}") from error

    system: dict[str, Any] = {}
    simulation = SimulationSettings()
    meta: dict[str, str] = {}
    for key, value in document.items():
        if key == "system":
            if not isinstance(value, Mapping):
                raise ConfigError("expected a table", key="system")
            for inner, inner_value in value.items():
                if inner in system:
                    raise ConfigError("given both at top level and in [system]", key=inner)
                system[inner] = inner_value
        elif key == "simulation":
            simulation = _simulation_from_table(value)
        elif key == "meta":
            meta = _meta_from_table(value)
        elif isinstance(value, Mapping):
            raise ConfigError("unknown table", key=key)
        else:
            if key in system:
                raise ConfigError("given both at top level and in [system]", key=key)
            system[key] = value
    return ConfigDocument(params=_params_from_mapping(system), simulation=simulation, meta=meta, source=source)


def resolve_config_path(path: str | Path | None) -> Path:
    if path is not None:
        return Path(path).expanduser()
    env_path = os.getenv(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path).expanduser()
    raise ConfigError(f"no configuration file given and {CONFIG_ENV_VAR} is not set")


def load_config(path: str | Path | None = None) -> ConfigDocument:
    """Read a config file; ``None`` falls back to ``VNFCHAIN_CONFIG``."""

    resolved = resolve_config_path(path)
    try:
        text = resolved.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read {resolved}: {error.strerror or error}") from error
    document = parse_config(text, source=str(resolved))
    _logger.info("config.loaded", path=str(resolved), **document.meta)
    return document


def load_params(source: str | Path) -> SystemParams:
    """Parameters from a :class:`Path` to a config file or from TOML text."""

    if isinstance(source, Path):
        return load_config(source).params
    return parse_config(source).params


def dump_params(params: SystemParams) -> str:
    """Flat TOML form using the shortest round-tripping float representation."""

    validate(params)
    lines = [f"{key} = {value!r}" for key, value in params.as_flat_dict().items()]
    return "\n".join(lines) + "\n"


def _parse_override(key: str, raw: str) -> float | int:
    text = raw.strip()
    if key in CAPACITY_KEYS:
        try:
            return int(text)
        except ValueError as error:
            raise ConfigError(f"expected an integer, got {raw!r}", key=key) from error
    try:
        number = Decimal(text)
    except InvalidOperation as error:
        raise ConfigError(f"expected a decimal number, got {raw!r}", key=key) from error
    if not number.is_finite():
        raise ConfigError(f"expected a finite number, got {raw!r}", key=key)
    return float(number)


def apply_overrides(params: SystemParams, overrides: Mapping[str, str]) -> SystemParams:
    """Replace individual parameters from ``key=decimal`` strings and re-validate."""

    if not overrides:
        return params
    flat: dict[str, float | int] = dict(params.as_flat_dict())
    for key, raw in overrides.items():
        if key not in PARAM_KEYS:
            raise ConfigError("unknown key", key=key)
        flat[key] = _parse_override(key, raw)
    updated = SystemParams(
        p=float(flat["p"]),
        alpha=float(flat["alpha"]),
        mu=tuple(float(flat[f"mu{i}"]) for i in range(1, MU_COUNT + 1)),
        buffer=tuple(int(flat[key]) for key in CAPACITY_KEYS),
    )
    return validate(updated)
