"""Configuration files.

Lot descriptions and user seeds are line-delimited JSON (one object per
line, same framing as the event log); the service config is a single JSON
object. One parser covers all three.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from spms.domain import ExtraService, Tariff


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LotConfig:
    lot_id: str
    name: str
    lat: float
    lon: float
    slot_labels: tuple[str, ...]
    gates: tuple[str, ...]
    tariff: Tariff
    extras: tuple[ExtraService, ...] = ()

    def __post_init__(self):
        if not self.slot_labels:
            raise ConfigError(f"lot {self.lot_id}: needs at least one slot label")
        if len(set(self.slot_labels)) != len(self.slot_labels):
            raise ConfigError(f"lot {self.lot_id}: slot labels must be unique")
        if not self.gates:
            raise ConfigError(f"lot {self.lot_id}: needs at least one gate")

    @property
    def entry_gate(self) -> str:
        return self.gates[0]

    @property
    def exit_gate(self) -> str:
        return self.gates[-1]


def tariff_from_dict(raw: dict) -> Tariff:
    return Tariff(
        rate_minor_per_quantum=int(raw["rate_minor_per_quantum"]),
        quantum_minutes=int(raw["quantum_minutes"]),
        currency_code=str(raw.get("currency_code", "USD")),
    )


def extras_from_list(raw: list) -> tuple[ExtraService, ...]:
    return tuple(
        ExtraService(
            code=str(e["code"]), name=str(e["name"]), price_minor=int(e["price_minor"])
        )
        for e in raw
    )


def lot_from_dict(raw: dict) -> LotConfig:
    try:
        return LotConfig(
            lot_id=str(raw["lot_id"]),
            name=str(raw["name"]),
            lat=float(raw["lat"]),
            lon=float(raw["lon"]),
            slot_labels=tuple(str(s) for s in raw["slots"]),
            gates=tuple(str(g) for g in raw.get("gates", ["G1"])),
            tariff=tariff_from_dict(raw["tariff"]),
            extras=extras_from_list(raw.get("extras", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad lot config: {exc}") from exc


def load_jsonl(path: str | Path) -> list[dict]:
    """Read line-delimited JSON; blank lines are allowed, comments are not."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise ConfigError(f"{path}:{lineno}: expected an object")
            records.append(record)
    return records


def load_lots_file(path: str | Path) -> list[LotConfig]:
    return [lot_from_dict(r) for r in load_jsonl(path)]


@dataclass(frozen=True)
class ServiceConfig:
    """Knobs read once at service start."""

    tariff: Tariff = Tariff(rate_minor_per_quantum=250, quantum_minutes=15)
    hold_window_minutes: int = 30
    gate_open_ms: int = 15_000
    heartbeat_ms: int = 2_000  # expected device cadence, informational
    extras: tuple[ExtraService, ...] = ()
    snapshot_every: int = 1000
    tick_interval_s: int = 10
    token_ttl_s: int = 24 * 3600
    reset_code_ttl_s: int = 15 * 60
    password_hash: str = "pbkdf2_sha256"
    password_hash_iterations: int = 100_000
    greeting: str = "WELCOME"
    extra_catalog: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "extra_catalog", {e.code: e for e in self.extras}
        )

    @property
    def hold_window_s(self) -> int:
        return self.hold_window_minutes * 60


def service_config_from_dict(raw: dict) -> ServiceConfig:
    kwargs = {}
    if "tariff" in raw:
        kwargs["tariff"] = tariff_from_dict(raw["tariff"])
    if "extras" in raw:
        kwargs["extras"] = extras_from_list(raw["extras"])
    for key in (
        "hold_window_minutes",
        "gate_open_ms",
        "heartbeat_ms",
        "snapshot_every",
        "tick_interval_s",
        "token_ttl_s",
        "reset_code_ttl_s",
        "password_hash_iterations",
    ):
        if key in raw:
            kwargs[key] = int(raw[key])
    for key in ("password_hash", "greeting"):
        if key in raw:
            kwargs[key] = str(raw[key])
    try:
        return ServiceConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad service config: {exc}") from exc


def load_service_config(path: str | Path) -> ServiceConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return service_config_from_dict(raw)
