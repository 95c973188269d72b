"""Scenario scripts: timed arrivals, departures and sensor faults.

One JSON object per line, e.g.

    {"at_ms": 1000, "action": "car_arrives", "plate": "ABC123", "slot": "any"}
    {"at_ms": 5000, "action": "car_departs", "plate": "ABC123"}
    {"at_ms": 6000, "action": "slot_fault", "slot": "S2", "stuck": "0"}
    {"at_ms": 9000, "action": "slot_restore", "slot": "S2"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class ScenarioError(ValueError):
    pass


class ParseError(ScenarioError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class UnsortedEvents(ScenarioError):
    pass


class DuplicatePlate(ScenarioError):
    pass


@dataclass(frozen=True)
class CarArrives:
    plate: str
    slot: str  # explicit slot id or "any"


@dataclass(frozen=True)
class CarDeparts:
    plate: str


@dataclass(frozen=True)
class SlotFault:
    slot: str
    stuck: str  # "0" or "1"


@dataclass(frozen=True)
class SlotRestore:
    slot: str


Action = CarArrives | CarDeparts | SlotFault | SlotRestore


@dataclass(frozen=True)
class ScenarioEvent:
    at_ms: int
    action: Action


@dataclass(frozen=True)
class Scenario:
    events: tuple[ScenarioEvent, ...]

    @property
    def end_ms(self) -> int:
        return self.events[-1].at_ms if self.events else 0


def _parse_action(raw: dict, lineno: int) -> Action:
    kind = raw.get("action")
    try:
        if kind == "car_arrives":
            return CarArrives(plate=str(raw["plate"]), slot=str(raw.get("slot", "any")))
        if kind == "car_departs":
            return CarDeparts(plate=str(raw["plate"]))
        if kind == "slot_fault":
            stuck = str(raw["stuck"])
            if stuck not in ("0", "1"):
                raise ParseError(lineno, f'stuck must be "0" or "1", got {stuck!r}')
            return SlotFault(slot=str(raw["slot"]), stuck=stuck)
        if kind == "slot_restore":
            return SlotRestore(slot=str(raw["slot"]))
    except KeyError as exc:
        raise ParseError(lineno, f"missing field {exc.args[0]!r} for {kind}") from None
    raise ParseError(lineno, f"unknown action {kind!r}")


def parse_scenario(lines) -> Scenario:
    events: list[ScenarioEvent] = []
    parked: set[str] = set()
    last_ms = -1
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ParseError(lineno, "expected a JSON object")
        try:
            at_ms = int(raw["at_ms"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(lineno, "missing or non-integer at_ms") from None
        if at_ms < last_ms:
            raise UnsortedEvents(f"line {lineno}: at_ms {at_ms} before {last_ms}")
        last_ms = at_ms
        action = _parse_action(raw, lineno)
        # Plates must be unique among currently-parked cars; a static walk
        # over the script catches double arrivals up front.
        if isinstance(action, CarArrives):
            if action.plate in parked:
                raise DuplicatePlate(
                    f"line {lineno}: plate {action.plate} is already parked"
                )
            parked.add(action.plate)
        elif isinstance(action, CarDeparts):
            parked.discard(action.plate)
        events.append(ScenarioEvent(at_ms=at_ms, action=action))
    return Scenario(events=tuple(events))


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh)
