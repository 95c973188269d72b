"""Deterministic lot simulator.

Drives the hardware models from a scenario over a virtual clock. Publishes
an ir message only when a slot's emitted reading changes (edge-triggered)
plus a full snapshot every heartbeat interval; piezo "1" fires when a car
reaches a gate pad. Identical (scenario, config) inputs produce a
byte-identical publish log.
"""

from __future__ import annotations

import logging
import queue
import time
from dataclasses import dataclass
from typing import Callable

from spms.broker.client import MqttClient
from spms.config import LotConfig
from spms.sim.clock import SimClock
from spms.sim.hardware import GateState, Lcd, SimSlot, TextTooLong, ir_reading
from spms.sim.scenario import (
    CarArrives,
    CarDeparts,
    Scenario,
    ScenarioEvent,
    SlotFault,
    SlotRestore,
)

log = logging.getLogger(__name__)

PublishSink = Callable[[str, bytes], None]

DEFAULT_HEARTBEAT_MS = 2000
GATE_OPEN_PULSE = "2000"
GATE_CLOSED_PULSE = "1000"


@dataclass(frozen=True)
class SimWarning:
    at_ms: int
    message: str


class LotSimulator:
    """Single-threaded event loop over the virtual clock.

    Incoming gate/display commands are queued at the network boundary and
    drained at the start of each step; nothing else mutates shared state.
    """

    def __init__(
        self,
        lot: LotConfig,
        scenario: Scenario,
        heartbeat_ms: int = DEFAULT_HEARTBEAT_MS,
        sink: PublishSink | None = None,
    ):
        if heartbeat_ms <= 0:
            raise ValueError("heartbeat_ms must be positive")
        self.lot = lot
        self.scenario = scenario
        self.heartbeat_ms = heartbeat_ms
        self.sink = sink
        self.clock = SimClock()
        # Slot ids are the labels; "any" assignment scans in label order.
        self.slots: dict[str, SimSlot] = {
            label: SimSlot(slot_id=label) for label in sorted(lot.slot_labels)
        }
        self.gates: dict[str, GateState] = {g: GateState(gate_id=g) for g in lot.gates}
        self.lcd = Lcd()
        self.parked: dict[str, str] = {}  # plate -> slot_id
        self.publish_log: list[tuple[int, str, bytes]] = []
        self.warnings: list[SimWarning] = []
        self._emitted: dict[str, str] = {}  # slot_id -> last published reading
        self._next_event = 0
        self._next_heartbeat_ms = 0  # first heartbeat is the initial snapshot
        self._commands: queue.Queue[tuple[str, bytes]] = queue.Queue()

    # -- network boundary --

    def handle_command(self, topic: str, payload: bytes) -> None:
        """Queue a downlink message; applied at the start of the next step."""
        self._commands.put((topic, payload))

    def topic(self, *parts: str) -> str:
        return "/".join(("lot", self.lot.lot_id) + parts)

    def _publish(self, topic: str, payload: str) -> None:
        data = payload.encode("utf-8")
        self.publish_log.append((self.clock.now_ms, topic, data))
        if self.sink is not None:
            self.sink(topic, data)

    def _warn(self, message: str) -> None:
        self.warnings.append(SimWarning(at_ms=self.clock.now_ms, message=message))
        log.warning("[%dms] %s", self.clock.now_ms, message)

    # -- stepping --

    def step(self, until_ms: int) -> list[tuple[int, str, bytes]]:
        """Advance to until_ms, applying due scenario events and heartbeats.

        Returns the slice of the publish log produced by this step.
        """
        if until_ms < self.clock.now_ms:
            raise ValueError("cannot step backwards")
        self._drain_commands()
        mark = len(self.publish_log)
        events = self.scenario.events
        while True:
            next_event_ms = (
                events[self._next_event].at_ms if self._next_event < len(events) else None
            )
            candidates = [self._next_heartbeat_ms]
            if next_event_ms is not None:
                candidates.append(next_event_ms)
            t = min(candidates)
            if t > until_ms:
                break
            self.clock.advance_to(max(t, self.clock.now_ms))
            # Scenario events first so a coinciding heartbeat reflects them.
            while (
                self._next_event < len(events) and events[self._next_event].at_ms == t
            ):
                self._apply(events[self._next_event])
                self._next_event += 1
            if t == self._next_heartbeat_ms:
                self._heartbeat()
                self._next_heartbeat_ms += self.heartbeat_ms
        self.clock.advance_to(until_ms)
        return self.publish_log[mark:]

    def run_to_end(self, trailing_ms: int = 0) -> list[tuple[int, str, bytes]]:
        return self.step(self.scenario.end_ms + trailing_ms)

    def _drain_commands(self) -> None:
        while True:
            try:
                topic, payload = self._commands.get_nowait()
            except queue.Empty:
                return
            self._apply_command(topic, payload)

    def _apply_command(self, topic: str, payload: bytes) -> None:
        parts = topic.split("/")
        if len(parts) == 5 and parts[2] == "gate" and parts[4] == "cmd":
            self.apply_gate_command(parts[3], payload)
        elif len(parts) == 3 and parts[2] == "display":
            try:
                text = payload.decode("utf-8")
                self.lcd.render(text)
            except (UnicodeDecodeError, TextTooLong) as exc:
                self._warn(f"bad display payload: {exc}")
        else:
            self._warn(f"unknown command topic {topic!r}")

    def apply_gate_command(self, gate_id: str, payload: bytes) -> GateState | None:
        """Set a gate servo; malformed payloads are logged and ignored."""
        gate = self.gates.get(gate_id)
        if gate is None:
            self._warn(f"gate command for unknown gate {gate_id!r}")
            return None
        try:
            pulse = int(payload.decode("ascii").strip())
            gate.set_pulse(pulse)
        except (UnicodeDecodeError, ValueError) as exc:
            self._warn(f"bad gate command {payload!r}: {exc}")
        return gate

    # -- scenario actions --

    def _apply(self, event: ScenarioEvent) -> None:
        action = event.action
        if isinstance(action, CarArrives):
            self._car_arrives(action)
        elif isinstance(action, CarDeparts):
            self._car_departs(action)
        elif isinstance(action, SlotFault):
            self._set_fault(action.slot, action.stuck)
        elif isinstance(action, SlotRestore):
            self._set_fault(action.slot, None)

    def _car_arrives(self, action: CarArrives) -> None:
        if action.plate in self.parked:
            self._warn(f"plate {action.plate} is already parked, arrival ignored")
            return
        gate = self.gates[self.lot.entry_gate]
        gate.vehicle_on_pad = True
        self._publish(self.topic("gate", gate.gate_id, "piezo"), "1")
        gate.vehicle_on_pad = False
        if action.slot == "any":
            slot = next(
                (s for s in self.slots.values() if not s.physically_occupied), None
            )
            if slot is None:
                self._warn(f"no free slot for {action.plate}")
                return
        else:
            slot = self.slots.get(action.slot)
            if slot is None:
                self._warn(f"arrival into unknown slot {action.slot!r}")
                return
            if slot.physically_occupied:
                self._warn(f"slot {slot.slot_id} already occupied, arrival ignored")
                return
        slot.physically_occupied = True
        self.parked[action.plate] = slot.slot_id
        self._emit_if_changed(slot)

    def _car_departs(self, action: CarDeparts) -> None:
        slot_id = self.parked.pop(action.plate, None)
        if slot_id is None:
            self._warn(f"departure of unknown plate {action.plate}")
            return
        slot = self.slots[slot_id]
        slot.physically_occupied = False
        gate = self.gates[self.lot.exit_gate]
        gate.vehicle_on_pad = True
        self._publish(self.topic("gate", gate.gate_id, "piezo"), "1")
        gate.vehicle_on_pad = False
        self._emit_if_changed(slot)

    def _set_fault(self, slot_id: str, stuck: str | None) -> None:
        slot = self.slots.get(slot_id)
        if slot is None:
            self._warn(f"fault event for unknown slot {slot_id!r}")
            return
        slot.fault = stuck
        self._emit_if_changed(slot)

    # -- telemetry --

    def _emit_if_changed(self, slot: SimSlot) -> None:
        reading = ir_reading(slot)
        if self._emitted.get(slot.slot_id) != reading:
            self._emitted[slot.slot_id] = reading
            self._publish(self.topic("slot", slot.slot_id, "ir"), reading)

    def _heartbeat(self) -> None:
        for slot_id in sorted(self.slots):
            slot = self.slots[slot_id]
            reading = ir_reading(slot)
            self._emitted[slot.slot_id] = reading
            self._publish(self.topic("slot", slot_id, "ir"), reading)


class SimRunner:
    """Wire a LotSimulator to the broker and pace it against the wall clock."""

    def __init__(
        self,
        lot: LotConfig,
        scenario: Scenario,
        broker_host: str,
        broker_port: int,
        heartbeat_ms: int = DEFAULT_HEARTBEAT_MS,
        rate: float = 1.0,
    ):
        self.rate = rate
        self.sim = LotSimulator(lot, scenario, heartbeat_ms=heartbeat_ms)
        self.client = MqttClient(
            client_id=f"sim-{lot.lot_id}",
            host=broker_host,
            port=broker_port,
            keep_alive_s=30,
            on_message=self.sim.handle_command,
        )
        self.sim.sink = lambda topic, payload: self.client.publish(
            topic, payload, qos=1
        )

    def start(self) -> None:
        self.client.connect(retries=10)
        lot_id = self.sim.lot.lot_id
        self.client.subscribe(f"lot/{lot_id}/gate/+/cmd", f"lot/{lot_id}/display")

    def run(self, stop_check: Callable[[], bool] | None = None) -> None:
        """Run the scenario; rate r multiplies virtual time, 0 = instant."""
        end_ms = self.sim.scenario.end_ms + self.sim.heartbeat_ms
        if self.rate <= 0:
            self.sim.run_to_end(trailing_ms=self.sim.heartbeat_ms)
            return
        slice_wall_s = 0.05
        while self.sim.clock.now_ms < end_ms:
            if stop_check is not None and stop_check():
                return
            time.sleep(slice_wall_s)
            self.sim.step(
                min(end_ms, self.sim.clock.now_ms + int(slice_wall_s * 1000 * self.rate))
            )

    def close(self) -> None:
        self.client.close()
