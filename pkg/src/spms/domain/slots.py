"""Slot state machine and lot occupancy accounting.

A slot is always in exactly one of four states. Sensor and booking events
move it between FREE/RESERVED/OCCUPIED; only operator fault/restore events
enter or leave OUT_OF_SERVICE.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from spms.domain.errors import IllegalTransition


class SlotState(enum.Enum):
    FREE = "FREE"
    RESERVED = "RESERVED"
    OCCUPIED = "OCCUPIED"
    OUT_OF_SERVICE = "OUT_OF_SERVICE"


class SlotEvent(enum.Enum):
    RESERVE = "RESERVE"
    RELEASE_RESERVATION = "RELEASE_RESERVATION"
    SENSOR_OCCUPIED = "SENSOR_OCCUPIED"
    SENSOR_VACATED = "SENSOR_VACATED"
    FAULT = "FAULT"
    RESTORE = "RESTORE"


# Total over all 24 (state, event) pairs: pairs absent here are rejections.
_TRANSITIONS: dict[tuple[SlotState, SlotEvent], SlotState] = {
    (SlotState.FREE, SlotEvent.RESERVE): SlotState.RESERVED,
    (SlotState.FREE, SlotEvent.SENSOR_OCCUPIED): SlotState.OCCUPIED,
    (SlotState.FREE, SlotEvent.FAULT): SlotState.OUT_OF_SERVICE,
    (SlotState.RESERVED, SlotEvent.RELEASE_RESERVATION): SlotState.FREE,
    (SlotState.RESERVED, SlotEvent.SENSOR_OCCUPIED): SlotState.OCCUPIED,
    (SlotState.RESERVED, SlotEvent.FAULT): SlotState.OUT_OF_SERVICE,
    (SlotState.OCCUPIED, SlotEvent.SENSOR_VACATED): SlotState.FREE,
    (SlotState.OCCUPIED, SlotEvent.FAULT): SlotState.OUT_OF_SERVICE,
    (SlotState.OUT_OF_SERVICE, SlotEvent.RESTORE): SlotState.FREE,
}


def slot_transition(state: SlotState, event: SlotEvent) -> SlotState:
    """Return the next slot state, or raise IllegalTransition.

    The table is total: every pair either maps to a next state or is a
    named rejection. Duplicate sensor readings are rejections here; the
    parking service filters them out before applying transitions.
    """
    try:
        return _TRANSITIONS[(state, event)]
    except KeyError:
        raise IllegalTransition(state, event) from None


@dataclass(frozen=True)
class Slot:
    slot_id: str
    lot_id: str
    label: str
    state: SlotState = SlotState.FREE

    def with_state(self, state: SlotState) -> "Slot":
        return replace(self, state=state)

    def apply(self, event: SlotEvent) -> "Slot":
        return self.with_state(slot_transition(self.state, event))


@dataclass(frozen=True)
class ParkingLot:
    lot_id: str
    name: str
    lat: float
    lon: float
    slots: tuple[Slot, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.slots:
            raise ValueError("a lot must have at least one slot")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")
        ids = [s.slot_id for s in self.slots]
        if len(set(ids)) != len(ids):
            raise ValueError("slot ids must be unique within a lot")


@dataclass(frozen=True)
class OccupancySummary:
    free: int
    reserved: int
    occupied: int
    out_of_service: int
    total: int


def occupancy_summary(lot: ParkingLot) -> OccupancySummary:
    """Count slots per state; free+reserved+occupied+out_of_service = total."""
    counts = {state: 0 for state in SlotState}
    for slot in lot.slots:
        counts[slot.state] += 1
    return OccupancySummary(
        free=counts[SlotState.FREE],
        reserved=counts[SlotState.RESERVED],
        occupied=counts[SlotState.OCCUPIED],
        out_of_service=counts[SlotState.OUT_OF_SERVICE],
        total=len(lot.slots),
    )
