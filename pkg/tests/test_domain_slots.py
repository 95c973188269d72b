"""Slot state machine: full transition table, occupancy, conservation."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spms.domain import (
    IllegalTransition,
    ParkingLot,
    Slot,
    SlotEvent,
    SlotState,
    occupancy_summary,
    slot_transition,
)

F, R, O, X = (
    SlotState.FREE,
    SlotState.RESERVED,
    SlotState.OCCUPIED,
    SlotState.OUT_OF_SERVICE,
)
RESERVE = SlotEvent.RESERVE
RELEASE = SlotEvent.RELEASE_RESERVATION
OCCUPY = SlotEvent.SENSOR_OCCUPIED
VACATE = SlotEvent.SENSOR_VACATED
FAULT = SlotEvent.FAULT
RESTORE = SlotEvent.RESTORE

# Hand-enumerated 4x6 table, cross-checked against the service reconciliation
# rules: bookings only claim FREE slots, sensors flip FREE/RESERVED->OCCUPIED
# and OCCUPIED->FREE, operators own OUT_OF_SERVICE exclusively.
FULL_TABLE = {
    (F, RESERVE): R,
    (F, RELEASE): None,
    (F, OCCUPY): O,
    (F, VACATE): None,
    (F, FAULT): X,
    (F, RESTORE): None,
    (R, RESERVE): None,
    (R, RELEASE): F,
    (R, OCCUPY): O,
    (R, VACATE): None,
    (R, FAULT): X,
    (R, RESTORE): None,
    (O, RESERVE): None,
    (O, RELEASE): None,
    (O, OCCUPY): None,
    (O, VACATE): F,
    (O, FAULT): X,
    (O, RESTORE): None,
    (X, RESERVE): None,
    (X, RELEASE): None,
    (X, OCCUPY): None,
    (X, VACATE): None,
    (X, FAULT): None,
    (X, RESTORE): F,
}


def test_table_is_total():
    assert len(FULL_TABLE) == len(SlotState) * len(SlotEvent) == 24


@pytest.mark.parametrize("state,event", list(FULL_TABLE))
def test_transition_matches_hand_table(state, event):
    expected = FULL_TABLE[(state, event)]
    if expected is None:
        with pytest.raises(IllegalTransition):
            slot_transition(state, event)
    else:
        assert slot_transition(state, event) is expected


def test_spec_examples():
    assert slot_transition(F, RESERVE) is R
    assert slot_transition(R, OCCUPY) is O
    with pytest.raises(IllegalTransition):
        slot_transition(O, RESERVE)
    assert slot_transition(X, RESTORE) is F


def test_out_of_service_only_via_operator_events():
    # No sensor or booking event ever enters or leaves OUT_OF_SERVICE.
    for state in SlotState:
        for event in (RESERVE, RELEASE, OCCUPY, VACATE):
            target = FULL_TABLE[(state, event)]
            if target is not None:
                assert target is not X
            if state is X:
                assert target is None


def make_lot(states):
    slots = tuple(
        Slot(slot_id=f"S{i}", lot_id="L1", label=f"S{i}", state=s)
        for i, s in enumerate(states, start=1)
    )
    return ParkingLot(lot_id="L1", name="Lot 1", lat=0.0, lon=0.0, slots=slots)


def test_occupancy_summary_spec_example():
    summary = occupancy_summary(make_lot([F, R, O, F]))
    assert (summary.free, summary.reserved, summary.occupied) == (2, 1, 1)
    assert summary.out_of_service == 0
    assert summary.total == 4


def test_single_slot_lot():
    summary = occupancy_summary(make_lot([F]))
    assert (summary.free, summary.reserved, summary.occupied, summary.out_of_service) == (1, 0, 0, 0)
    assert summary.total == 1


def test_empty_lot_rejected():
    with pytest.raises(ValueError):
        ParkingLot(lot_id="L1", name="empty", lat=0.0, lon=0.0, slots=())


def test_duplicate_slot_ids_rejected():
    slots = (Slot("S1", "L1", "A"), Slot("S1", "L1", "B"))
    with pytest.raises(ValueError):
        ParkingLot(lot_id="L1", name="dup", lat=0.0, lon=0.0, slots=slots)


@pytest.mark.parametrize("lat,lon", [(91.0, 0.0), (-91.0, 0.0), (0.0, 181.0), (0.0, -180.5)])
def test_coordinates_validated(lat, lon):
    with pytest.raises(ValueError):
        ParkingLot(lot_id="L1", name="bad", lat=lat, lon=lon, slots=(Slot("S1", "L1", "S1"),))


def test_random_occupancy_matches_brute_force_tally():
    rng = random.Random(20240817)
    states = [rng.choice(list(SlotState)) for _ in range(50)]
    summary = occupancy_summary(make_lot(states))
    # Independent oracle: plain list.count per state.
    assert summary.free == states.count(F)
    assert summary.reserved == states.count(R)
    assert summary.occupied == states.count(O)
    assert summary.out_of_service == states.count(X)
    assert summary.total == 50


@settings(max_examples=200)
@given(st.lists(st.sampled_from(list(SlotEvent)), min_size=0, max_size=60))
def test_conservation_under_legal_transitions(events):
    # Apply each event to the first slot that accepts it; illegal ones skip.
    slots = [Slot(f"S{i}", "L1", f"S{i}") for i in range(1, 6)]
    for event in events:
        for i, slot in enumerate(slots):
            try:
                slots[i] = slot.apply(event)
            except IllegalTransition:
                continue
            break
        lot = ParkingLot("L1", "Lot 1", 0.0, 0.0, tuple(slots))
        s = occupancy_summary(lot)
        assert s.free + s.reserved + s.occupied + s.out_of_service == s.total == 5
