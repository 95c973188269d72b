"""Parking service engine: accounts, bookings, reconciliation, replay."""

import itertools
import random

import pytest

from service_fixtures import (
    FAST_CONFIG,
    LOT_DICT,
    T0,
    book,
    ir,
    make_engine,
    piezo,
    register_and_login,
)
from spms.config import ServiceConfig
from spms.service.commands import (
    AddExtra,
    AddLot,
    CancelReservation,
    CreateReservation,
    Login,
    OperatorFault,
    OperatorRestore,
    RegisterUser,
    ResetPasswordRedeem,
    ResetPasswordRequest,
    TimerTick,
)
from spms.service.engine import Engine
from spms.service.errors import ServiceError


def expect_error(code):
    return pytest.raises(ServiceError, match=rf"^{code}:")


# --- users & auth ---


def test_register_assigns_unique_id(tmp_path):
    engine = make_engine(tmp_path)
    applied = engine.execute(
        RegisterUser(name="A", email="a@x.io", phone="1", password="longenough"), now=T0
    )
    assert applied.result["user_id"] == "u000001"
    assert "password" not in applied.result and "password_hash" not in applied.result


def test_duplicate_email_rejected(tmp_path):
    engine = make_engine(tmp_path)
    cmd = RegisterUser(name="A", email="A@x.io", phone="1", password="longenough")
    engine.execute(cmd, now=T0)
    with expect_error("duplicate_email"):
        engine.execute(cmd, now=T0)  # case-insensitive: stored lowercased


def test_weak_password_and_bad_email_rejected(tmp_path):
    engine = make_engine(tmp_path)
    with expect_error("weak_password"):
        engine.execute(RegisterUser(name="A", email="a@x.io", phone="", password="short"), now=T0)
    with expect_error("invalid_email"):
        engine.execute(RegisterUser(name="A", email="not-an-email", phone="", password="longenough"), now=T0)


def test_bulk_registration_ids_unique(tmp_path):
    engine = make_engine(tmp_path, lot=False)
    ids = set()
    for i in range(500):
        applied = engine.execute(
            RegisterUser(name=f"U{i}", email=f"u{i}@x.io", phone="", password="longenough"),
            now=T0,
        )
        ids.add(applied.result["user_id"])
    assert len(ids) == 500


def test_login_and_token_auth(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    assert engine.authenticate_token(session["token"], now=T0) == session["user_id"]
    assert session["expires_at"] == (T0 - 1800) + 24 * 3600


def test_token_expiry_strict(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine, now=T0)
    expires = session["expires_at"]
    assert engine.authenticate_token(session["token"], now=expires - 1)
    with expect_error("unauthorized"):
        engine.authenticate_token(session["token"], now=expires)


def test_wrong_password_and_unknown_email_same_code(tmp_path):
    engine = make_engine(tmp_path)
    register_and_login(engine)
    with pytest.raises(ServiceError) as wrong_pw:
        engine.execute(Login(email="amira@example.com", password="wrong-password"), now=T0)
    with pytest.raises(ServiceError) as unknown:
        engine.execute(Login(email="nobody@example.com", password="wrong-password"), now=T0)
    assert wrong_pw.value.code == unknown.value.code == "invalid_credentials"
    assert str(wrong_pw.value) == str(unknown.value)


def test_password_reset_flow(tmp_path):
    engine = make_engine(tmp_path)
    register_and_login(engine)
    applied = engine.execute(ResetPasswordRequest(email="amira@example.com"), now=T0)
    code = next(e["code"] for e in applied.events if e["event"] == "reset_code_issued")
    notif = next(e for e in applied.events if e["event"] == "notification_created")
    assert code in notif["notification"]["body"]

    engine.execute(
        ResetPasswordRedeem(code=code, new_password="brand-new-pass"), now=T0 + 600
    )
    with expect_error("invalid_credentials"):
        engine.execute(Login(email="amira@example.com", password="hunter2hunter"), now=T0 + 700)
    engine.execute(Login(email="amira@example.com", password="brand-new-pass"), now=T0 + 700)


def test_reset_code_single_use(tmp_path):
    engine = make_engine(tmp_path)
    register_and_login(engine)
    applied = engine.execute(ResetPasswordRequest(email="amira@example.com"), now=T0)
    code = next(e["code"] for e in applied.events if e["event"] == "reset_code_issued")
    engine.execute(ResetPasswordRedeem(code=code, new_password="brand-new-pass"), now=T0)
    with expect_error("code_already_used"):
        engine.execute(ResetPasswordRedeem(code=code, new_password="other-new-pass"), now=T0)


def test_reset_code_expiry_boundary(tmp_path):
    engine = make_engine(tmp_path)
    register_and_login(engine)
    applied = engine.execute(ResetPasswordRequest(email="amira@example.com"), now=T0)
    code = next(e["code"] for e in applied.events if e["event"] == "reset_code_issued")
    with expect_error("code_expired"):
        engine.execute(
            ResetPasswordRedeem(code=code, new_password="brand-new-pass"),
            now=T0 + 15 * 60 + 60,  # redeem at +16 min
        )


def test_reset_for_unknown_email_is_silent(tmp_path):
    engine = make_engine(tmp_path)
    applied = engine.execute(ResetPasswordRequest(email="ghost@example.com"), now=T0)
    assert applied.result == {"status": "accepted"}
    assert applied.seq == 0 and applied.events == ()


# --- reservations ---


def test_create_reservation_with_notification(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    applied = book(engine, session["user_id"], now=T0, start=T0 + 600, end=T0 + 4200)
    res = applied.result
    assert res["reservation_id"] == "r000001"
    assert res["state"] == "ACTIVE"
    assert res["slot_id"] == "S1"  # lowest labeled
    assert res["hold_deadline"] == T0 + 600 + 30 * 60
    notifications = [e for e in applied.events if e["event"] == "notification_created"]
    assert len(notifications) == 1
    # Future window: no slot is claimed yet.
    assert engine.state.slot_state("L1", "S1") == "FREE"


def test_immediate_window_reserves_slot(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 3600, slot_id="S2")
    assert engine.state.slot_state("L1", "S2") == "RESERVED"


def test_idempotency_key_dedupes(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    first = book(engine, session["user_id"], now=T0, start=T0 + 60, end=T0 + 3660, key="k1")
    second = book(engine, session["user_id"], now=T0, start=T0 + 60, end=T0 + 3660, key="k1")
    assert first.result["reservation_id"] == second.result["reservation_id"]
    assert second.seq == 0 and second.events == ()
    assert len(engine.state.reservations) == 1


def test_overlapping_windows_rejected_per_slot(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0 + 600, end=T0 + 4200, slot_id="S1")
    with expect_error("slot_unavailable"):
        book(engine, session["user_id"], now=T0, start=T0 + 3000, end=T0 + 6000, slot_id="S1")
    # Touching windows do not overlap.
    book(engine, session["user_id"], now=T0, start=T0 + 4200, end=T0 + 6000, slot_id="S1")


def test_any_slot_picks_lowest_free_for_window(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0 + 600, end=T0 + 4200, slot_id="S1")
    applied = book(engine, session["user_id"], now=T0, start=T0 + 600, end=T0 + 4200)
    assert applied.result["slot_id"] == "S2"


def test_last_slot_race_one_winner_both_orders(tmp_path):
    for order in ([0, 1], [1, 0]):
        engine = make_engine(tmp_path / f"o{order[0]}")
        s1 = register_and_login(engine, email="a@x.io")
        s2 = register_and_login(engine, email="b@x.io")
        users = [s1["user_id"], s2["user_id"]]
        for slot in ("S1", "S2", "S3"):
            book(engine, s1["user_id"], now=T0, start=T0 + 60, end=T0 + 3660, slot_id=slot)
        outcomes = []
        for idx in order:
            try:
                applied = book(engine, users[idx], now=T0, start=T0 + 60, end=T0 + 3660)
                outcomes.append(applied.result["slot_id"])
            except ServiceError as exc:
                outcomes.append(exc.code)
        assert sorted(str(o) for o in outcomes) == ["S4", "no_slot_free"]


def test_booking_cap_surfaced(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 86400, slot_id="S1")
    with expect_error("booking_too_long"):
        book(engine, session["user_id"], now=T0, start=T0, end=T0 + 86401, slot_id="S2")
    with expect_error("booking_in_past"):
        book(engine, session["user_id"], now=T0, start=T0 - 10, end=T0 + 3600, slot_id="S2")
    with expect_error("empty_window"):
        book(engine, session["user_id"], now=T0, start=T0 + 60, end=T0 + 60, slot_id="S2")


def test_cancel_frees_reserved_slot(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    applied = book(engine, session["user_id"], now=T0, start=T0, end=T0 + 3600, slot_id="S1")
    rid = applied.result["reservation_id"]
    assert engine.state.slot_state("L1", "S1") == "RESERVED"
    cancelled = engine.execute(
        CancelReservation(user_id=session["user_id"], reservation_id=rid), now=T0 + 60
    )
    assert cancelled.result["state"] == "CANCELLED"
    assert engine.state.slot_state("L1", "S1") == "FREE"


def test_cancel_by_non_owner_rejected(tmp_path):
    engine = make_engine(tmp_path)
    owner = register_and_login(engine, email="own@x.io")
    other = register_and_login(engine, email="oth@x.io")
    applied = book(engine, owner["user_id"], now=T0, start=T0 + 60, end=T0 + 3660)
    with expect_error("not_owner"):
        engine.execute(
            CancelReservation(
                user_id=other["user_id"], reservation_id=applied.result["reservation_id"]
            ),
            now=T0,
        )


def test_cancel_checked_in_rejected(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    applied = book(engine, session["user_id"], now=T0, start=T0, end=T0 + 7200, slot_id="S1")
    ir(engine, "S1", "0", ts=T0 + 300)  # car arrives: CHECKED_IN
    with expect_error("illegal_transition"):
        engine.execute(
            CancelReservation(
                user_id=session["user_id"], reservation_id=applied.result["reservation_id"]
            ),
            now=T0 + 400,
        )


# --- expiry ---


def test_expiry_boundary_strict(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    applied = book(engine, session["user_id"], now=T0, start=T0, end=T0 + 7200, slot_id="S1")
    deadline = applied.result["hold_deadline"]
    at_deadline = engine.execute(TimerTick(now=deadline), now=deadline)
    assert at_deadline.events == ()  # not yet expired at the boundary
    past = engine.execute(TimerTick(now=deadline + 1), now=deadline + 1)
    expired = [e for e in past.events if e["event"] == "reservation_expired"]
    assert len(expired) == 1
    assert engine.state.reservations[applied.result["reservation_id"]]["state"] == "EXPIRED"
    assert engine.state.slot_state("L1", "S1") == "FREE"


def test_tick_activates_future_reservation(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0 + 600, end=T0 + 4200, slot_id="S3")
    assert engine.state.slot_state("L1", "S3") == "FREE"
    engine.execute(TimerTick(now=T0 + 600), now=T0 + 600)
    assert engine.state.slot_state("L1", "S3") == "RESERVED"


def test_expired_reservations_bill_nothing(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 7200, slot_id="S1")
    engine.execute(TimerTick(now=T0 + 1801), now=T0 + 1801)
    assert engine.state.bills == {}


# --- sensor reconciliation ---


def test_walk_in_opens_and_bills(tmp_path):
    engine = make_engine(tmp_path)
    applied = ir(engine, "S1", "0", ts=T0)
    opened = [e for e in applied.events if e["event"] == "session_opened"]
    assert len(opened) == 1
    assert opened[0]["session"]["reservation_id"] is None
    assert engine.state.slot_state("L1", "S1") == "OCCUPIED"

    applied = ir(engine, "S1", "1", ts=T0 + 3660)  # 61 minutes
    bills = [e["bill"] for e in applied.events if e["event"] == "bill_issued"]
    assert len(bills) == 1
    assert bills[0]["duration_minutes"] == 61
    assert bills[0]["base_fee_minor"] == 1250
    assert bills[0]["total_minor"] == 1250
    assert engine.state.slot_state("L1", "S1") == "FREE"


def test_duplicate_readings_idempotent(tmp_path):
    engine = make_engine(tmp_path)
    ir(engine, "S1", "0", ts=T0)
    repeat = ir(engine, "S1", "0", ts=T0 + 10)
    assert repeat.events == () and repeat.seq == 0
    assert len(engine.state.sessions) == 1
    clear = ir(engine, "S2", "1", ts=T0 + 10)  # heartbeat of an empty slot
    assert clear.events == ()


def test_checkin_via_sensor_with_reservation_extras(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(
        engine,
        session["user_id"],
        now=T0,
        start=T0,
        end=T0 + 7200,
        slot_id="S2",
        extras=("wash",),
    )
    applied = ir(engine, "S2", "0", ts=T0 + 300)
    kinds = [e["event"] for e in applied.events]
    assert kinds == ["reservation_checked_in", "session_opened", "slot_changed"]
    opened = applied.events[1]["session"]
    assert opened["reservation_id"] == "r000001"
    assert opened["extras"] == [{"code": "wash", "name": "Car wash", "price_minor": 500}]

    closed = ir(engine, "S2", "1", ts=T0 + 300 + 3600)
    bill = next(e["bill"] for e in closed.events if e["event"] == "bill_issued")
    assert bill["base_fee_minor"] == 1000  # 60 min at 250/15min
    assert bill["extras_fee_minor"] == 500
    assert bill["total_minor"] == 1500
    assert engine.state.reservations["r000001"]["state"] == "COMPLETED"


def test_late_arrival_expires_booking_and_becomes_walk_in(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 7200, slot_id="S1")
    late = T0 + 30 * 60 + 120  # past the hold deadline
    applied = ir(engine, "S1", "0", ts=late)
    kinds = [e["event"] for e in applied.events]
    assert kinds == ["reservation_expired", "session_opened", "slot_changed"]
    assert applied.events[1]["session"]["reservation_id"] is None


def test_ghost_reading_on_out_of_service_records_anomaly(tmp_path):
    engine = make_engine(tmp_path)
    engine.execute(OperatorFault(lot_id="L1", slot_id="S1"), now=T0)
    applied = ir(engine, "S1", "0", ts=T0 + 10)
    assert [e["event"] for e in applied.events] == ["anomaly_recorded"]
    assert engine.state.slot_state("L1", "S1") == "OUT_OF_SERVICE"
    # Heartbeats repeating the same ghost do not flood the log.
    repeat = ir(engine, "S1", "0", ts=T0 + 12)
    assert repeat.events == ()


def test_vacate_reactivates_due_reservation(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    ir(engine, "S1", "0", ts=T0 - 60)  # walk-in parked before the window
    book(engine, session["user_id"], now=T0 - 50, start=T0, end=T0 + 7200, slot_id="S1")
    engine.execute(TimerTick(now=T0 + 10), now=T0 + 10)  # cannot activate: occupied
    assert engine.state.slot_state("L1", "S1") == "OCCUPIED"
    applied = ir(engine, "S1", "1", ts=T0 + 600)
    slot_events = [e for e in applied.events if e["event"] == "slot_changed"]
    assert slot_events[-1]["state"] == "RESERVED"


def test_unknown_topics_and_payloads_ignored(tmp_path):
    engine = make_engine(tmp_path)
    from spms.service.commands import SensorEvent

    for topic, payload in [
        ("lot/L1/slot/S1/ir", "2"),
        ("lot/L9/slot/S1/ir", "0"),
        ("lot/L1/slot/NOPE/ir", "0"),
        ("weird/topic", "0"),
        ("lot/L1/gate/G1/piezo", "0"),
        ("lot/L1/gate/NOPE/piezo", "1"),
    ]:
        applied = engine.execute(SensorEvent(topic=topic, payload=payload, ts=T0), now=T0)
        assert applied.events == (), topic
    assert engine.state.sessions == {}


# --- gates ---


def test_piezo_opens_gate_and_tick_closes_it(tmp_path):
    engine = make_engine(tmp_path)
    applied = piezo(engine, "G1", ts=T0)
    assert [e["event"] for e in applied.events] == ["gate_open_commanded"]
    assert applied.events[0]["close_at"] == T0 + 15
    assert engine.state.pending_gate_close == {"L1/G1": T0 + 15}
    early = engine.execute(TimerTick(now=T0 + 10), now=T0 + 10)
    assert early.events == ()
    due = engine.execute(TimerTick(now=T0 + 15), now=T0 + 15)
    assert [e["event"] for e in due.events] == ["gate_close_commanded"]
    assert engine.state.pending_gate_close == {}


# --- operator fault/restore ---


def test_fault_closes_open_session_and_bills(tmp_path):
    engine = make_engine(tmp_path)
    ir(engine, "S1", "0", ts=T0)
    applied = engine.execute(OperatorFault(lot_id="L1", slot_id="S1"), now=T0 + 900)
    kinds = [e["event"] for e in applied.events]
    assert "session_closed" in kinds and "bill_issued" in kinds
    assert engine.state.slot_state("L1", "S1") == "OUT_OF_SERVICE"
    bill = next(e["bill"] for e in applied.events if e["event"] == "bill_issued")
    assert bill["duration_minutes"] == 15
    with expect_error("illegal_transition"):
        engine.execute(OperatorFault(lot_id="L1", slot_id="S1"), now=T0 + 901)


def test_restore_returns_slot_to_free(tmp_path):
    engine = make_engine(tmp_path)
    engine.execute(OperatorFault(lot_id="L1", slot_id="S1"), now=T0)
    engine.execute(OperatorRestore(lot_id="L1", slot_id="S1"), now=T0 + 60)
    assert engine.state.slot_state("L1", "S1") == "FREE"
    with expect_error("illegal_transition"):
        engine.execute(OperatorRestore(lot_id="L1", slot_id="S1"), now=T0 + 61)


# --- extras on sessions ---


def test_add_extra_to_open_session(tmp_path):
    engine = make_engine(tmp_path)
    ir(engine, "S1", "0", ts=T0)
    session_id = next(iter(engine.state.sessions))
    engine.execute(AddExtra(session_id=session_id, code="wash"), now=T0 + 60)
    engine.execute(AddExtra(session_id=session_id, code="vac"), now=T0 + 90)
    applied = ir(engine, "S1", "1", ts=T0 + 60 * 60)
    bill = next(e["bill"] for e in applied.events if e["event"] == "bill_issued")
    assert bill["extras_fee_minor"] == 800
    assert bill["total_minor"] == 1000 + 800


def test_add_extra_to_closed_session_rejected(tmp_path):
    engine = make_engine(tmp_path)
    ir(engine, "S1", "0", ts=T0)
    ir(engine, "S1", "1", ts=T0 + 600)
    session_id = next(iter(engine.state.sessions))
    with expect_error("session_closed"):
        engine.execute(AddExtra(session_id=session_id, code="wash"), now=T0 + 700)


def test_unknown_extra_rejected(tmp_path):
    engine = make_engine(tmp_path)
    ir(engine, "S1", "0", ts=T0)
    session_id = next(iter(engine.state.sessions))
    with expect_error("unknown_extra"):
        engine.execute(AddExtra(session_id=session_id, code="gold-plating"), now=T0 + 1)


# --- queries ---


def test_search_lots_distance_and_radius(tmp_path):
    engine = make_engine(tmp_path)
    far = dict(LOT_DICT, lot_id="L2", name="Far", lat=31.5, lon=31.9)
    engine.execute(AddLot(lot=far), now=T0)
    results = engine.search_lots(lat=31.416, lon=31.814, radius_m=1000)
    assert [r["lot_id"] for r in results] == ["L1"]
    assert results[0]["distance_m"] == 0
    results = engine.search_lots(lat=31.416, lon=31.814, radius_m=50_000)
    assert [r["lot_id"] for r in results] == ["L1", "L2"]
    assert results[0]["distance_m"] < results[1]["distance_m"]
    assert results[0]["occupancy"]["free"] == 4


def test_list_slots_matches_occupancy(tmp_path):
    engine = make_engine(tmp_path)
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 3600, slot_id="S2")
    ir(engine, "S3", "0", ts=T0)
    slots = engine.list_slots("L1", now=T0)
    states = {s["slot_id"]: s["state"] for s in slots}
    assert states == {"S1": "FREE", "S2": "RESERVED", "S3": "OCCUPIED", "S4": "FREE"}
    occupancy = engine.search_lots(31.416, 31.814, 1000)[0]["occupancy"]
    for key, count in (("free", 2), ("reserved", 1), ("occupied", 1), ("out_of_service", 0)):
        assert occupancy[key] == count
    assert slots[1]["next_reservation_window"] == {
        "window_start": T0,
        "window_end": T0 + 3600,
    }


# --- replay ---


def run_mixed_scenario(engine):
    session = register_and_login(engine)
    book(engine, session["user_id"], now=T0, start=T0, end=T0 + 7200, slot_id="S2", extras=("wash",))
    ir(engine, "S1", "0", ts=T0 + 60)
    piezo(engine, "G1", ts=T0 + 60)
    ir(engine, "S2", "0", ts=T0 + 300)
    engine.execute(TimerTick(now=T0 + 600), now=T0 + 600)
    ir(engine, "S1", "1", ts=T0 + 3720)
    ir(engine, "S2", "1", ts=T0 + 3900)
    engine.execute(TimerTick(now=T0 + 4000), now=T0 + 4000)
    return session


def test_replay_reproduces_live_digest(tmp_path):
    engine = make_engine(tmp_path)
    run_mixed_scenario(engine)
    live_digest = engine.digest()
    live_seq = engine.state.applied_seq
    engine.close()

    recovered = Engine(tmp_path, FAST_CONFIG, fsync=False)
    assert recovered.state.applied_seq == live_seq
    assert recovered.digest() == live_digest
    recovered.close()


def test_replay_from_snapshot_plus_tail(tmp_path):
    config = ServiceConfig(
        tariff=FAST_CONFIG.tariff,
        password_hash_iterations=1,
        snapshot_every=3,
        extras=FAST_CONFIG.extras,
    )
    engine = Engine(tmp_path, config, fsync=False)
    engine.execute(AddLot(lot=LOT_DICT), now=T0 - 3600)
    run_mixed_scenario(engine)
    live_digest = engine.digest()
    engine.close()
    assert engine.log.snapshots(), "scenario should have crossed a snapshot boundary"

    recovered = Engine(tmp_path, config, fsync=False)
    assert recovered.digest() == live_digest
    recovered.close()


def test_torn_final_record_recovers_with_warning(tmp_path):
    engine = make_engine(tmp_path)
    run_mixed_scenario(engine)
    engine.close()
    path = engine.log.path
    content = path.read_text()
    path.write_text(content[:-30])  # tear the last record

    recovered = Engine(tmp_path, FAST_CONFIG, fsync=False)
    assert recovered.state.applied_seq >= 1
    recovered.close()


def test_no_double_booking_property(tmp_path):
    slots = [f"S{i}" for i in range(1, 11)]
    lot = dict(LOT_DICT, lot_id="L9", slots=slots)
    engine = make_engine(tmp_path, lot=False)
    engine.execute(AddLot(lot=lot), now=T0 - 10)
    session = register_and_login(engine)
    rng = random.Random(2024)
    accepted = []
    for i in range(400):
        start = T0 + rng.randrange(0, 48) * 1800
        end = start + rng.randrange(1, 17) * 1800
        slot = rng.choice(slots + [None, None])
        try:
            applied = engine.execute(
                CreateReservation(
                    user_id=session["user_id"],
                    lot_id="L9",
                    slot_id=slot,
                    window_start=start,
                    window_end=end,
                ),
                now=T0,
            )
            accepted.append(applied.result)
        except ServiceError:
            pass
    assert accepted, "some bookings must be accepted"
    by_slot = {}
    for res in accepted:
        by_slot.setdefault(res["slot_id"], []).append(res)
    for slot_id, group in by_slot.items():
        for a, b in itertools.combinations(group, 2):
            assert not (
                a["window_start"] < b["window_end"]
                and b["window_start"] < a["window_end"]
            ), f"overlap on {slot_id}: {a} vs {b}"
