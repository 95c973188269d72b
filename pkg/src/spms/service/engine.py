"""Decision core: validates commands, emits events, folds them into state.

``execute`` is the single entry point for mutations and enforces the
write-ahead rule: decide -> append to the durable log -> fold -> hand the
events to the caller for side effects. Replay folds recorded events only,
so recovery reproduces exactly the live state at the same sequence number.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from spms.broker.codec import topic_matches
from spms.config import LotConfig, ServiceConfig, lot_from_dict
from spms.domain import (
    BookingInPast,
    BookingTooLong,
    EmptyWindow,
    Tariff,
    compute_fee,
    validate_booking_request,
)
from spms.service import auth
from spms.service.commands import (
    AddExtra,
    AddLot,
    CancelReservation,
    CloseSession,
    Command,
    CreateReservation,
    Login,
    OperatorFault,
    OperatorRestore,
    RegisterUser,
    ResetPasswordRedeem,
    ResetPasswordRequest,
    SensorEvent,
    TimerTick,
)
from spms.service.errors import ServiceError, invalid_credentials, unauthorized
from spms.service.eventlog import EventLog
from spms.service.geo import haversine_m
from spms.service.state import ServiceState

log = logging.getLogger(__name__)

IR_FILTER = "lot/+/slot/+/ir"
PIEZO_FILTER = "lot/+/gate/+/piezo"


@dataclass(frozen=True)
class Applied:
    """Outcome of one executed command."""

    seq: int  # 0 when the command was a no-op and nothing was appended
    events: tuple[dict, ...]
    result: object


def _overlaps(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    return a_start < b_end and b_start < a_end


class Engine:
    """Holds the state, the log, and every command/query implementation.

    Thread contract: one logical writer. ``execute`` and the query methods
    share a lock, so reads always observe a command boundary.
    """

    def __init__(
        self,
        data_dir: str | Path,
        config: ServiceConfig | None = None,
        fsync: bool = True,
    ):
        self.config = config or ServiceConfig()
        self.log = EventLog(data_dir, fsync=fsync)
        self.state = ServiceState()
        self._lock = threading.RLock()
        self._recover()

    def _recover(self) -> None:
        snapshot = self.log.latest_snapshot()
        after = 0
        if snapshot is not None:
            after, state_dict = snapshot
            self.state = ServiceState.from_dict(state_dict)
        last = after
        for record in self.log.records(after_seq=after):
            for event in record["payload"]["events"]:
                self.state.fold(event)
            self.state.applied_seq = record["seq"]
            last = record["seq"]
        self.log.open_for_append(max(last, after))
        if last:
            log.info("recovered to seq %d", self.state.applied_seq)

    def close(self) -> None:
        with self._lock:
            self.log.close()

    def digest(self) -> str:
        with self._lock:
            return self.state.digest()

    # ------------------------------------------------------------------
    # command execution
    # ------------------------------------------------------------------

    def execute(self, cmd: Command, now: int) -> Applied:
        """Decide, durably append, fold, return events for side effects."""
        with self._lock:
            events, result = self._decide(cmd, now)
            if not events:
                return Applied(seq=0, events=(), result=result)
            payload = {"command": cmd.to_log_dict(), "events": events}
            seq = self.log.append(ts=now, kind=cmd.kind, payload=payload)
            for event in events:
                self.state.fold(event)
            self.state.applied_seq = seq
            if self.config.snapshot_every and seq % self.config.snapshot_every == 0:
                self.log.write_snapshot(seq, self.state.to_dict())
            return Applied(seq=seq, events=tuple(events), result=result)

    def _decide(self, cmd: Command, now: int) -> tuple[list[dict], object]:
        if isinstance(cmd, RegisterUser):
            return self._decide_register(cmd, now)
        if isinstance(cmd, Login):
            return self._decide_login(cmd, now)
        if isinstance(cmd, ResetPasswordRequest):
            return self._decide_reset_request(cmd, now)
        if isinstance(cmd, ResetPasswordRedeem):
            return self._decide_reset_redeem(cmd, now)
        if isinstance(cmd, CreateReservation):
            return self._decide_create_reservation(cmd, now)
        if isinstance(cmd, CancelReservation):
            return self._decide_cancel(cmd, now)
        if isinstance(cmd, SensorEvent):
            return self._decide_sensor(cmd)
        if isinstance(cmd, TimerTick):
            return self._decide_tick(cmd.now or now)
        if isinstance(cmd, OperatorFault):
            return self._decide_fault(cmd, now)
        if isinstance(cmd, OperatorRestore):
            return self._decide_restore(cmd, now)
        if isinstance(cmd, AddExtra):
            return self._decide_add_extra(cmd)
        if isinstance(cmd, CloseSession):
            return self._decide_close_session(cmd.session_id, cmd.ts or now)
        if isinstance(cmd, AddLot):
            return self._decide_add_lot(cmd)
        raise ServiceError("unknown_command", f"unhandled command {cmd.kind}")

    # -- users & auth --

    def _decide_register(self, cmd: RegisterUser, now: int):
        email = cmd.email.strip().lower()
        if not auth.is_valid_email(email):
            raise ServiceError("invalid_email", f"{cmd.email!r} is not an email address")
        if len(cmd.password) < auth.MIN_PASSWORD_LENGTH:
            raise ServiceError(
                "weak_password",
                f"password must be at least {auth.MIN_PASSWORD_LENGTH} characters",
            )
        if email in self.state.email_index:
            raise ServiceError("duplicate_email", f"{email} is already registered")
        user_id = self.state.next_id("user", "u")
        event = {
            "event": "user_created",
            "user_id": user_id,
            "name": cmd.name,
            "email": email,
            "phone": cmd.phone,
            "password_hash": auth.hash_password(
                cmd.password, iterations=self.config.password_hash_iterations
            ),
            "created_at": now,
        }
        return [event], self._public_user(event)

    @staticmethod
    def _public_user(user: dict) -> dict:
        return {k: user[k] for k in ("user_id", "name", "email", "phone")}

    def _decide_login(self, cmd: Login, now: int):
        email = cmd.email.strip().lower()
        user_id = self.state.email_index.get(email)
        if user_id is None:
            auth.dummy_verify(cmd.password, self.config.password_hash_iterations)
            raise invalid_credentials()
        user = self.state.users[user_id]
        if not auth.verify_password(cmd.password, user["password_hash"]):
            raise invalid_credentials()
        token = auth.new_token()
        expires_at = now + self.config.token_ttl_s
        event = {
            "event": "token_issued",
            "token": token,
            "user_id": user_id,
            "expires_at": expires_at,
        }
        result = {"token": token, "user_id": user_id, "expires_at": expires_at}
        return [event], result

    def _decide_reset_request(self, cmd: ResetPasswordRequest, now: int):
        # Unknown emails produce no observable difference: same result,
        # no events, nothing appended.
        email = cmd.email.strip().lower()
        user_id = self.state.email_index.get(email)
        if user_id is None:
            return [], {"status": "accepted"}
        code = auth.new_reset_code()
        events = [
            {
                "event": "reset_code_issued",
                "code": code,
                "user_id": user_id,
                "expires_at": now + self.config.reset_code_ttl_s,
            },
            self._notification_event(
                user_id, f"Your password reset code is {code}", now
            ),
        ]
        return events, {"status": "accepted"}

    def _decide_reset_redeem(self, cmd: ResetPasswordRedeem, now: int):
        entry = self.state.reset_codes.get(cmd.code)
        if entry is None:
            raise ServiceError("code_invalid", "unknown reset code")
        if entry["used"]:
            raise ServiceError("code_already_used", "reset code was already redeemed")
        if now > entry["expires_at"]:
            raise ServiceError("code_expired", "reset code expired")
        if len(cmd.new_password) < auth.MIN_PASSWORD_LENGTH:
            raise ServiceError(
                "weak_password",
                f"password must be at least {auth.MIN_PASSWORD_LENGTH} characters",
            )
        events = [
            {"event": "reset_code_redeemed", "code": cmd.code, "user_id": entry["user_id"]},
            {
                "event": "password_changed",
                "user_id": entry["user_id"],
                "password_hash": auth.hash_password(
                    cmd.new_password, iterations=self.config.password_hash_iterations
                ),
            },
        ]
        return events, {"status": "password_changed"}

    def _notification_event(self, user_id: str, body: str, now: int) -> dict:
        return {
            "event": "notification_created",
            "notification": {
                "notif_id": self.state.next_id("notification", "n"),
                "user_id": user_id,
                "channel": "sms-sim",
                "body": body,
                "created_at": now,
            },
        }

    # -- reservations --

    def _blocking_reservations(self, lot_id: str, slot_id: str):
        for res in self.state.reservations.values():
            if (
                res["lot_id"] == lot_id
                and res["slot_id"] == slot_id
                and res["state"] in ("ACTIVE", "CHECKED_IN")
            ):
                yield res

    def _slot_bookable(
        self, lot: dict, slot_id: str, window_start: int, window_end: int, now: int
    ) -> bool:
        state = lot["slots"][slot_id]
        if state == "OUT_OF_SERVICE":
            return False
        for res in self._blocking_reservations(lot["lot_id"], slot_id):
            if _overlaps(window_start, window_end, res["window_start"], res["window_end"]):
                return False
        if window_start <= now and state != "FREE":
            return False  # immediate booking needs the slot claimable now
        return True

    def _decide_create_reservation(self, cmd: CreateReservation, now: int):
        if cmd.user_id not in self.state.users:
            raise unauthorized("unknown user")
        if cmd.idempotency_key:
            existing = self.state.idempotency.get(cmd.idempotency_key)
            if existing is not None:
                return [], dict(self.state.reservations[existing])
        try:
            validate_booking_request(cmd.window_start, cmd.window_end, now)
        except EmptyWindow as exc:
            raise ServiceError("empty_window", str(exc)) from None
        except BookingInPast as exc:
            raise ServiceError("booking_in_past", str(exc)) from None
        except BookingTooLong as exc:
            raise ServiceError("booking_too_long", str(exc)) from None
        lot = self.state.lots.get(cmd.lot_id)
        if lot is None:
            raise ServiceError("unknown_lot", f"no lot {cmd.lot_id!r}")

        if cmd.slot_id is not None:
            if cmd.slot_id not in lot["slots"]:
                raise ServiceError("unknown_slot", f"no slot {cmd.slot_id!r}")
            if not self._slot_bookable(
                lot, cmd.slot_id, cmd.window_start, cmd.window_end, now
            ):
                raise ServiceError(
                    "slot_unavailable", f"slot {cmd.slot_id} cannot host this window"
                )
            slot_id = cmd.slot_id
        else:
            slot_id = next(
                (
                    candidate
                    for candidate in sorted(lot["slots"])
                    if self._slot_bookable(
                        lot, candidate, cmd.window_start, cmd.window_end, now
                    )
                ),
                None,
            )
            if slot_id is None:
                raise ServiceError("no_slot_free", "no slot is free for this window")

        extras = [self._resolve_extra(lot, code) for code in cmd.extra_codes]
        reservation_id = self.state.next_id("reservation", "r")
        reservation = {
            "reservation_id": reservation_id,
            "user_id": cmd.user_id,
            "lot_id": cmd.lot_id,
            "slot_id": slot_id,
            "window_start": cmd.window_start,
            "window_end": cmd.window_end,
            "state": "ACTIVE",
            "created_at": now,
            "hold_deadline": cmd.window_start + self.config.hold_window_s,
            "eta": cmd.eta,
            "extra_codes": list(cmd.extra_codes),
        }
        events = [
            {
                "event": "reservation_created",
                "reservation": reservation,
                "idempotency_key": cmd.idempotency_key,
            }
        ]
        if cmd.window_start <= now:
            events.append(self._slot_event(cmd.lot_id, slot_id, "RESERVED", "booking"))
        events.append(
            self._notification_event(
                cmd.user_id,
                f"Booking {reservation_id} confirmed: {lot['name']} slot {slot_id}, "
                f"{cmd.window_start} to {cmd.window_end}",
                now,
            )
        )
        del extras  # validated above; attached to the session at check-in
        return events, dict(reservation)

    def _resolve_extra(self, lot: dict, code: str) -> dict:
        for extra in lot.get("extras", []):
            if extra["code"] == code:
                return dict(extra)
        extra = self.config.extra_catalog.get(code)
        if extra is not None:
            return {"code": extra.code, "name": extra.name, "price_minor": extra.price_minor}
        raise ServiceError("unknown_extra", f"no extra service {code!r}")

    def _decide_cancel(self, cmd: CancelReservation, now: int):
        res = self.state.reservations.get(cmd.reservation_id)
        if res is None:
            raise ServiceError("unknown_reservation", f"no reservation {cmd.reservation_id!r}")
        if res["user_id"] != cmd.user_id:
            raise ServiceError("not_owner", "reservation belongs to another user")
        if res["state"] != "ACTIVE":
            raise ServiceError(
                "illegal_transition", f"cannot cancel a {res['state']} reservation"
            )
        events = [
            {"event": "reservation_cancelled", "reservation_id": res["reservation_id"], "at": now}
        ]
        if (
            self.state.slot_state(res["lot_id"], res["slot_id"]) == "RESERVED"
            and res["window_start"] <= now
        ):
            events.append(
                self._slot_event(res["lot_id"], res["slot_id"], "FREE", "cancellation")
            )
        updated = dict(res)
        updated["state"] = "CANCELLED"
        return events, updated

    # -- telemetry reconciliation --

    @staticmethod
    def _slot_event(lot_id: str, slot_id: str, state: str, cause: str) -> dict:
        return {
            "event": "slot_changed",
            "lot_id": lot_id,
            "slot_id": slot_id,
            "state": state,
            "cause": cause,
        }

    def _decide_sensor(self, cmd: SensorEvent):
        if topic_matches(IR_FILTER, cmd.topic):
            return self._decide_ir(cmd)
        if topic_matches(PIEZO_FILTER, cmd.topic):
            return self._decide_piezo(cmd)
        log.warning("ignoring unknown topic %r", cmd.topic)
        return [], None

    def _decide_ir(self, cmd: SensorEvent):
        _, lot_id, _, slot_id, _ = cmd.topic.split("/")
        if cmd.payload not in ("0", "1"):
            log.warning("ignoring malformed ir payload %r on %s", cmd.payload, cmd.topic)
            return [], None
        lot = self.state.lots.get(lot_id)
        if lot is None or slot_id not in lot["slots"]:
            log.warning("ignoring reading for unknown slot %s/%s", lot_id, slot_id)
            return [], None
        slot_state = lot["slots"][slot_id]
        ts = cmd.ts

        if cmd.payload == "0":
            if slot_state == "FREE":
                return self._open_session_events(lot, slot_id, ts, reservation=None), None
            if slot_state == "RESERVED":
                res = self._due_reservation(lot_id, slot_id, ts)
                if res is not None and ts <= res["hold_deadline"]:
                    return self._check_in_events(lot, res, ts), None
                events = []
                if res is not None:
                    # Arrived past the hold deadline: the booking is a
                    # no-show and the car on the pad becomes a walk-in.
                    events.append(
                        {"event": "reservation_expired", "reservation_id": res["reservation_id"], "at": ts}
                    )
                events += self._open_session_events(lot, slot_id, ts, reservation=None)
                return events, None
            if slot_state == "OCCUPIED":
                return [], None  # duplicate reading, idempotent
            return self._anomaly_events(lot_id, slot_id, "0", slot_state, ts), None

        # payload "1": slot reads clear
        if slot_state == "OCCUPIED":
            return self._close_session_events(lot, slot_id, ts), None
        # FREE and RESERVED slots read "1" on every heartbeat; OUT_OF_SERVICE
        # sensors chatter. All are no-ops by design.
        return [], None

    def _due_reservation(self, lot_id: str, slot_id: str, ts: int) -> dict | None:
        candidates = [
            res
            for res in self._blocking_reservations(lot_id, slot_id)
            if res["state"] == "ACTIVE" and res["window_start"] <= ts
        ]
        candidates.sort(key=lambda r: r["window_start"])
        return candidates[0] if candidates else None

    def _open_session_events(
        self, lot: dict, slot_id: str, ts: int, reservation: dict | None
    ) -> list[dict]:
        extras = []
        if reservation is not None:
            extras = [
                self._resolve_extra(lot, code)
                for code in reservation.get("extra_codes", [])
            ]
        session = {
            "session_id": self.state.next_id("session", "p"),
            "lot_id": lot["lot_id"],
            "slot_id": slot_id,
            "reservation_id": reservation["reservation_id"] if reservation else None,
            "entry_ts": ts,
            "exit_ts": None,
            "extras": extras,
        }
        return [
            {"event": "session_opened", "session": session},
            self._slot_event(lot["lot_id"], slot_id, "OCCUPIED", "sensor"),
        ]

    def _check_in_events(self, lot: dict, res: dict, ts: int) -> list[dict]:
        events = [
            {"event": "reservation_checked_in", "reservation_id": res["reservation_id"], "at": ts}
        ]
        events += self._open_session_events(lot, res["slot_id"], ts, reservation=res)
        return events

    def _close_session_events(self, lot: dict, slot_id: str, ts: int) -> list[dict]:
        session = self.state.open_session_at(lot["lot_id"], slot_id)
        if session is None:
            # Occupied without a session should not happen; repair to FREE.
            log.warning("occupied slot %s/%s had no open session", lot["lot_id"], slot_id)
            return [self._slot_event(lot["lot_id"], slot_id, "FREE", "sensor")]
        tariff = Tariff(
            rate_minor_per_quantum=lot["tariff"]["rate_minor_per_quantum"],
            quantum_minutes=lot["tariff"]["quantum_minutes"],
            currency_code=lot["tariff"].get("currency_code", "USD"),
        )
        duration_minutes, base_fee = compute_fee(session["entry_ts"], ts, tariff)
        extras_fee = sum(e["price_minor"] for e in session["extras"])
        bill = {
            "bill_id": self.state.next_id("bill", "b"),
            "session_id": session["session_id"],
            "duration_minutes": duration_minutes,
            "base_fee_minor": base_fee,
            "extras_fee_minor": extras_fee,
            "total_minor": base_fee + extras_fee,
            "issued_at": ts,
            "currency": tariff.currency_code,
        }
        events = [
            {"event": "session_closed", "session_id": session["session_id"], "exit_ts": ts},
            {"event": "bill_issued", "bill": bill},
        ]
        if session["reservation_id"]:
            events.append(
                {
                    "event": "reservation_completed",
                    "reservation_id": session["reservation_id"],
                    "at": ts,
                }
            )
        next_state = "FREE"
        successor = self._due_reservation(lot["lot_id"], slot_id, ts)
        if successor is not None and ts <= successor["hold_deadline"]:
            next_state = "RESERVED"
        events.append(self._slot_event(lot["lot_id"], slot_id, next_state, "sensor"))
        return events

    def _anomaly_events(
        self, lot_id: str, slot_id: str, reading: str, slot_state: str, ts: int
    ) -> list[dict]:
        # Consecutive identical ghosts collapse so heartbeats cannot flood
        # the log while a slot is out of service.
        if self.state.last_anomaly.get(f"{lot_id}/{slot_id}") == reading:
            return []
        anomaly = {
            "lot_id": lot_id,
            "slot_id": slot_id,
            "reading": reading,
            "slot_state": slot_state,
            "ts": ts,
        }
        return [{"event": "anomaly_recorded", "anomaly": anomaly}]

    def _decide_piezo(self, cmd: SensorEvent):
        _, lot_id, _, gate_id, _ = cmd.topic.split("/")
        lot = self.state.lots.get(lot_id)
        if lot is None or gate_id not in lot["gates"]:
            log.warning("ignoring piezo for unknown gate %s/%s", lot_id, gate_id)
            return [], None
        if cmd.payload != "1":
            log.warning("ignoring malformed piezo payload %r", cmd.payload)
            return [], None
        close_at = cmd.ts + max(self.config.gate_open_ms // 1000, 1)
        event = {
            "event": "gate_open_commanded",
            "lot_id": lot_id,
            "gate_id": gate_id,
            "at": cmd.ts,
            "close_at": close_at,
        }
        return [event], None

    # -- timers --

    def _decide_tick(self, now: int):
        events: list[dict] = []
        expired: list[dict] = []
        for res in sorted(
            self.state.reservations.values(), key=lambda r: r["reservation_id"]
        ):
            if res["state"] != "ACTIVE":
                continue
            if now > res["hold_deadline"]:
                events.append(
                    {"event": "reservation_expired", "reservation_id": res["reservation_id"], "at": now}
                )
                expired.append(res)
                if self.state.slot_state(res["lot_id"], res["slot_id"]) == "RESERVED":
                    events.append(
                        self._slot_event(res["lot_id"], res["slot_id"], "FREE", "expiry")
                    )
            elif (
                res["window_start"] <= now
                and self.state.slot_state(res["lot_id"], res["slot_id"]) == "FREE"
            ):
                events.append(
                    self._slot_event(res["lot_id"], res["slot_id"], "RESERVED", "activation")
                )
        for key, close_at in sorted(self.state.pending_gate_close.items()):
            if close_at <= now:
                lot_id, gate_id = key.split("/")
                events.append(
                    {
                        "event": "gate_close_commanded",
                        "lot_id": lot_id,
                        "gate_id": gate_id,
                        "at": now,
                    }
                )
        return events, [dict(r, state="EXPIRED") for r in expired]

    # -- operator commands --

    def _require_slot(self, lot_id: str, slot_id: str) -> dict:
        lot = self.state.lots.get(lot_id)
        if lot is None:
            raise ServiceError("unknown_lot", f"no lot {lot_id!r}")
        if slot_id not in lot["slots"]:
            raise ServiceError("unknown_slot", f"no slot {slot_id!r} in {lot_id}")
        return lot

    def _decide_fault(self, cmd: OperatorFault, now: int):
        lot = self._require_slot(cmd.lot_id, cmd.slot_id)
        state = lot["slots"][cmd.slot_id]
        if state == "OUT_OF_SERVICE":
            raise ServiceError("illegal_transition", "slot is already out of service")
        events = []
        if state == "OCCUPIED":
            # Bill the interrupted stay up to the fault.
            events += self._close_session_events(lot, cmd.slot_id, now)
            # _close_session_events ends with a slot_changed; replace it.
            events = [e for e in events if e["event"] != "slot_changed"]
        events.append(self._slot_event(cmd.lot_id, cmd.slot_id, "OUT_OF_SERVICE", "fault"))
        return events, None

    def _decide_restore(self, cmd: OperatorRestore, now: int):
        lot = self._require_slot(cmd.lot_id, cmd.slot_id)
        if lot["slots"][cmd.slot_id] != "OUT_OF_SERVICE":
            raise ServiceError("illegal_transition", "slot is not out of service")
        events = [self._slot_event(cmd.lot_id, cmd.slot_id, "FREE", "restore")]
        successor = self._due_reservation(cmd.lot_id, cmd.slot_id, now)
        if successor is not None and now <= successor["hold_deadline"]:
            events.append(
                self._slot_event(cmd.lot_id, cmd.slot_id, "RESERVED", "activation")
            )
        return events, None

    # -- sessions --

    def _decide_add_extra(self, cmd: AddExtra):
        session = self.state.sessions.get(cmd.session_id)
        if session is None:
            raise ServiceError("unknown_session", f"no session {cmd.session_id!r}")
        if session["exit_ts"] is not None:
            raise ServiceError("session_closed", "session is already closed")
        if session["reservation_id"] and cmd.user_id:
            owner = self.state.reservations[session["reservation_id"]]["user_id"]
            if owner != cmd.user_id:
                raise ServiceError("not_owner", "session belongs to another user")
        lot = self.state.lots[session["lot_id"]]
        extra = self._resolve_extra(lot, cmd.code)
        event = {
            "event": "extra_added",
            "session_id": cmd.session_id,
            "code": extra["code"],
            "name": extra["name"],
            "price_minor": extra["price_minor"],
        }
        updated = dict(session)
        updated["extras"] = session["extras"] + [extra]
        return [event], updated

    def _decide_close_session(self, session_id: str, ts: int):
        session = self.state.sessions.get(session_id)
        if session is None:
            raise ServiceError("unknown_session", f"no session {session_id!r}")
        if session["exit_ts"] is not None:
            raise ServiceError("session_closed", "session is already closed")
        lot = self.state.lots[session["lot_id"]]
        return self._close_session_events(lot, session["slot_id"], ts), None

    # -- seeding --

    def _decide_add_lot(self, cmd: AddLot):
        lot_config: LotConfig = lot_from_dict(cmd.lot)
        if lot_config.lot_id in self.state.lots:
            raise ServiceError("duplicate_lot", f"lot {lot_config.lot_id} already exists")
        lot = {
            "lot_id": lot_config.lot_id,
            "name": lot_config.name,
            "lat": lot_config.lat,
            "lon": lot_config.lon,
            "gates": list(lot_config.gates),
            "tariff": {
                "rate_minor_per_quantum": lot_config.tariff.rate_minor_per_quantum,
                "quantum_minutes": lot_config.tariff.quantum_minutes,
                "currency_code": lot_config.tariff.currency_code,
            },
            "extras": [
                {"code": e.code, "name": e.name, "price_minor": e.price_minor}
                for e in lot_config.extras
            ],
            "slots": {label: "FREE" for label in lot_config.slot_labels},
        }
        return [{"event": "lot_added", "lot": lot}], dict(lot)

    # ------------------------------------------------------------------
    # queries (snapshot reads at a command boundary)
    # ------------------------------------------------------------------

    def authenticate_token(self, token: str | None, now: int) -> str:
        with self._lock:
            entry = self.state.tokens.get(token or "")
            if entry is None or now >= entry["expires_at"]:
                raise unauthorized()
            return entry["user_id"]

    def occupancy_of(self, lot: dict) -> dict:
        counts = {"free": 0, "reserved": 0, "occupied": 0, "out_of_service": 0}
        for state in lot["slots"].values():
            counts[state.lower()] += 1
        counts["total"] = len(lot["slots"])
        return counts

    def _extras_catalog(self, lot: dict) -> list[dict]:
        merged: dict[str, dict] = {
            e["code"]: dict(e) for e in lot.get("extras", [])
        }
        for code, extra in self.config.extra_catalog.items():
            merged.setdefault(
                code,
                {"code": extra.code, "name": extra.name, "price_minor": extra.price_minor},
            )
        return [merged[code] for code in sorted(merged)]

    def search_lots(self, lat: float, lon: float, radius_m: float) -> list[dict]:
        if radius_m <= 0:
            raise ServiceError("invalid_radius", "radius_m must be positive")
        with self._lock:
            found = []
            for lot in self.state.lots.values():
                distance = haversine_m(lat, lon, lot["lat"], lot["lon"])
                if distance <= radius_m:
                    found.append(
                        {
                            "lot_id": lot["lot_id"],
                            "name": lot["name"],
                            "lat": lot["lat"],
                            "lon": lot["lon"],
                            "distance_m": round(distance, 1),
                            "occupancy": self.occupancy_of(lot),
                            "extras": self._extras_catalog(lot),
                        }
                    )
            found.sort(key=lambda entry: (entry["distance_m"], entry["lot_id"]))
            return found

    def get_lot(self, lot_id: str) -> dict:
        with self._lock:
            lot = self.state.lots.get(lot_id)
            if lot is None:
                raise ServiceError("unknown_lot", f"no lot {lot_id!r}")
            return {
                "lot_id": lot["lot_id"],
                "name": lot["name"],
                "lat": lot["lat"],
                "lon": lot["lon"],
                "occupancy": self.occupancy_of(lot),
                "extras": self._extras_catalog(lot),
                "tariff": dict(lot["tariff"]),
            }

    def list_slots(self, lot_id: str, now: int) -> list[dict]:
        with self._lock:
            lot = self.state.lots.get(lot_id)
            if lot is None:
                raise ServiceError("unknown_lot", f"no lot {lot_id!r}")
            upcoming: dict[str, tuple[int, int]] = {}
            for res in self.state.reservations.values():
                if (
                    res["lot_id"] == lot_id
                    and res["state"] in ("ACTIVE", "CHECKED_IN")
                    and res["window_end"] > now
                ):
                    window = (res["window_start"], res["window_end"])
                    if res["slot_id"] not in upcoming or window < upcoming[res["slot_id"]]:
                        upcoming[res["slot_id"]] = window
            return [
                {
                    "slot_id": slot_id,
                    "label": slot_id,
                    "state": state,
                    "next_reservation_window": (
                        {
                            "window_start": upcoming[slot_id][0],
                            "window_end": upcoming[slot_id][1],
                        }
                        if slot_id in upcoming
                        else None
                    ),
                }
                for slot_id, state in sorted(lot["slots"].items())
            ]

    def billing_refs(self, reservation_id: str) -> dict:
        """Session and bill linked to a reservation, once they exist."""
        with self._lock:
            session_id = bill_id = None
            for sid, session in self.state.sessions.items():
                if session["reservation_id"] == reservation_id:
                    session_id = sid
                    break
            if session_id is not None:
                for bid, bill in self.state.bills.items():
                    if bill["session_id"] == session_id:
                        bill_id = bid
                        break
            return {"session_id": session_id, "bill_id": bill_id}

    def get_reservation(self, reservation_id: str, user_id: str) -> dict:
        with self._lock:
            res = self.state.reservations.get(reservation_id)
            if res is None:
                raise ServiceError("unknown_reservation", f"no reservation {reservation_id!r}")
            if res["user_id"] != user_id:
                raise ServiceError("not_owner", "reservation belongs to another user")
            return dict(res)

    def list_user_reservations(self, user_id: str) -> list[dict]:
        with self._lock:
            return sorted(
                (
                    dict(r)
                    for r in self.state.reservations.values()
                    if r["user_id"] == user_id
                ),
                key=lambda r: r["reservation_id"],
            )

    def get_bill(self, bill_id: str) -> dict:
        with self._lock:
            bill = self.state.bills.get(bill_id)
            if bill is None:
                raise ServiceError("unknown_bill", f"no bill {bill_id!r}")
            return dict(bill)

    def bill_for_session(self, session_id: str) -> dict | None:
        with self._lock:
            for bill in self.state.bills.values():
                if bill["session_id"] == session_id:
                    return dict(bill)
            return None

    def get_session(self, session_id: str) -> dict:
        with self._lock:
            session = self.state.sessions.get(session_id)
            if session is None:
                raise ServiceError("unknown_session", f"no session {session_id!r}")
            return dict(session)
