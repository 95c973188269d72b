"""Materialized service state: a pure fold over the recorded events.

Everything here is plain JSON-compatible data so snapshots and digests are
trivial. Mutation happens only in ``fold``; business decisions live in the
engine. Derived indexes (email lookup, open sessions) are rebuilt rather
than persisted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass
class ServiceState:
    users: dict = field(default_factory=dict)  # user_id -> user dict
    tokens: dict = field(default_factory=dict)  # token -> {user_id, expires_at}
    reset_codes: dict = field(default_factory=dict)  # code -> {user_id, expires_at, used}
    lots: dict = field(default_factory=dict)  # lot_id -> lot dict (incl. slot states)
    reservations: dict = field(default_factory=dict)
    sessions: dict = field(default_factory=dict)
    bills: dict = field(default_factory=dict)
    notifications: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    idempotency: dict = field(default_factory=dict)  # key -> reservation_id
    pending_gate_close: dict = field(default_factory=dict)  # "lot/gate" -> close_at
    counters: dict = field(
        default_factory=lambda: {
            "user": 0,
            "reservation": 0,
            "session": 0,
            "bill": 0,
            "notification": 0,
        }
    )
    applied_seq: int = 0

    # rebuilt, never persisted
    email_index: dict = field(default_factory=dict, compare=False)
    open_sessions: dict = field(default_factory=dict, compare=False)  # "lot/slot" -> sid
    last_anomaly: dict = field(default_factory=dict, compare=False)

    # -- id allocation (deterministic: counters are folded state) --

    def next_id(self, kind: str, prefix: str) -> str:
        return f"{prefix}{self.counters[kind] + 1:06d}"

    # -- persistence --

    _PERSISTED = (
        "users",
        "tokens",
        "reset_codes",
        "lots",
        "reservations",
        "sessions",
        "bills",
        "notifications",
        "anomalies",
        "idempotency",
        "pending_gate_close",
        "counters",
        "applied_seq",
    )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self._PERSISTED}

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceState":
        state = cls()
        for name in cls._PERSISTED:
            if name in raw:
                setattr(state, name, raw[name])
        state.rebuild_indexes()
        return state

    def rebuild_indexes(self) -> None:
        self.email_index = {u["email"]: uid for uid, u in self.users.items()}
        self.open_sessions = {
            f"{s['lot_id']}/{s['slot_id']}": sid
            for sid, s in self.sessions.items()
            if s["exit_ts"] is None
        }
        self.last_anomaly = {}

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    # -- lookups used by both fold and engine --

    def slot_state(self, lot_id: str, slot_id: str) -> str | None:
        lot = self.lots.get(lot_id)
        if lot is None:
            return None
        return lot["slots"].get(slot_id)

    def open_session_at(self, lot_id: str, slot_id: str) -> dict | None:
        sid = self.open_sessions.get(f"{lot_id}/{slot_id}")
        return self.sessions.get(sid) if sid else None

    # -- the fold --

    def fold(self, event: dict) -> None:
        kind = event["event"]
        handler = getattr(self, f"_on_{kind}", None)
        if handler is None:
            raise ValueError(f"unknown event kind {kind!r}")
        handler(event)

    def _on_user_created(self, e: dict) -> None:
        self.users[e["user_id"]] = {
            "user_id": e["user_id"],
            "name": e["name"],
            "email": e["email"],
            "phone": e["phone"],
            "password_hash": e["password_hash"],
            "created_at": e["created_at"],
        }
        self.email_index[e["email"]] = e["user_id"]
        self.counters["user"] += 1

    def _on_token_issued(self, e: dict) -> None:
        self.tokens[e["token"]] = {
            "user_id": e["user_id"],
            "expires_at": e["expires_at"],
        }

    def _on_reset_code_issued(self, e: dict) -> None:
        self.reset_codes[e["code"]] = {
            "user_id": e["user_id"],
            "expires_at": e["expires_at"],
            "used": False,
        }

    def _on_reset_code_redeemed(self, e: dict) -> None:
        self.reset_codes[e["code"]]["used"] = True

    def _on_password_changed(self, e: dict) -> None:
        self.users[e["user_id"]]["password_hash"] = e["password_hash"]

    def _on_lot_added(self, e: dict) -> None:
        lot = e["lot"]
        self.lots[lot["lot_id"]] = lot

    def _on_slot_changed(self, e: dict) -> None:
        self.lots[e["lot_id"]]["slots"][e["slot_id"]] = e["state"]
        self.last_anomaly.pop(f"{e['lot_id']}/{e['slot_id']}", None)

    def _on_reservation_created(self, e: dict) -> None:
        res = e["reservation"]
        self.reservations[res["reservation_id"]] = res
        self.counters["reservation"] += 1
        if e.get("idempotency_key"):
            self.idempotency[e["idempotency_key"]] = res["reservation_id"]

    def _set_reservation_state(self, reservation_id: str, state: str) -> None:
        self.reservations[reservation_id]["state"] = state

    def _on_reservation_cancelled(self, e: dict) -> None:
        self._set_reservation_state(e["reservation_id"], "CANCELLED")

    def _on_reservation_checked_in(self, e: dict) -> None:
        self._set_reservation_state(e["reservation_id"], "CHECKED_IN")

    def _on_reservation_completed(self, e: dict) -> None:
        self._set_reservation_state(e["reservation_id"], "COMPLETED")

    def _on_reservation_expired(self, e: dict) -> None:
        self._set_reservation_state(e["reservation_id"], "EXPIRED")

    def _on_session_opened(self, e: dict) -> None:
        session = e["session"]
        self.sessions[session["session_id"]] = session
        self.open_sessions[f"{session['lot_id']}/{session['slot_id']}"] = session[
            "session_id"
        ]
        self.counters["session"] += 1

    def _on_extra_added(self, e: dict) -> None:
        self.sessions[e["session_id"]]["extras"].append(
            {"code": e["code"], "name": e["name"], "price_minor": e["price_minor"]}
        )

    def _on_session_closed(self, e: dict) -> None:
        session = self.sessions[e["session_id"]]
        session["exit_ts"] = e["exit_ts"]
        self.open_sessions.pop(f"{session['lot_id']}/{session['slot_id']}", None)

    def _on_bill_issued(self, e: dict) -> None:
        bill = e["bill"]
        self.bills[bill["bill_id"]] = bill
        self.counters["bill"] += 1

    def _on_notification_created(self, e: dict) -> None:
        self.notifications.append(e["notification"])
        self.counters["notification"] += 1

    def _on_anomaly_recorded(self, e: dict) -> None:
        self.anomalies.append(e["anomaly"])
        key = f"{e['anomaly']['lot_id']}/{e['anomaly']['slot_id']}"
        self.last_anomaly[key] = e["anomaly"]["reading"]

    def _on_gate_open_commanded(self, e: dict) -> None:
        self.pending_gate_close[f"{e['lot_id']}/{e['gate_id']}"] = e["close_at"]

    def _on_gate_close_commanded(self, e: dict) -> None:
        self.pending_gate_close.pop(f"{e['lot_id']}/{e['gate_id']}", None)
