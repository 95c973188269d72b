"""State-changing requests. Every mutation funnels through one of these.

Commands are recorded in the event log next to the events they produced;
secret fields are redacted in the logged copy (replay folds the events and
never re-runs a command).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

_REDACTED = "***"


@dataclass(frozen=True)
class Command:
    kind = "command"
    _secret_fields: tuple[str, ...] = field(default=(), init=False, repr=False)

    def to_log_dict(self) -> dict:
        raw = asdict(self)
        raw.pop("_secret_fields", None)
        for name in self._secret_fields:
            if raw.get(name):
                raw[name] = _REDACTED
        return raw


@dataclass(frozen=True)
class RegisterUser(Command):
    kind = "register_user"
    name: str = ""
    email: str = ""
    phone: str = ""
    password: str = ""
    _secret_fields = ("password",)


@dataclass(frozen=True)
class Login(Command):
    kind = "login"
    email: str = ""
    password: str = ""
    _secret_fields = ("password",)


@dataclass(frozen=True)
class ResetPasswordRequest(Command):
    kind = "reset_password_request"
    email: str = ""


@dataclass(frozen=True)
class ResetPasswordRedeem(Command):
    kind = "reset_password_redeem"
    code: str = ""
    new_password: str = ""
    _secret_fields = ("new_password",)


@dataclass(frozen=True)
class CreateReservation(Command):
    kind = "create_reservation"
    user_id: str = ""
    lot_id: str = ""
    slot_id: str | None = None  # None = lowest-labeled slot free for the window
    window_start: int = 0
    window_end: int = 0
    eta: int | None = None
    extra_codes: tuple[str, ...] = ()
    idempotency_key: str | None = None


@dataclass(frozen=True)
class CancelReservation(Command):
    kind = "cancel_reservation"
    user_id: str = ""
    reservation_id: str = ""


@dataclass(frozen=True)
class SensorEvent(Command):
    kind = "sensor_event"
    topic: str = ""
    payload: str = ""
    ts: int = 0  # device-side timestamp, unix seconds


@dataclass(frozen=True)
class TimerTick(Command):
    kind = "timer_tick"
    now: int = 0


@dataclass(frozen=True)
class OperatorFault(Command):
    kind = "operator_fault"
    lot_id: str = ""
    slot_id: str = ""


@dataclass(frozen=True)
class OperatorRestore(Command):
    kind = "operator_restore"
    lot_id: str = ""
    slot_id: str = ""


@dataclass(frozen=True)
class AddExtra(Command):
    kind = "add_extra"
    user_id: str | None = None
    session_id: str = ""
    code: str = ""


@dataclass(frozen=True)
class CloseSession(Command):
    kind = "close_session"
    session_id: str = ""
    ts: int = 0


@dataclass(frozen=True)
class AddLot(Command):
    kind = "add_lot"
    lot: dict = field(default_factory=dict)


def command_fields(cls) -> list[str]:
    return [f.name for f in fields(cls) if f.name != "_secret_fields"]
