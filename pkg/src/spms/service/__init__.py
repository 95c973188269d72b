"""Event-sourced parking service: accounts, bookings, billing, telemetry."""

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
from spms.service.engine import Applied, Engine
from spms.service.errors import ServiceError
from spms.service.eventlog import CorruptLog, EventLog
from spms.service.runtime import ServiceRuntime, wall_clock
from spms.service.state import ServiceState

__all__ = [
    "AddExtra",
    "AddLot",
    "Applied",
    "CancelReservation",
    "CloseSession",
    "Command",
    "CorruptLog",
    "CreateReservation",
    "Engine",
    "EventLog",
    "Login",
    "OperatorFault",
    "OperatorRestore",
    "RegisterUser",
    "ResetPasswordRedeem",
    "ResetPasswordRequest",
    "SensorEvent",
    "ServiceError",
    "ServiceRuntime",
    "ServiceState",
    "TimerTick",
    "wall_clock",
]
