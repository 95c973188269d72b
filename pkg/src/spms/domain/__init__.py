"""Pure parking domain: types, state machines, occupancy and fees. No I/O."""

from spms.domain.billing import (
    BillingRecord,
    ExtraService,
    ParkingSession,
    Tariff,
    add_extras,
    close_session,
    compute_fee,
)
from spms.domain.errors import (
    BookingError,
    BookingInPast,
    BookingTooLong,
    DomainError,
    EmptyWindow,
    IllegalTransition,
    NegativeDuration,
    SessionClosed,
)
from spms.domain.reservations import (
    MAX_BOOKING_SECONDS,
    TERMINAL_STATES,
    Reservation,
    ReservationEvent,
    ReservationState,
    reservation_transition,
    validate_booking_request,
)
from spms.domain.slots import (
    OccupancySummary,
    ParkingLot,
    Slot,
    SlotEvent,
    SlotState,
    occupancy_summary,
    slot_transition,
)

__all__ = [
    "BillingRecord",
    "BookingError",
    "BookingInPast",
    "BookingTooLong",
    "DomainError",
    "EmptyWindow",
    "ExtraService",
    "IllegalTransition",
    "MAX_BOOKING_SECONDS",
    "NegativeDuration",
    "OccupancySummary",
    "ParkingLot",
    "ParkingSession",
    "Reservation",
    "ReservationEvent",
    "ReservationState",
    "SessionClosed",
    "Slot",
    "SlotEvent",
    "SlotState",
    "TERMINAL_STATES",
    "Tariff",
    "add_extras",
    "close_session",
    "compute_fee",
    "occupancy_summary",
    "reservation_transition",
    "slot_transition",
    "validate_booking_request",
]
