"""Reservation lifecycle and booking-window validation.

Lifecycle: ACTIVE -> CHECKED_IN -> COMPLETED, with CANCELLED and EXPIRED as
alternative terminal exits. A reservation expires as a no-show once `now`
passes its hold_deadline without a check-in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from spms.domain.errors import (
    BookingInPast,
    BookingTooLong,
    EmptyWindow,
    IllegalTransition,
)

MAX_BOOKING_SECONDS = 24 * 3600  # inclusive cap: exactly 24h is accepted


class ReservationState(enum.Enum):
    ACTIVE = "ACTIVE"
    CHECKED_IN = "CHECKED_IN"
    COMPLETED = "COMPLETED"
    CANCELLED = "CANCELLED"
    EXPIRED = "EXPIRED"


TERMINAL_STATES = frozenset(
    {ReservationState.COMPLETED, ReservationState.CANCELLED, ReservationState.EXPIRED}
)


class ReservationEvent(enum.Enum):
    CHECK_IN = "CHECK_IN"
    CHECK_OUT = "CHECK_OUT"
    CANCEL = "CANCEL"
    TICK = "TICK"


@dataclass(frozen=True)
class Reservation:
    reservation_id: str
    user_id: str
    lot_id: str
    slot_id: str
    window_start: int  # unix seconds, UTC
    window_end: int
    state: ReservationState
    created_at: int
    hold_deadline: int  # no-show cutoff: window_start + hold window
    eta: int | None = None  # client-supplied estimated arrival, stored as-is
    extra_codes: tuple[str, ...] = ()

    def with_state(self, state: ReservationState) -> "Reservation":
        return replace(self, state=state)


def reservation_transition(
    res: Reservation, event: ReservationEvent, now: int
) -> Reservation:
    """Apply one lifecycle event; terminal states absorb nothing.

    TICK is the only conditional event: it expires an ACTIVE reservation
    strictly after hold_deadline and is a no-op otherwise.
    """
    state = res.state
    if state in TERMINAL_STATES:
        raise IllegalTransition(state, event)

    if state is ReservationState.ACTIVE:
        if event is ReservationEvent.CHECK_IN:
            if now > res.hold_deadline:
                raise IllegalTransition(state, event)
            return res.with_state(ReservationState.CHECKED_IN)
        if event is ReservationEvent.CANCEL:
            return res.with_state(ReservationState.CANCELLED)
        if event is ReservationEvent.TICK:
            if now > res.hold_deadline:
                return res.with_state(ReservationState.EXPIRED)
            return res
        raise IllegalTransition(state, event)  # CHECK_OUT on ACTIVE

    # CHECKED_IN: the car is parked; only checkout moves it on. Ticks are
    # no-ops -- a checked-in reservation no longer expires.
    if event is ReservationEvent.CHECK_OUT:
        return res.with_state(ReservationState.COMPLETED)
    if event is ReservationEvent.TICK:
        return res
    raise IllegalTransition(state, event)


def validate_booking_request(window_start: int, window_end: int, now: int) -> None:
    """Raise unless now <= window_start < window_end <= window_start + 24h."""
    if window_start >= window_end:
        raise EmptyWindow(f"window [{window_start}, {window_end}) is empty")
    if window_start < now:
        raise BookingInPast(f"window starts {now - window_start}s in the past")
    if window_end - window_start > MAX_BOOKING_SECONDS:
        raise BookingTooLong(
            f"window of {window_end - window_start}s exceeds the 24h cap"
        )
