"""Parking sessions, tariffs and fee computation.

Money is integer minor currency units throughout. Billing is ceiling-based:
started minutes are rounded up, then billed in started tariff quanta.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from spms.domain.errors import NegativeDuration, SessionClosed


@dataclass(frozen=True)
class Tariff:
    rate_minor_per_quantum: int
    quantum_minutes: int
    currency_code: str = "USD"

    def __post_init__(self):
        if self.quantum_minutes <= 0 or 60 % self.quantum_minutes != 0:
            raise ValueError(
                f"quantum_minutes must divide 60, got {self.quantum_minutes}"
            )
        if self.rate_minor_per_quantum < 0:
            raise ValueError("rate must be >= 0")
        if len(self.currency_code) != 3:
            raise ValueError(f"bad currency code: {self.currency_code!r}")


@dataclass(frozen=True)
class ExtraService:
    code: str
    name: str
    price_minor: int

    def __post_init__(self):
        if self.price_minor < 0:
            raise ValueError("extra price must be >= 0")


@dataclass(frozen=True)
class ParkingSession:
    session_id: str
    lot_id: str
    slot_id: str
    entry_ts: int
    reservation_id: str | None = None
    exit_ts: int | None = None
    extras: tuple[ExtraService, ...] = field(default_factory=tuple)

    @property
    def open(self) -> bool:
        return self.exit_ts is None


@dataclass(frozen=True)
class BillingRecord:
    bill_id: str
    session_id: str
    duration_minutes: int
    base_fee_minor: int
    extras_fee_minor: int
    total_minor: int
    issued_at: int


def compute_fee(entry_ts: int, exit_ts: int, tariff: Tariff) -> tuple[int, int]:
    """Return (duration_minutes, base_fee_minor) for one stay.

    duration_minutes = ceil(seconds / 60); the fee bills every started
    quantum, so a zero-duration stay costs nothing.
    """
    seconds = exit_ts - entry_ts
    if seconds < 0:
        raise NegativeDuration(f"exit {exit_ts} precedes entry {entry_ts}")
    duration_minutes = -(-seconds // 60)
    quanta = -(-duration_minutes // tariff.quantum_minutes)
    return duration_minutes, quanta * tariff.rate_minor_per_quantum


def add_extras(session: ParkingSession, extra: ExtraService) -> ParkingSession:
    """Append a priced line item to an open session."""
    if not session.open:
        raise SessionClosed(f"session {session.session_id} is closed")
    return replace(session, extras=session.extras + (extra,))


def close_session(
    session: ParkingSession,
    exit_ts: int,
    tariff: Tariff,
    bill_id: str,
    issued_at: int,
) -> tuple[ParkingSession, BillingRecord]:
    """Close an open session and issue its billing record."""
    if not session.open:
        raise SessionClosed(f"session {session.session_id} is closed")
    duration_minutes, base_fee = compute_fee(session.entry_ts, exit_ts, tariff)
    extras_fee = sum(extra.price_minor for extra in session.extras)
    closed = replace(session, exit_ts=exit_ts)
    bill = BillingRecord(
        bill_id=bill_id,
        session_id=session.session_id,
        duration_minutes=duration_minutes,
        base_fee_minor=base_fee,
        extras_fee_minor=extras_fee,
        total_minor=base_fee + extras_fee,
        issued_at=issued_at,
    )
    return closed, bill
