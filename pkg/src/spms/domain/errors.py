"""Domain-level errors raised by the pure parking model."""


class DomainError(Exception):
    """Base class for all parking domain errors."""


class IllegalTransition(DomainError):
    """An event is not accepted in the current state."""

    def __init__(self, state, event):
        self.state = state
        self.event = event
        super().__init__(f"illegal transition: {event} in state {state}")


class BookingError(DomainError):
    """A booking window failed validation."""


class BookingInPast(BookingError):
    pass


class BookingTooLong(BookingError):
    pass


class EmptyWindow(BookingError):
    pass


class NegativeDuration(DomainError):
    """Session exit precedes entry."""


class SessionClosed(DomainError):
    """A mutation was attempted on an already-closed session."""
