"""Desk-scale smart parking stack.

Subpackages:
    domain   -- pure parking domain types, state machines, fee computation
    broker   -- minimal MQTT-3.1.1-subset broker, codec and client
    sim      -- deterministic virtual-clock simulator of the lot hardware
    service  -- event-sourced parking service (users, bookings, billing)
    api      -- HTTP/JSON gateway in front of the service
"""

__version__ = "0.1.0"
