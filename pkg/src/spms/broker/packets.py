"""Control packet types for the MQTT-3.1.1 subset.

Eleven packet kinds are recognized (type nibbles 1,2,3,4,8,9,10,11,12,13,14):
QoS 0/1 only, clean sessions, no retained messages, no wills, no auth.
"""

from __future__ import annotations

from dataclasses import dataclass


class MalformedPacket(ValueError):
    """Bytes that can never become a valid packet of the subset."""


class InvariantViolation(ValueError):
    """A packet value violates its own type invariants (serialize-time)."""


class OutOfRange(ValueError):
    """Remaining-length value outside 0..268435455."""


@dataclass(frozen=True)
class Connect:
    client_id: str
    keep_alive_s: int = 0


@dataclass(frozen=True)
class ConnAck:
    return_code: int = 0


@dataclass(frozen=True)
class Publish:
    topic: str
    payload: bytes
    qos: int = 0
    packet_id: int | None = None


@dataclass(frozen=True)
class PubAck:
    packet_id: int


@dataclass(frozen=True)
class Subscribe:
    packet_id: int
    filters: tuple[tuple[str, int], ...]  # (topic_filter, requested_qos)


@dataclass(frozen=True)
class SubAck:
    packet_id: int
    granted: tuple[int, ...]  # granted qos per filter, 0x80 = failure


@dataclass(frozen=True)
class Unsubscribe:
    packet_id: int
    filters: tuple[str, ...]


@dataclass(frozen=True)
class UnsubAck:
    packet_id: int


@dataclass(frozen=True)
class PingReq:
    pass


@dataclass(frozen=True)
class PingResp:
    pass


@dataclass(frozen=True)
class Disconnect:
    pass


Packet = (
    Connect
    | ConnAck
    | Publish
    | PubAck
    | Subscribe
    | SubAck
    | Unsubscribe
    | UnsubAck
    | PingReq
    | PingResp
    | Disconnect
)
