"""Pure-Python codec kernels: framing, parse/serialize, topic matching.

This is the fallback for the compiled extension in ``_codec_cy``; both expose
the same five functions and must stay bit-exact with each other (enforced by
the parity tests). Parsing never reads past the declared remaining length,
never raises anything but MalformedPacket on garbage, and returns None when
more bytes are needed.
"""

from __future__ import annotations

import struct

from spms.broker.packets import (
    ConnAck,
    Connect,
    Disconnect,
    InvariantViolation,
    MalformedPacket,
    OutOfRange,
    Packet,
    PingReq,
    PingResp,
    PubAck,
    Publish,
    SubAck,
    Subscribe,
    UnsubAck,
    Unsubscribe,
)

BACKEND = "python"

MAX_REMAINING_LENGTH = 268_435_455
MAX_PACKET_BODY = 256 * 1024  # decoder guard, far above any telemetry payload

_TYPE_CONNECT = 1
_TYPE_CONNACK = 2
_TYPE_PUBLISH = 3
_TYPE_PUBACK = 4
_TYPE_SUBSCRIBE = 8
_TYPE_SUBACK = 9
_TYPE_UNSUBSCRIBE = 10
_TYPE_UNSUBACK = 11
_TYPE_PINGREQ = 12
_TYPE_PINGRESP = 13
_TYPE_DISCONNECT = 14

_U16 = struct.Struct(">H")


def encode_remaining_length(n: int) -> bytes:
    """Base-128 little-endian groups, continuation bit on all but the last."""
    if n < 0 or n > MAX_REMAINING_LENGTH:
        raise OutOfRange(f"remaining length {n} outside 0..{MAX_REMAINING_LENGTH}")
    out = bytearray()
    while True:
        n, digit = divmod(n, 128)
        if n:
            out.append(digit | 0x80)
        else:
            out.append(digit)
            return bytes(out)


def decode_remaining_length(data: bytes, offset: int = 0) -> tuple[int, int] | None:
    """Return (value, bytes_consumed) or None if the stream ends mid-value."""
    value = 0
    shift = 0
    for i in range(4):
        if offset + i >= len(data):
            return None
        byte = data[offset + i]
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, i + 1
        if i == 3:
            raise MalformedPacket("remaining length continuation bit on 4th byte")
        shift += 7
    raise AssertionError("unreachable")


def _read_string(body: bytes, pos: int) -> tuple[str, int]:
    if pos + 2 > len(body):
        raise MalformedPacket("truncated string length")
    (length,) = _U16.unpack_from(body, pos)
    pos += 2
    if pos + length > len(body):
        raise MalformedPacket("string overruns packet body")
    raw = body[pos : pos + length]
    try:
        return raw.decode("utf-8"), pos + length
    except UnicodeDecodeError:
        raise MalformedPacket("invalid UTF-8 in string") from None


def _read_packet_id(body: bytes, pos: int) -> tuple[int, int]:
    if pos + 2 > len(body):
        raise MalformedPacket("truncated packet id")
    (packet_id,) = _U16.unpack_from(body, pos)
    if packet_id == 0:
        raise MalformedPacket("packet id 0")
    return packet_id, pos + 2


def parse_packet(data: bytes, offset: int = 0) -> tuple[Packet, int] | None:
    """Parse one packet starting at ``offset``.

    Returns (packet, bytes_consumed) on success, None when the buffer holds
    only a packet prefix, and raises MalformedPacket otherwise.
    """
    if offset >= len(data):
        return None
    first = data[offset]
    ptype = first >> 4
    flags = first & 0x0F

    decoded = decode_remaining_length(data, offset + 1)
    if decoded is None:
        return None
    remaining, rl_len = decoded
    if remaining > MAX_PACKET_BODY:
        raise MalformedPacket(f"packet body {remaining} exceeds {MAX_PACKET_BODY}")
    body_start = offset + 1 + rl_len
    if body_start + remaining > len(data):
        return None
    body = data[body_start : body_start + remaining]
    consumed = 1 + rl_len + remaining

    if ptype == _TYPE_PUBLISH:
        packet = _parse_publish(flags, body)
    else:
        expected_flags = 0x02 if ptype in (_TYPE_SUBSCRIBE, _TYPE_UNSUBSCRIBE) else 0x00
        if flags != expected_flags:
            raise MalformedPacket(f"reserved flag violation on type {ptype}")
        if ptype == _TYPE_CONNECT:
            packet = _parse_connect(body)
        elif ptype == _TYPE_CONNACK:
            packet = _parse_connack(body)
        elif ptype == _TYPE_PUBACK:
            packet = _parse_only_packet_id(body, PubAck)
        elif ptype == _TYPE_SUBSCRIBE:
            packet = _parse_subscribe(body)
        elif ptype == _TYPE_SUBACK:
            packet = _parse_suback(body)
        elif ptype == _TYPE_UNSUBSCRIBE:
            packet = _parse_unsubscribe(body)
        elif ptype == _TYPE_UNSUBACK:
            packet = _parse_only_packet_id(body, UnsubAck)
        elif ptype == _TYPE_PINGREQ:
            packet = _parse_empty(body, PingReq)
        elif ptype == _TYPE_PINGRESP:
            packet = _parse_empty(body, PingResp)
        elif ptype == _TYPE_DISCONNECT:
            packet = _parse_empty(body, Disconnect)
        else:
            raise MalformedPacket(f"unknown packet type {ptype}")
    return packet, consumed


def _parse_connect(body: bytes) -> Connect:
    proto, pos = _read_string(body, 0)
    if proto != "MQTT":
        raise MalformedPacket(f"unexpected protocol name {proto!r}")
    if pos + 4 > len(body):
        raise MalformedPacket("truncated connect header")
    level = body[pos]
    connect_flags = body[pos + 1]
    if level != 4:
        raise MalformedPacket(f"unsupported protocol level {level}")
    if connect_flags != 0x02:
        # Subset: clean session always, no will/username/password.
        raise MalformedPacket(f"unsupported connect flags 0x{connect_flags:02x}")
    (keep_alive,) = _U16.unpack_from(body, pos + 2)
    client_id, pos = _read_string(body, pos + 4)
    if not client_id:
        raise MalformedPacket("empty client id")
    if pos != len(body):
        raise MalformedPacket("trailing bytes in connect")
    return Connect(client_id=client_id, keep_alive_s=keep_alive)


def _parse_connack(body: bytes) -> ConnAck:
    if len(body) != 2:
        raise MalformedPacket("connack body must be 2 bytes")
    if body[0] != 0:
        raise MalformedPacket("session present not supported")
    if body[1] > 5:
        raise MalformedPacket(f"unknown connack return code {body[1]}")
    return ConnAck(return_code=body[1])


def _parse_publish(flags: int, body: bytes) -> Publish:
    qos = (flags >> 1) & 0x03
    if qos > 1:
        raise MalformedPacket(f"qos {qos} not in subset")
    if flags & 0x01:
        raise MalformedPacket("retained messages not in subset")
    # DUP bit (0x08) is tolerated on redeliveries and not modeled.
    topic, pos = _read_string(body, 0)
    if not topic:
        raise MalformedPacket("empty topic")
    if "+" in topic or "#" in topic:
        raise MalformedPacket("wildcard in publish topic")
    packet_id = None
    if qos == 1:
        packet_id, pos = _read_packet_id(body, pos)
    return Publish(topic=topic, payload=body[pos:], qos=qos, packet_id=packet_id)


def _parse_only_packet_id(body, cls):
    if len(body) != 2:
        raise MalformedPacket(f"{cls.__name__.lower()} body must be 2 bytes")
    packet_id, _ = _read_packet_id(body, 0)
    return cls(packet_id=packet_id)


def _parse_subscribe(body: bytes) -> Subscribe:
    packet_id, pos = _read_packet_id(body, 0)
    filters = []
    while pos < len(body):
        topic_filter, pos = _read_string(body, pos)
        if not topic_filter:
            raise MalformedPacket("empty topic filter")
        if pos >= len(body):
            raise MalformedPacket("subscribe filter missing qos byte")
        qos = body[pos]
        pos += 1
        if qos > 2:
            raise MalformedPacket(f"requested qos {qos} invalid")
        filters.append((topic_filter, qos))
    if not filters:
        raise MalformedPacket("subscribe with no filters")
    return Subscribe(packet_id=packet_id, filters=tuple(filters))


def _parse_suback(body: bytes) -> SubAck:
    packet_id, pos = _read_packet_id(body, 0)
    granted = tuple(body[pos:])
    if not granted:
        raise MalformedPacket("suback with no return codes")
    for code in granted:
        if code not in (0, 1, 2, 0x80):
            raise MalformedPacket(f"suback return code 0x{code:02x} invalid")
    return SubAck(packet_id=packet_id, granted=granted)


def _parse_unsubscribe(body: bytes) -> Unsubscribe:
    packet_id, pos = _read_packet_id(body, 0)
    filters = []
    while pos < len(body):
        topic_filter, pos = _read_string(body, pos)
        if not topic_filter:
            raise MalformedPacket("empty topic filter")
        filters.append(topic_filter)
    if not filters:
        raise MalformedPacket("unsubscribe with no filters")
    return Unsubscribe(packet_id=packet_id, filters=tuple(filters))


def _parse_empty(body, cls):
    if body:
        raise MalformedPacket(f"{cls.__name__.lower()} carries no body")
    return cls()


def _write_string(out: bytearray, value: str) -> None:
    raw = value.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise InvariantViolation("string longer than 65535 bytes")
    out += _U16.pack(len(raw))
    out += raw


def _check_packet_id(packet_id) -> int:
    if not isinstance(packet_id, int) or not 1 <= packet_id <= 0xFFFF:
        raise InvariantViolation(f"packet id {packet_id!r} outside 1..65535")
    return packet_id


def _frame(ptype: int, flags: int, body: bytes | bytearray) -> bytes:
    return bytes([(ptype << 4) | flags]) + encode_remaining_length(len(body)) + bytes(body)


def serialize_packet(packet: Packet) -> bytes:
    """Serialize a packet; parse_packet(serialize_packet(p)) == (p, len)."""
    if isinstance(packet, Connect):
        if not packet.client_id:
            raise InvariantViolation("empty client id")
        if not 0 <= packet.keep_alive_s <= 0xFFFF:
            raise InvariantViolation(f"keep alive {packet.keep_alive_s} outside 0..65535")
        body = bytearray()
        _write_string(body, "MQTT")
        body.append(4)  # protocol level
        body.append(0x02)  # clean session
        body += _U16.pack(packet.keep_alive_s)
        _write_string(body, packet.client_id)
        return _frame(_TYPE_CONNECT, 0, body)

    if isinstance(packet, ConnAck):
        if not 0 <= packet.return_code <= 5:
            raise InvariantViolation(f"connack return code {packet.return_code}")
        return _frame(_TYPE_CONNACK, 0, bytes([0, packet.return_code]))

    if isinstance(packet, Publish):
        if packet.qos not in (0, 1):
            raise InvariantViolation(f"qos {packet.qos} not in subset")
        if not packet.topic:
            raise InvariantViolation("empty topic")
        if "+" in packet.topic or "#" in packet.topic:
            raise InvariantViolation("wildcard in publish topic")
        if packet.qos == 1 and packet.packet_id is None:
            raise InvariantViolation("qos 1 publish requires a packet id")
        if packet.qos == 0 and packet.packet_id is not None:
            raise InvariantViolation("qos 0 publish carries no packet id")
        body = bytearray()
        _write_string(body, packet.topic)
        if packet.qos == 1:
            body += _U16.pack(_check_packet_id(packet.packet_id))
        if not isinstance(packet.payload, (bytes, bytearray)):
            raise InvariantViolation("payload must be bytes")
        body += packet.payload
        return _frame(_TYPE_PUBLISH, packet.qos << 1, body)

    if isinstance(packet, PubAck):
        return _frame(_TYPE_PUBACK, 0, _U16.pack(_check_packet_id(packet.packet_id)))

    if isinstance(packet, Subscribe):
        if not packet.filters:
            raise InvariantViolation("subscribe with no filters")
        body = bytearray(_U16.pack(_check_packet_id(packet.packet_id)))
        for topic_filter, qos in packet.filters:
            if not topic_filter:
                raise InvariantViolation("empty topic filter")
            if qos not in (0, 1, 2):
                raise InvariantViolation(f"requested qos {qos} invalid")
            _write_string(body, topic_filter)
            body.append(qos)
        return _frame(_TYPE_SUBSCRIBE, 0x02, body)

    if isinstance(packet, SubAck):
        if not packet.granted:
            raise InvariantViolation("suback with no return codes")
        body = bytearray(_U16.pack(_check_packet_id(packet.packet_id)))
        for code in packet.granted:
            if code not in (0, 1, 2, 0x80):
                raise InvariantViolation(f"suback return code {code}")
            body.append(code)
        return _frame(_TYPE_SUBACK, 0, body)

    if isinstance(packet, Unsubscribe):
        if not packet.filters:
            raise InvariantViolation("unsubscribe with no filters")
        body = bytearray(_U16.pack(_check_packet_id(packet.packet_id)))
        for topic_filter in packet.filters:
            if not topic_filter:
                raise InvariantViolation("empty topic filter")
            _write_string(body, topic_filter)
        return _frame(_TYPE_UNSUBSCRIBE, 0x02, body)

    if isinstance(packet, UnsubAck):
        return _frame(_TYPE_UNSUBACK, 0, _U16.pack(_check_packet_id(packet.packet_id)))

    if isinstance(packet, PingReq):
        return b"\xc0\x00"
    if isinstance(packet, PingResp):
        return b"\xd0\x00"
    if isinstance(packet, Disconnect):
        return b"\xe0\x00"

    raise InvariantViolation(f"not a packet: {packet!r}")


def topic_matches(topic_filter: str, topic: str) -> bool:
    """Level-by-level wildcard match.

    '+' matches exactly one level, '#' matches all remaining levels
    (including zero). The filter is assumed well-formed and the topic
    wildcard-free; both are enforced at subscribe/publish time.
    """
    filter_levels = topic_filter.split("/")
    topic_levels = topic.split("/")
    n_topic = len(topic_levels)
    for i, level in enumerate(filter_levels):
        if level == "#":
            return True
        if i >= n_topic:
            return False
        if level != "+" and level != topic_levels[i]:
            return False
    return len(filter_levels) == n_topic
