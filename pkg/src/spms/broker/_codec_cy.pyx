# cython: language_level=3
# cython: boundscheck=False, wraparound=False
"""Compiled codec kernels; bit-exact twin of ``_codec_py``.

The byte scanning runs on C integers and raw buffer pointers; packet objects
are the same dataclasses the pure backend builds, so parsed results compare
equal across backends.
"""

from spms.broker.packets import (
    ConnAck,
    Connect,
    Disconnect,
    InvariantViolation,
    MalformedPacket,
    OutOfRange,
    PingReq,
    PingResp,
    PubAck,
    Publish,
    SubAck,
    Subscribe,
    UnsubAck,
    Unsubscribe,
)

BACKEND = "cython"

MAX_REMAINING_LENGTH = 268_435_455
MAX_PACKET_BODY = 256 * 1024

cdef enum:
    TYPE_CONNECT = 1
    TYPE_CONNACK = 2
    TYPE_PUBLISH = 3
    TYPE_PUBACK = 4
    TYPE_SUBSCRIBE = 8
    TYPE_SUBACK = 9
    TYPE_UNSUBSCRIBE = 10
    TYPE_UNSUBACK = 11
    TYPE_PINGREQ = 12
    TYPE_PINGRESP = 13
    TYPE_DISCONNECT = 14


def encode_remaining_length(n):
    cdef long long value = n
    cdef unsigned char buf[4]
    cdef int i = 0
    cdef int digit
    if value < 0 or value > MAX_REMAINING_LENGTH:
        raise OutOfRange(f"remaining length {n} outside 0..{MAX_REMAINING_LENGTH}")
    while True:
        digit = value % 128
        value //= 128
        if value:
            buf[i] = digit | 0x80
        else:
            buf[i] = digit
            return bytes(buf[: i + 1])
        i += 1


def decode_remaining_length(bytes data, Py_ssize_t offset=0):
    cdef const unsigned char* raw = data
    cdef Py_ssize_t size = len(data)
    cdef unsigned int value = 0
    cdef int shift = 0
    cdef int i
    cdef unsigned char byte
    for i in range(4):
        if offset + i >= size:
            return None
        byte = raw[offset + i]
        value |= <unsigned int> (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, i + 1
        if i == 3:
            raise MalformedPacket("remaining length continuation bit on 4th byte")
        shift += 7


cdef inline unsigned int _u16(const unsigned char* raw, Py_ssize_t pos):
    return (<unsigned int> raw[pos] << 8) | raw[pos + 1]


cdef tuple _read_string(bytes body, Py_ssize_t pos):
    cdef const unsigned char* raw = body
    cdef Py_ssize_t size = len(body)
    cdef Py_ssize_t length
    if pos + 2 > size:
        raise MalformedPacket("truncated string length")
    length = _u16(raw, pos)
    pos += 2
    if pos + length > size:
        raise MalformedPacket("string overruns packet body")
    try:
        return body[pos : pos + length].decode("utf-8"), pos + length
    except UnicodeDecodeError:
        raise MalformedPacket("invalid UTF-8 in string") from None


cdef tuple _read_packet_id(bytes body, Py_ssize_t pos):
    cdef const unsigned char* raw = body
    cdef unsigned int packet_id
    if pos + 2 > len(body):
        raise MalformedPacket("truncated packet id")
    packet_id = _u16(raw, pos)
    if packet_id == 0:
        raise MalformedPacket("packet id 0")
    return packet_id, pos + 2


def parse_packet(bytes data, Py_ssize_t offset=0):
    cdef const unsigned char* raw = data
    cdef Py_ssize_t size = len(data)
    cdef unsigned char first
    cdef int ptype, flags, expected_flags, rl_len
    cdef unsigned int remaining
    cdef Py_ssize_t body_start, consumed

    if offset >= size:
        return None
    first = raw[offset]
    ptype = first >> 4
    flags = first & 0x0F

    decoded = decode_remaining_length(data, offset + 1)
    if decoded is None:
        return None
    remaining = decoded[0]
    rl_len = decoded[1]
    if remaining > MAX_PACKET_BODY:
        raise MalformedPacket(f"packet body {remaining} exceeds {MAX_PACKET_BODY}")
    body_start = offset + 1 + rl_len
    if body_start + remaining > size:
        return None
    body = data[body_start : body_start + remaining]
    consumed = 1 + rl_len + remaining

    if ptype == TYPE_PUBLISH:
        packet = _parse_publish(flags, body)
    else:
        expected_flags = 0x02 if ptype in (TYPE_SUBSCRIBE, TYPE_UNSUBSCRIBE) else 0x00
        if flags != expected_flags:
            raise MalformedPacket(f"reserved flag violation on type {ptype}")
        if ptype == TYPE_CONNECT:
            packet = _parse_connect(body)
        elif ptype == TYPE_CONNACK:
            packet = _parse_connack(body)
        elif ptype == TYPE_PUBACK:
            packet = _parse_only_packet_id(body, PubAck)
        elif ptype == TYPE_SUBSCRIBE:
            packet = _parse_subscribe(body)
        elif ptype == TYPE_SUBACK:
            packet = _parse_suback(body)
        elif ptype == TYPE_UNSUBSCRIBE:
            packet = _parse_unsubscribe(body)
        elif ptype == TYPE_UNSUBACK:
            packet = _parse_only_packet_id(body, UnsubAck)
        elif ptype == TYPE_PINGREQ:
            packet = _parse_empty(body, PingReq)
        elif ptype == TYPE_PINGRESP:
            packet = _parse_empty(body, PingResp)
        elif ptype == TYPE_DISCONNECT:
            packet = _parse_empty(body, Disconnect)
        else:
            raise MalformedPacket(f"unknown packet type {ptype}")
    return packet, consumed


cdef object _parse_connect(bytes body):
    cdef const unsigned char* raw
    cdef Py_ssize_t pos
    cdef int level, connect_flags
    cdef unsigned int keep_alive
    proto, pos = _read_string(body, 0)
    if proto != "MQTT":
        raise MalformedPacket(f"unexpected protocol name {proto!r}")
    if pos + 4 > len(body):
        raise MalformedPacket("truncated connect header")
    raw = body
    level = raw[pos]
    connect_flags = raw[pos + 1]
    if level != 4:
        raise MalformedPacket(f"unsupported protocol level {level}")
    if connect_flags != 0x02:
        raise MalformedPacket(f"unsupported connect flags 0x{connect_flags:02x}")
    keep_alive = _u16(raw, pos + 2)
    client_id, pos = _read_string(body, pos + 4)
    if not client_id:
        raise MalformedPacket("empty client id")
    if pos != len(body):
        raise MalformedPacket("trailing bytes in connect")
    return Connect(client_id=client_id, keep_alive_s=keep_alive)


cdef object _parse_connack(bytes body):
    cdef const unsigned char* raw
    if len(body) != 2:
        raise MalformedPacket("connack body must be 2 bytes")
    raw = body
    if raw[0] != 0:
        raise MalformedPacket("session present not supported")
    if raw[1] > 5:
        raise MalformedPacket(f"unknown connack return code {raw[1]}")
    return ConnAck(return_code=raw[1])


cdef object _parse_publish(int flags, bytes body):
    cdef int qos = (flags >> 1) & 0x03
    cdef Py_ssize_t pos
    if qos > 1:
        raise MalformedPacket(f"qos {qos} not in subset")
    if flags & 0x01:
        raise MalformedPacket("retained messages not in subset")
    topic, pos = _read_string(body, 0)
    if not topic:
        raise MalformedPacket("empty topic")
    if "+" in topic or "#" in topic:
        raise MalformedPacket("wildcard in publish topic")
    packet_id = None
    if qos == 1:
        packet_id, pos = _read_packet_id(body, pos)
    return Publish(topic=topic, payload=body[pos:], qos=qos, packet_id=packet_id)


cdef object _parse_only_packet_id(bytes body, cls):
    if len(body) != 2:
        raise MalformedPacket(f"{cls.__name__.lower()} body must be 2 bytes")
    packet_id, _ = _read_packet_id(body, 0)
    return cls(packet_id=packet_id)


cdef object _parse_subscribe(bytes body):
    cdef const unsigned char* raw = body
    cdef Py_ssize_t pos, size = len(body)
    cdef int qos
    packet_id, pos = _read_packet_id(body, 0)
    filters = []
    while pos < size:
        topic_filter, pos = _read_string(body, pos)
        if not topic_filter:
            raise MalformedPacket("empty topic filter")
        if pos >= size:
            raise MalformedPacket("subscribe filter missing qos byte")
        qos = raw[pos]
        pos += 1
        if qos > 2:
            raise MalformedPacket(f"requested qos {qos} invalid")
        filters.append((topic_filter, qos))
    if not filters:
        raise MalformedPacket("subscribe with no filters")
    return Subscribe(packet_id=packet_id, filters=tuple(filters))


cdef object _parse_suback(bytes body):
    cdef Py_ssize_t pos
    cdef int code
    packet_id, pos = _read_packet_id(body, 0)
    granted = tuple(body[pos:])
    if not granted:
        raise MalformedPacket("suback with no return codes")
    for code in granted:
        if code not in (0, 1, 2, 0x80):
            raise MalformedPacket(f"suback return code 0x{code:02x} invalid")
    return SubAck(packet_id=packet_id, granted=granted)


cdef object _parse_unsubscribe(bytes body):
    cdef Py_ssize_t pos, size = len(body)
    packet_id, pos = _read_packet_id(body, 0)
    filters = []
    while pos < size:
        topic_filter, pos = _read_string(body, pos)
        if not topic_filter:
            raise MalformedPacket("empty topic filter")
        filters.append(topic_filter)
    if not filters:
        raise MalformedPacket("unsubscribe with no filters")
    return Unsubscribe(packet_id=packet_id, filters=tuple(filters))


cdef object _parse_empty(bytes body, cls):
    if body:
        raise MalformedPacket(f"{cls.__name__.lower()} carries no body")
    return cls()


cdef void _write_string(bytearray out, str value) except *:
    raw = value.encode("utf-8")
    cdef Py_ssize_t length = len(raw)
    if length > 0xFFFF:
        raise InvariantViolation("string longer than 65535 bytes")
    out.append(length >> 8)
    out.append(length & 0xFF)
    out += raw


cdef int _check_packet_id(packet_id) except -1:
    if not isinstance(packet_id, int) or not 1 <= packet_id <= 0xFFFF:
        raise InvariantViolation(f"packet id {packet_id!r} outside 1..65535")
    return packet_id


cdef inline void _append_u16(bytearray out, unsigned int value):
    out.append(value >> 8)
    out.append(value & 0xFF)


cdef bytes _frame(int ptype, int flags, body):
    return bytes([(ptype << 4) | flags]) + encode_remaining_length(len(body)) + bytes(body)


def serialize_packet(packet):
    cdef bytearray body

    if isinstance(packet, Connect):
        if not packet.client_id:
            raise InvariantViolation("empty client id")
        if not 0 <= packet.keep_alive_s <= 0xFFFF:
            raise InvariantViolation(f"keep alive {packet.keep_alive_s} outside 0..65535")
        body = bytearray()
        _write_string(body, "MQTT")
        body.append(4)
        body.append(0x02)
        _append_u16(body, packet.keep_alive_s)
        _write_string(body, packet.client_id)
        return _frame(TYPE_CONNECT, 0, body)

    if isinstance(packet, ConnAck):
        if not 0 <= packet.return_code <= 5:
            raise InvariantViolation(f"connack return code {packet.return_code}")
        return _frame(TYPE_CONNACK, 0, bytes([0, packet.return_code]))

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
            _append_u16(body, _check_packet_id(packet.packet_id))
        if not isinstance(packet.payload, (bytes, bytearray)):
            raise InvariantViolation("payload must be bytes")
        body += packet.payload
        return _frame(TYPE_PUBLISH, packet.qos << 1, body)

    if isinstance(packet, PubAck):
        body = bytearray()
        _append_u16(body, _check_packet_id(packet.packet_id))
        return _frame(TYPE_PUBACK, 0, body)

    if isinstance(packet, Subscribe):
        if not packet.filters:
            raise InvariantViolation("subscribe with no filters")
        body = bytearray()
        _append_u16(body, _check_packet_id(packet.packet_id))
        for topic_filter, qos in packet.filters:
            if not topic_filter:
                raise InvariantViolation("empty topic filter")
            if qos not in (0, 1, 2):
                raise InvariantViolation(f"requested qos {qos} invalid")
            _write_string(body, topic_filter)
            body.append(qos)
        return _frame(TYPE_SUBSCRIBE, 0x02, body)

    if isinstance(packet, SubAck):
        if not packet.granted:
            raise InvariantViolation("suback with no return codes")
        body = bytearray()
        _append_u16(body, _check_packet_id(packet.packet_id))
        for code in packet.granted:
            if code not in (0, 1, 2, 0x80):
                raise InvariantViolation(f"suback return code {code}")
            body.append(code)
        return _frame(TYPE_SUBACK, 0, body)

    if isinstance(packet, Unsubscribe):
        if not packet.filters:
            raise InvariantViolation("unsubscribe with no filters")
        body = bytearray()
        _append_u16(body, _check_packet_id(packet.packet_id))
        for topic_filter in packet.filters:
            if not topic_filter:
                raise InvariantViolation("empty topic filter")
            _write_string(body, topic_filter)
        return _frame(TYPE_UNSUBSCRIBE, 0x02, body)

    if isinstance(packet, UnsubAck):
        body = bytearray()
        _append_u16(body, _check_packet_id(packet.packet_id))
        return _frame(TYPE_UNSUBACK, 0, body)

    if isinstance(packet, PingReq):
        return b"\xc0\x00"
    if isinstance(packet, PingResp):
        return b"\xd0\x00"
    if isinstance(packet, Disconnect):
        return b"\xe0\x00"

    raise InvariantViolation(f"not a packet: {packet!r}")


def topic_matches(str topic_filter, str topic):
    cdef list filter_levels = topic_filter.split("/")
    cdef list topic_levels = topic.split("/")
    cdef Py_ssize_t n_topic = len(topic_levels)
    cdef Py_ssize_t i
    cdef str level
    for i in range(len(filter_levels)):
        level = filter_levels[i]
        if level == "#":
            return True
        if i >= n_topic:
            return False
        if level != "+" and level != topic_levels[i]:
            return False
    return len(filter_levels) == n_topic
