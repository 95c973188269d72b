"""Compiled and pure-Python codec backends must be bit-exact twins."""

import random

import pytest

from packet_gen import random_filter, random_packet, random_topic
from spms.broker import _codec_py
from spms.broker.packets import MalformedPacket

cy = pytest.importorskip("spms.broker._codec_cy", reason="compiled codec not built")


def outcome(impl, data):
    try:
        return ("ok", impl.parse_packet(data))
    except MalformedPacket:
        return ("malformed", None)


def test_backends_identify_themselves():
    assert _codec_py.BACKEND == "python"
    assert cy.BACKEND == "cython"


def test_serialize_parity_on_random_packets():
    rng = random.Random(31337)
    for _ in range(5_000):
        packet = random_packet(rng)
        assert cy.serialize_packet(packet) == _codec_py.serialize_packet(packet)


def test_parse_parity_on_valid_frames():
    rng = random.Random(424242)
    for _ in range(5_000):
        frame = _codec_py.serialize_packet(random_packet(rng))
        assert cy.parse_packet(frame) == _codec_py.parse_packet(frame)


def test_parse_parity_on_fuzz_input():
    rng = random.Random(777)
    for _ in range(20_000):
        data = rng.randbytes(rng.randint(0, 32))
        assert outcome(cy, data) == outcome(_codec_py, data)


def test_parse_parity_on_mutated_frames():
    rng = random.Random(888)
    for _ in range(10_000):
        frame = bytearray(_codec_py.serialize_packet(random_packet(rng)))
        for _ in range(rng.randint(1, 3)):
            frame[rng.randrange(len(frame))] = rng.randrange(256)
        data = bytes(frame)
        assert outcome(cy, data) == outcome(_codec_py, data)


def test_remaining_length_parity():
    rng = random.Random(999)
    for n in [0, 1, 127, 128, 16383, 16384, 2097151, 2097152, 268435455]:
        assert cy.encode_remaining_length(n) == _codec_py.encode_remaining_length(n)
    for _ in range(5_000):
        n = rng.randrange(0, 268435456)
        assert cy.encode_remaining_length(n) == _codec_py.encode_remaining_length(n)
        data = rng.randbytes(rng.randint(0, 5))
        try:
            a = _codec_py.decode_remaining_length(data)
        except MalformedPacket:
            with pytest.raises(MalformedPacket):
                cy.decode_remaining_length(data)
        else:
            assert cy.decode_remaining_length(data) == a


def test_topic_matching_parity():
    rng = random.Random(1234)
    for _ in range(10_000):
        topic_filter = random_filter(rng)
        topic = random_topic(rng)
        assert cy.topic_matches(topic_filter, topic) == _codec_py.topic_matches(
            topic_filter, topic
        )
