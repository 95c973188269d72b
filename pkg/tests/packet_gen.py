"""Shared generators for valid packets, topics and filters.

Used by the codec unit tests, the backend parity tests and the acceptance
suite. Both hypothesis strategies and a plain seeded-random generator are
provided; the latter keeps the big acceptance runs fast and reproducible.
"""

import random

from hypothesis import strategies as st

from spms.broker.packets import (
    ConnAck,
    Connect,
    Disconnect,
    PingReq,
    PingResp,
    PubAck,
    Publish,
    SubAck,
    Subscribe,
    UnsubAck,
    Unsubscribe,
)

_LEVEL_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789_-"

level = st.text(alphabet=_LEVEL_ALPHABET, min_size=0, max_size=6)
nonempty_level = st.text(alphabet=_LEVEL_ALPHABET, min_size=1, max_size=6)

topics = st.lists(level, min_size=1, max_size=5).map("/".join).filter(bool)
filter_level = st.one_of(st.just("+"), level)
filters = (
    st.tuples(
        st.lists(filter_level, min_size=0, max_size=4),
        st.sampled_from(["", "#"]),
    )
    .map(lambda lv: "/".join(list(lv[0]) + ([lv[1]] if lv[1] else [])))
    .filter(bool)
)

packet_ids = st.integers(min_value=1, max_value=0xFFFF)
payloads = st.binary(min_size=0, max_size=64)
client_ids = st.text(alphabet=_LEVEL_ALPHABET, min_size=1, max_size=23)

qos0_publishes = st.builds(
    Publish, topic=topics, payload=payloads, qos=st.just(0), packet_id=st.none()
)
qos1_publishes = st.builds(
    Publish, topic=topics, payload=payloads, qos=st.just(1), packet_id=packet_ids
)

packets = st.one_of(
    st.builds(Connect, client_id=client_ids, keep_alive_s=st.integers(0, 0xFFFF)),
    st.builds(ConnAck, return_code=st.integers(0, 5)),
    qos0_publishes,
    qos1_publishes,
    st.builds(PubAck, packet_id=packet_ids),
    st.builds(
        Subscribe,
        packet_id=packet_ids,
        filters=st.lists(
            st.tuples(filters, st.integers(0, 2)), min_size=1, max_size=4
        ).map(tuple),
    ),
    st.builds(
        SubAck,
        packet_id=packet_ids,
        granted=st.lists(st.sampled_from([0, 1, 2, 0x80]), min_size=1, max_size=4).map(
            tuple
        ),
    ),
    st.builds(
        Unsubscribe,
        packet_id=packet_ids,
        filters=st.lists(filters, min_size=1, max_size=4).map(tuple),
    ),
    st.builds(UnsubAck, packet_id=packet_ids),
    st.just(PingReq()),
    st.just(PingResp()),
    st.just(Disconnect()),
)


def random_topic(rng: random.Random, max_levels: int = 5) -> str:
    while True:
        n = rng.randint(1, max_levels)
        topic = "/".join(
            "".join(rng.choices(_LEVEL_ALPHABET, k=rng.randint(0, 5))) for _ in range(n)
        )
        if topic:
            return topic


def random_filter(rng: random.Random, max_levels: int = 5) -> str:
    while True:
        n = rng.randint(1, max_levels)
        levels = []
        for _ in range(n):
            roll = rng.random()
            if roll < 0.3:
                levels.append("+")
            else:
                levels.append("".join(rng.choices(_LEVEL_ALPHABET, k=rng.randint(0, 4))))
        if rng.random() < 0.3:
            levels.append("#")
        candidate = "/".join(levels)
        if candidate:
            return candidate


def random_packet(rng: random.Random):
    kind = rng.randrange(11)
    if kind == 0:
        return Connect(
            client_id="".join(rng.choices(_LEVEL_ALPHABET, k=rng.randint(1, 20))),
            keep_alive_s=rng.randint(0, 0xFFFF),
        )
    if kind == 1:
        return ConnAck(return_code=rng.randint(0, 5))
    if kind == 2:
        return Publish(
            topic=random_topic(rng),
            payload=rng.randbytes(rng.randint(0, 48)),
            qos=0,
            packet_id=None,
        )
    if kind == 3:
        return Publish(
            topic=random_topic(rng),
            payload=rng.randbytes(rng.randint(0, 48)),
            qos=1,
            packet_id=rng.randint(1, 0xFFFF),
        )
    if kind == 4:
        return PubAck(packet_id=rng.randint(1, 0xFFFF))
    if kind == 5:
        return Subscribe(
            packet_id=rng.randint(1, 0xFFFF),
            filters=tuple(
                (random_filter(rng), rng.randint(0, 2))
                for _ in range(rng.randint(1, 4))
            ),
        )
    if kind == 6:
        return SubAck(
            packet_id=rng.randint(1, 0xFFFF),
            granted=tuple(
                rng.choice([0, 1, 2, 0x80]) for _ in range(rng.randint(1, 4))
            ),
        )
    if kind == 7:
        return Unsubscribe(
            packet_id=rng.randint(1, 0xFFFF),
            filters=tuple(random_filter(rng) for _ in range(rng.randint(1, 4))),
        )
    if kind == 8:
        return UnsubAck(packet_id=rng.randint(1, 0xFFFF))
    if kind == 9:
        return rng.choice([PingReq(), PingResp()])
    return Disconnect()
