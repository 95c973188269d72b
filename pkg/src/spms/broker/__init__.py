"""MQTT-3.1.1-subset broker, codec and client.

Topic scheme carried for the parking system:

    lot/{lot_id}/slot/{slot_id}/ir    ASCII "0" (obstacle) | "1" (clear)
    lot/{lot_id}/gate/{gate_id}/piezo ASCII "1" (vehicle on the pad)
    lot/{lot_id}/gate/{gate_id}/cmd   ASCII servo pulse width in microseconds
    lot/{lot_id}/display              UTF-8 text, at most 32 chars
"""

from spms.broker.broker import MqttBroker
from spms.broker.client import MqttClient, MqttError
from spms.broker.codec import (
    BACKEND,
    decode_remaining_length,
    encode_remaining_length,
    parse_packet,
    serialize_packet,
    topic_matches,
)
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
from spms.broker.topics import is_valid_filter, is_valid_topic

__all__ = [
    "BACKEND",
    "ConnAck",
    "Connect",
    "Disconnect",
    "InvariantViolation",
    "MalformedPacket",
    "MqttBroker",
    "MqttClient",
    "MqttError",
    "OutOfRange",
    "Packet",
    "PingReq",
    "PingResp",
    "PubAck",
    "Publish",
    "SubAck",
    "Subscribe",
    "UnsubAck",
    "Unsubscribe",
    "decode_remaining_length",
    "encode_remaining_length",
    "is_valid_filter",
    "is_valid_topic",
    "parse_packet",
    "serialize_packet",
    "topic_matches",
]
