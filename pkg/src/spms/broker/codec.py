"""Codec backend selection.

Prefers the compiled extension and falls back to the pure-Python kernels;
set SPMS_PURE_PYTHON=1 to force the fallback. Both backends are bit-exact
(see tests/test_codec_parity.py) -- only throughput differs.
"""

import os

if os.environ.get("SPMS_PURE_PYTHON"):
    from spms.broker import _codec_py as _impl
else:
    try:
        from spms.broker import _codec_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from spms.broker import _codec_py as _impl

BACKEND = _impl.BACKEND
MAX_REMAINING_LENGTH = _impl.MAX_REMAINING_LENGTH
MAX_PACKET_BODY = _impl.MAX_PACKET_BODY

encode_remaining_length = _impl.encode_remaining_length
decode_remaining_length = _impl.decode_remaining_length
parse_packet = _impl.parse_packet
serialize_packet = _impl.serialize_packet
topic_matches = _impl.topic_matches

__all__ = [
    "BACKEND",
    "MAX_PACKET_BODY",
    "MAX_REMAINING_LENGTH",
    "decode_remaining_length",
    "encode_remaining_length",
    "parse_packet",
    "serialize_packet",
    "topic_matches",
]
