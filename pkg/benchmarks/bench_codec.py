"""Throughput comparison: compiled codec extension vs pure-Python fallback.

Usage: python3 benchmarks/bench_codec.py [-n ITERATIONS]
"""

import argparse
import random
import time

from spms.broker import _codec_py
from spms.broker.packets import MalformedPacket, Publish

try:
    from spms.broker import _codec_cy
except ImportError:
    _codec_cy = None


def bench(label, backends, func, n):
    results = {}
    for name, impl in backends.items():
        started = time.perf_counter()
        func(impl, n)
        elapsed = time.perf_counter() - started
        results[name] = n / elapsed
    line = f"{label:<28}"
    for name in backends:
        line += f"{results[name] / 1e6:>10.2f} M/s"
    if len(results) == 2:
        python_rate, cython_rate = results["python"], results["cython"]
        line += f"{cython_rate / python_rate:>9.1f}x"
    print(line)


def run_remaining_length(impl, n):
    encode = impl.encode_remaining_length
    decode = impl.decode_remaining_length
    values = [0, 127, 128, 16383, 16384, 2_097_151, 268_435_455]
    for i in range(n):
        decode(encode(values[i % 7]))


def run_publish_round_trip(impl, n):
    frame = impl.serialize_packet(
        Publish(topic="lot/L1/slot/S3/ir", payload=b"0", qos=1, packet_id=77)
    )
    parse = impl.parse_packet
    serialize = impl.serialize_packet
    for _ in range(n):
        packet, _consumed = parse(frame)
        serialize(packet)


def run_fuzz_parse(impl, n):
    rng = random.Random(42)
    samples = [rng.randbytes(rng.randint(0, 24)) for _ in range(4096)]
    parse = impl.parse_packet
    for i in range(n):
        try:
            parse(samples[i & 4095])
        except MalformedPacket:
            pass


def run_topic_match(impl, n):
    matches = impl.topic_matches
    pairs = [
        ("lot/+/slot/+/ir", "lot/L1/slot/S3/ir"),
        ("lot/#", "lot/L1/gate/G1/cmd"),
        ("lot/L1/ir", "lot/L2/ir"),
        ("+/+/+/+/+", "a/b/c/d/e"),
    ]
    for i in range(n):
        topic_filter, topic = pairs[i & 3]
        matches(topic_filter, topic)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-n", type=int, default=200_000, help="iterations per case")
    args = parser.parse_args()

    backends = {"python": _codec_py}
    if _codec_cy is not None:
        backends["cython"] = _codec_cy
    header = f"{'case':<28}" + "".join(f"{name:>14}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>9}"
    print(header)
    print("-" * len(header))
    bench("remaining length", backends, run_remaining_length, args.n)
    bench("publish parse+serialize", backends, run_publish_round_trip, args.n)
    bench("fuzz parse (random bytes)", backends, run_fuzz_parse, args.n)
    bench("topic match", backends, run_topic_match, args.n)
    if _codec_cy is None:
        print("\ncompiled codec not built; showing pure-Python backend only")


if __name__ == "__main__":
    main()
