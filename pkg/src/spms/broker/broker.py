"""TCP publish/subscribe broker for the MQTT subset.

One reader and one writer thread per connection; a single router lock
serializes subscription changes and publish routing so that messages from
one publisher to one topic reach every subscriber in publish order. QoS 1
deliveries are retried once after an ack timeout.
"""

from __future__ import annotations

import logging
import queue
import socket
import threading
import time
from dataclasses import dataclass, field

from spms.broker import codec
from spms.broker.packets import (
    ConnAck,
    Connect,
    Disconnect,
    MalformedPacket,
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

log = logging.getLogger(__name__)

_PRE_CONNECT_TIMEOUT = 30.0
_QUEUE_SENTINEL = None


@dataclass
class _InFlight:
    publish: Publish
    deadline: float
    retried: bool = False


@dataclass
class _Session:
    client_id: str
    sock: socket.socket
    keep_alive_s: int
    outbound: "queue.Queue[bytes | None]" = field(default_factory=queue.Queue)
    subscriptions: dict[str, int] = field(default_factory=dict)  # filter -> granted qos
    inflight: dict[int, _InFlight] = field(default_factory=dict)
    next_packet_id: int = 1
    closed: bool = False

    def allocate_packet_id(self) -> int:
        # 1..65535, skipping ids still awaiting acknowledgement
        for _ in range(0xFFFF):
            pid = self.next_packet_id
            self.next_packet_id = pid % 0xFFFF + 1
            if pid not in self.inflight:
                return pid
        raise RuntimeError("no free packet ids")


class MqttBroker:
    """Serve the MQTT subset on a TCP listener."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 1883,
        ack_timeout_s: float = 5.0,
    ):
        self.host = host
        self.port = port
        self.ack_timeout_s = ack_timeout_s
        self._listener: socket.socket | None = None
        self._sessions: dict[str, _Session] = {}
        self._router_lock = threading.Lock()
        self._threads: list[threading.Thread] = []
        self._stopping = threading.Event()

    # -- lifecycle --

    def start(self) -> None:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self.port))
        listener.listen(32)
        self._listener = listener
        self.port = listener.getsockname()[1]
        self._spawn(self._accept_loop, "mqtt-accept")
        self._spawn(self._retry_loop, "mqtt-retry")
        log.info("broker listening on %s:%d", self.host, self.port)

    def stop(self) -> None:
        self._stopping.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._router_lock:
            sessions = list(self._sessions.values())
        for session in sessions:
            self._teardown(session)
        for thread in self._threads:
            thread.join(timeout=2.0)

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.stop()

    @property
    def address(self) -> tuple[str, int]:
        return self.host, self.port

    def session_ids(self) -> list[str]:
        with self._router_lock:
            return sorted(self._sessions)

    def _spawn(self, target, name, *args) -> None:
        thread = threading.Thread(target=target, name=name, args=args, daemon=True)
        thread.start()
        self._threads.append(thread)

    # -- accept / per-connection loops --

    def _accept_loop(self) -> None:
        # A short timeout lets the loop notice stop(); a blocked accept()
        # does not reliably wake when another thread closes the listener.
        self._listener.settimeout(0.2)
        while not self._stopping.is_set():
            try:
                sock, addr = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._spawn(self._reader_loop, f"mqtt-conn-{addr[1]}", sock)

    def _reader_loop(self, sock: socket.socket) -> None:
        session: _Session | None = None
        buffer = b""
        sock.settimeout(_PRE_CONNECT_TIMEOUT)
        try:
            while not self._stopping.is_set():
                while True:
                    try:
                        parsed = codec.parse_packet(buffer)
                    except MalformedPacket as exc:
                        log.warning("malformed frame from %s: %s", session and session.client_id, exc)
                        return
                    if parsed is None:
                        break
                    packet, consumed = parsed
                    buffer = buffer[consumed:]
                    if session is None:
                        if not isinstance(packet, Connect):
                            log.warning("first packet was %s, closing", type(packet).__name__)
                            return
                        session = self._register(packet, sock)
                    elif isinstance(packet, Connect):
                        log.warning("%s sent a second CONNECT", session.client_id)
                        return
                    elif not self._dispatch(session, packet):
                        return
                try:
                    chunk = sock.recv(65536)
                except socket.timeout:
                    if session is None or session.keep_alive_s:
                        log.info("keep-alive expired for %s", session and session.client_id)
                        return
                    continue  # keep-alive 0: timeout is only a liveness poll
                except OSError:
                    return
                if not chunk:
                    return
                buffer += chunk
        finally:
            if session is not None:
                self._teardown(session)
            else:
                _close_quietly(sock)

    def _register(self, packet: Connect, sock: socket.socket) -> _Session:
        session = _Session(
            client_id=packet.client_id, sock=sock, keep_alive_s=packet.keep_alive_s
        )
        with self._router_lock:
            old = self._sessions.pop(packet.client_id, None)
            self._sessions[packet.client_id] = session
        if old is not None:
            log.info("session %s superseded", packet.client_id)
            self._teardown(old)
        # MQTT convention: allow 1.5x the declared interval; 0 disables
        # enforcement (the reader then polls so shutdown stays prompt).
        sock.settimeout(packet.keep_alive_s * 1.5 if packet.keep_alive_s else 0.5)
        self._spawn(self._writer_loop, f"mqtt-write-{packet.client_id}", session)
        session.outbound.put(codec.serialize_packet(ConnAck(return_code=0)))
        log.info("client %s connected (keep-alive %ds)", packet.client_id, packet.keep_alive_s)
        return session

    def _writer_loop(self, session: _Session) -> None:
        while True:
            data = session.outbound.get()
            if data is _QUEUE_SENTINEL:
                return
            try:
                session.sock.sendall(data)
            except OSError:
                self._teardown(session)
                return

    def _dispatch(self, session: _Session, packet) -> bool:
        """Handle one post-CONNECT packet; False tears the connection down."""
        if isinstance(packet, Publish):
            self._route(session, packet)
            return True
        if isinstance(packet, PubAck):
            with self._router_lock:
                session.inflight.pop(packet.packet_id, None)
            return True
        if isinstance(packet, Subscribe):
            granted = []
            with self._router_lock:
                for topic_filter, requested_qos in packet.filters:
                    if is_valid_filter(topic_filter):
                        qos = min(requested_qos, 1)
                        session.subscriptions[topic_filter] = qos
                        granted.append(qos)
                    else:
                        granted.append(0x80)
            session.outbound.put(
                codec.serialize_packet(
                    SubAck(packet_id=packet.packet_id, granted=tuple(granted))
                )
            )
            return True
        if isinstance(packet, Unsubscribe):
            with self._router_lock:
                for topic_filter in packet.filters:
                    session.subscriptions.pop(topic_filter, None)
            session.outbound.put(
                codec.serialize_packet(UnsubAck(packet_id=packet.packet_id))
            )
            return True
        if isinstance(packet, PingReq):
            session.outbound.put(codec.serialize_packet(PingResp()))
            return True
        if isinstance(packet, Disconnect):
            log.info("client %s disconnected", session.client_id)
            return False
        log.warning("%s sent unexpected %s", session.client_id, type(packet).__name__)
        return False

    # -- routing --

    def _route(self, publisher: _Session, publish: Publish) -> None:
        if not is_valid_topic(publish.topic):
            # The codec already rejects wildcards; this guards empty topics.
            log.warning("dropping publish to invalid topic %r", publish.topic)
            return
        with self._router_lock:
            for session in self._sessions.values():
                if session.closed:
                    continue
                granted = [
                    qos
                    for topic_filter, qos in session.subscriptions.items()
                    if codec.topic_matches(topic_filter, publish.topic)
                ]
                if not granted:
                    continue
                # Overlapping filters collapse to one delivery at the max qos.
                qos = min(publish.qos, max(granted))
                if qos == 0:
                    out = Publish(topic=publish.topic, payload=publish.payload, qos=0)
                else:
                    pid = session.allocate_packet_id()
                    out = Publish(
                        topic=publish.topic,
                        payload=publish.payload,
                        qos=1,
                        packet_id=pid,
                    )
                    session.inflight[pid] = _InFlight(
                        publish=out, deadline=time.monotonic() + self.ack_timeout_s
                    )
                session.outbound.put(codec.serialize_packet(out))
        # At-least-once toward the publisher: ack only after routing.
        if publish.qos == 1:
            publisher.outbound.put(
                codec.serialize_packet(PubAck(packet_id=publish.packet_id))
            )

    def _retry_loop(self) -> None:
        while not self._stopping.wait(min(self.ack_timeout_s / 4, 0.5)):
            now = time.monotonic()
            with self._router_lock:
                for session in self._sessions.values():
                    for pid, entry in list(session.inflight.items()):
                        if entry.deadline > now:
                            continue
                        if entry.retried:
                            # Single in-flight retry; give up afterwards.
                            del session.inflight[pid]
                            log.warning(
                                "dropping unacked publish %d to %s", pid, session.client_id
                            )
                            continue
                        entry.retried = True
                        entry.deadline = now + self.ack_timeout_s
                        session.outbound.put(codec.serialize_packet(entry.publish))

    def _teardown(self, session: _Session) -> None:
        with self._router_lock:
            if session.closed:
                return
            session.closed = True
            if self._sessions.get(session.client_id) is session:
                del self._sessions[session.client_id]
        session.outbound.put(_QUEUE_SENTINEL)
        _close_quietly(session.sock)


def _close_quietly(sock: socket.socket) -> None:
    try:
        sock.shutdown(socket.SHUT_RDWR)
    except OSError:
        pass
    try:
        sock.close()
    except OSError:
        pass
