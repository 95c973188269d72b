"""Small blocking MQTT client used by the simulator, the service and tests."""

from __future__ import annotations

import logging
import socket
import threading
import time
from typing import Callable

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

log = logging.getLogger(__name__)

MessageHandler = Callable[[str, bytes], None]


class MqttError(ConnectionError):
    pass


class MqttClient:
    """Blocking client: connect/subscribe wait for their acks, qos1 publishes
    are retried once if the broker does not ack in time."""

    def __init__(
        self,
        client_id: str,
        host: str,
        port: int,
        keep_alive_s: int = 60,
        on_message: MessageHandler | None = None,
        ack_timeout_s: float = 5.0,
        auto_puback: bool = True,
    ):
        self.client_id = client_id
        self.host = host
        self.port = port
        self.keep_alive_s = keep_alive_s
        self.on_message = on_message
        self.ack_timeout_s = ack_timeout_s
        self.auto_puback = auto_puback
        self._sock: socket.socket | None = None
        self._send_lock = threading.Lock()
        self._pending_lock = threading.Lock()
        self._pending: dict[int, threading.Event] = {}
        self._unacked_publish: dict[int, tuple[Publish, float, bool]] = {}
        self._next_packet_id = 1
        self._connected = threading.Event()
        self._closed = threading.Event()
        self._threads: list[threading.Thread] = []

    # -- lifecycle --

    def connect(self, timeout: float = 5.0, retries: int = 0, backoff_s: float = 0.5):
        """Open the TCP connection and complete the CONNECT handshake.

        ``retries`` > 0 keeps retrying refused connections with a linear
        backoff -- used by services that may start before the broker.
        """
        attempt = 0
        while True:
            try:
                self._sock = socket.create_connection(
                    (self.host, self.port), timeout=timeout
                )
                break
            except OSError:
                attempt += 1
                if attempt > retries:
                    raise
                time.sleep(backoff_s * attempt)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock.settimeout(0.5)
        reader = threading.Thread(
            target=self._reader_loop, name=f"mqtt-client-{self.client_id}", daemon=True
        )
        reader.start()
        self._threads.append(reader)
        self._send(Connect(client_id=self.client_id, keep_alive_s=self.keep_alive_s))
        if not self._connected.wait(timeout):
            self.close()
            raise MqttError("CONNACK timeout")
        if self.keep_alive_s:
            keeper = threading.Thread(
                target=self._keepalive_loop, name="mqtt-keepalive", daemon=True
            )
            keeper.start()
            self._threads.append(keeper)
        return self

    def close(self) -> None:
        if self._closed.is_set():
            return
        self._closed.set()
        if self._sock is not None:
            if self._connected.is_set():
                try:
                    self._send(Disconnect())
                except OSError:
                    pass
            try:
                self._sock.close()
            except OSError:
                pass
        for thread in self._threads:
            if thread is not threading.current_thread():
                thread.join(timeout=1.0)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def connected(self) -> bool:
        return self._connected.is_set() and not self._closed.is_set()

    # -- operations --

    def subscribe(self, *filters: str, qos: int = 1, timeout: float = 5.0) -> None:
        pid = self._allocate_packet_id()
        done = self._register_pending(pid)
        self._send(Subscribe(packet_id=pid, filters=tuple((f, qos) for f in filters)))
        if not done.wait(timeout):
            raise MqttError(f"SUBACK timeout for {filters}")

    def unsubscribe(self, *filters: str, timeout: float = 5.0) -> None:
        pid = self._allocate_packet_id()
        done = self._register_pending(pid)
        self._send(Unsubscribe(packet_id=pid, filters=tuple(filters)))
        if not done.wait(timeout):
            raise MqttError(f"UNSUBACK timeout for {filters}")

    def publish(
        self, topic: str, payload: bytes | str, qos: int = 0, wait: bool = False
    ) -> None:
        if isinstance(payload, str):
            payload = payload.encode("utf-8")
        if qos == 0:
            self._send(Publish(topic=topic, payload=payload, qos=0))
            return
        pid = self._allocate_packet_id()
        publish = Publish(topic=topic, payload=payload, qos=1, packet_id=pid)
        done = self._register_pending(pid)
        with self._pending_lock:
            self._unacked_publish[pid] = (
                publish,
                time.monotonic() + self.ack_timeout_s,
                False,
            )
        self._send(publish)
        if wait and not done.wait(self.ack_timeout_s * 2.5):
            raise MqttError(f"PUBACK timeout for packet {pid}")

    def ping(self) -> None:
        self._send(PingReq())

    # -- internals --

    def _allocate_packet_id(self) -> int:
        with self._pending_lock:
            pid = self._next_packet_id
            self._next_packet_id = pid % 0xFFFF + 1
            return pid

    def _register_pending(self, pid: int) -> threading.Event:
        event = threading.Event()
        with self._pending_lock:
            self._pending[pid] = event
        return event

    def _resolve(self, pid: int) -> None:
        with self._pending_lock:
            event = self._pending.pop(pid, None)
            self._unacked_publish.pop(pid, None)
        if event is not None:
            event.set()

    def _send(self, packet) -> None:
        data = codec.serialize_packet(packet)
        with self._send_lock:
            self._sock.sendall(data)

    def _reader_loop(self) -> None:
        buffer = b""
        sock = self._sock
        while not self._closed.is_set():
            try:
                chunk = sock.recv(65536)
            except socket.timeout:
                self._retry_unacked()
                continue
            except OSError:
                break
            if not chunk:
                break
            buffer += chunk
            while True:
                try:
                    parsed = codec.parse_packet(buffer)
                except MalformedPacket:
                    log.warning("malformed frame from broker, closing")
                    self.close()
                    return
                if parsed is None:
                    break
                packet, consumed = parsed
                buffer = buffer[consumed:]
                self._handle(packet)
        self._connected.clear()

    def _handle(self, packet) -> None:
        if isinstance(packet, Publish):
            if packet.qos == 1 and self.auto_puback:
                self._send(PubAck(packet_id=packet.packet_id))
            if self.on_message is not None:
                try:
                    self.on_message(packet.topic, packet.payload)
                except Exception:
                    log.exception("message handler failed for %s", packet.topic)
        elif isinstance(packet, (PubAck, SubAck, UnsubAck)):
            self._resolve(packet.packet_id)
        elif isinstance(packet, ConnAck):
            if packet.return_code == 0:
                self._connected.set()
            else:
                log.error("connection refused, code %d", packet.return_code)
                self.close()
        elif isinstance(packet, PingResp):
            pass
        else:
            log.warning("unexpected %s from broker", type(packet).__name__)

    def _retry_unacked(self) -> None:
        now = time.monotonic()
        resend = []
        with self._pending_lock:
            for pid, (publish, deadline, retried) in list(self._unacked_publish.items()):
                if deadline > now:
                    continue
                if retried:
                    del self._unacked_publish[pid]
                    log.warning("giving up on unacked publish %d", pid)
                    continue
                self._unacked_publish[pid] = (publish, now + self.ack_timeout_s, True)
                resend.append(publish)
        for publish in resend:
            try:
                self._send(publish)
            except OSError:
                return

    def _keepalive_loop(self) -> None:
        interval = max(self.keep_alive_s / 2, 0.5)
        while not self._closed.wait(interval):
            if not self._connected.is_set():
                return
            try:
                self.ping()
            except OSError:
                return
