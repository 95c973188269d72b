"""Service runtime: one writer queue, MQTT wiring, timers and effects.

HTTP handlers and the MQTT reader only enqueue commands; a single writer
thread applies them in arrival order. Responses await the applied result,
and side effects (gate commands, display text, the notification outbox)
run strictly after the durable append.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from concurrent.futures import Future
from pathlib import Path
from typing import Callable

from spms.broker.client import MqttClient
from spms.config import ServiceConfig
from spms.service.commands import Command, SensorEvent, TimerTick
from spms.service.engine import Applied, Engine
from spms.sim.simulator import GATE_CLOSED_PULSE, GATE_OPEN_PULSE

log = logging.getLogger(__name__)

OUTBOX_FILENAME = "outbox.jsonl"
Clock = Callable[[], int]


def wall_clock() -> int:
    return int(time.time())


class ServiceRuntime:
    """Owns the engine and its surrounding threads."""

    def __init__(
        self,
        data_dir: str | Path,
        config: ServiceConfig | None = None,
        clock: Clock = wall_clock,
        fsync: bool = True,
    ):
        self.config = config or ServiceConfig()
        self.engine = Engine(data_dir, self.config, fsync=fsync)
        self.clock = clock
        self.outbox_path = Path(data_dir) / OUTBOX_FILENAME
        self._queue: queue.Queue[tuple[Command, Future] | None] = queue.Queue()
        self._writer: threading.Thread | None = None
        self._ticker: threading.Thread | None = None
        self._client: MqttClient | None = None
        self._stopping = threading.Event()
        self.telemetry_count = 0  # messages accepted off MQTT, pre-validation

    # -- lifecycle --

    def start(
        self,
        broker: tuple[str, int] | None = None,
        timer: bool = False,
    ) -> "ServiceRuntime":
        self._writer = threading.Thread(
            target=self._writer_loop, name="svc-writer", daemon=True
        )
        self._writer.start()
        if broker is not None:
            self._client = MqttClient(
                client_id="svc",
                host=broker[0],
                port=broker[1],
                keep_alive_s=30,
                on_message=self._on_telemetry,
            )
            self._client.connect(retries=20)
            self._client.subscribe("lot/+/slot/+/ir", "lot/+/gate/+/piezo")
        if timer:
            self._ticker = threading.Thread(
                target=self._ticker_loop, name="svc-ticker", daemon=True
            )
            self._ticker.start()
        return self

    def stop(self) -> None:
        if self._stopping.is_set():
            return
        self._stopping.set()
        self._queue.put(None)
        if self._writer is not None:
            self._writer.join(timeout=5.0)
        if self._ticker is not None:
            self._ticker.join(timeout=2.0)
        if self._client is not None:
            self._client.close()
        self.engine.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.stop()

    # -- command intake --

    def submit(self, cmd: Command) -> Future:
        future: Future = Future()
        self._queue.put((cmd, future))
        return future

    def execute(self, cmd: Command, timeout: float = 10.0) -> Applied:
        """Enqueue and wait for the applied result (or the rejection)."""
        return self.submit(cmd).result(timeout=timeout)

    def drain(self) -> None:
        """Block until every queued command has been applied."""
        self._queue.join()

    def tick(self, now: int | None = None) -> Applied:
        return self.execute(TimerTick(now=now if now is not None else self.clock()))

    def _on_telemetry(self, topic: str, payload: bytes) -> None:
        self.telemetry_count += 1
        try:
            text = payload.decode("utf-8")
        except UnicodeDecodeError:
            log.warning("undecodable payload on %s", topic)
            return
        self.submit(SensorEvent(topic=topic, payload=text, ts=self.clock()))

    # -- the single writer --

    def _writer_loop(self) -> None:
        while True:
            item = self._queue.get()
            try:
                if item is None:
                    return
                cmd, future = item
                if not future.set_running_or_notify_cancel():
                    continue
                try:
                    applied = self.engine.execute(cmd, now=self.clock())
                except Exception as exc:  # rejection or defect: report, keep going
                    future.set_exception(exc)
                    continue
                try:
                    self._run_effects(applied)
                except Exception:
                    log.exception("side effects failed for seq %d", applied.seq)
                future.set_result(applied)
            finally:
                self._queue.task_done()

    def _ticker_loop(self) -> None:
        interval = max(self.config.tick_interval_s, 1)
        while not self._stopping.wait(interval):
            self.submit(TimerTick(now=self.clock()))

    # -- effects --

    def _run_effects(self, applied: Applied) -> None:
        for event in applied.events:
            kind = event["event"]
            if kind == "gate_open_commanded":
                self._publish(
                    f"lot/{event['lot_id']}/gate/{event['gate_id']}/cmd",
                    GATE_OPEN_PULSE,
                )
                self._publish(
                    f"lot/{event['lot_id']}/display", self.config.greeting[:32]
                )
            elif kind == "gate_close_commanded":
                self._publish(
                    f"lot/{event['lot_id']}/gate/{event['gate_id']}/cmd",
                    GATE_CLOSED_PULSE,
                )
            elif kind == "notification_created":
                self._write_outbox(event["notification"])

    def _publish(self, topic: str, payload: str) -> None:
        if self._client is None or not self._client.connected:
            return
        try:
            self._client.publish(topic, payload, qos=1)
        except OSError:
            log.warning("publish to %s failed", topic)

    def _write_outbox(self, notification: dict) -> None:
        with open(self.outbox_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(notification, sort_keys=True) + "\n")

    def read_outbox(self) -> list[dict]:
        if not self.outbox_path.exists():
            return []
        with open(self.outbox_path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
