"""Append-only event log with CRC-protected records and state snapshots.

One JSON object per line: {"seq", "ts", "kind", "payload", "crc32"} with a
gapless seq from 1. The checksum covers the record minus its own field; a
record that fails it refuses recovery (tampering), while an unparseable
final line is treated as a torn write and dropped with a warning.
"""

from __future__ import annotations

import json
import logging
import os
import zlib
from pathlib import Path
from typing import Iterator

log = logging.getLogger(__name__)

LOG_FILENAME = "events.log"
SNAPSHOT_PREFIX = "snapshot-"


class CorruptLog(Exception):
    def __init__(self, seq: int, message: str):
        self.seq = seq
        super().__init__(f"record {seq}: {message}")


def _checksum(record: dict) -> str:
    canonical = json.dumps(record, sort_keys=True, separators=(",", ":"))
    return f"{zlib.crc32(canonical.encode('utf-8')):08x}"


class EventLog:
    """Single-writer append log; readers see records in write order."""

    def __init__(self, data_dir: str | Path, fsync: bool = True):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / LOG_FILENAME
        self.fsync = fsync
        self._fh = None
        self.last_seq = 0

    # -- writing --

    def open_for_append(self, last_seq: int) -> None:
        self._fh = open(self.path, "a", encoding="utf-8")
        self.last_seq = last_seq

    def append(self, ts: int, kind: str, payload: dict) -> int:
        if self._fh is None:
            self.open_for_append(self.last_seq)
        seq = self.last_seq + 1
        record = {"seq": seq, "ts": ts, "kind": kind, "payload": payload}
        record["crc32"] = _checksum(record)
        self._fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())
        self.last_seq = seq
        return seq

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            if self.fsync:
                os.fsync(self._fh.fileno())
            self._fh.close()
            self._fh = None

    # -- reading --

    def records(self, after_seq: int = 0) -> Iterator[dict]:
        """Yield verified records with seq > after_seq, in order."""
        if not self.path.exists():
            return
        expected = None
        with open(self.path, encoding="utf-8") as fh:
            lines = fh.readlines()
        for index, line in enumerate(lines):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                if index == len(lines) - 1:
                    log.warning(
                        "dropping torn final record after seq %s", expected or after_seq
                    )
                    return
                raise CorruptLog((expected or 0) + 1, "unparseable record") from None
            seq = record.get("seq")
            stored_crc = record.pop("crc32", None)
            if stored_crc != _checksum(record):
                raise CorruptLog(seq if isinstance(seq, int) else -1, "checksum mismatch")
            if expected is not None and seq != expected + 1:
                raise CorruptLog(seq, f"sequence gap, expected {expected + 1}")
            expected = seq
            if seq > after_seq:
                yield record

    # -- snapshots --

    def snapshot_path(self, seq: int) -> Path:
        return self.data_dir / f"{SNAPSHOT_PREFIX}{seq:09d}.json"

    def write_snapshot(self, seq: int, state: dict) -> None:
        path = self.snapshot_path(seq)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({"seq": seq, "state": state}, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        log.info("snapshot written at seq %d", seq)

    def snapshots(self) -> list[tuple[int, Path]]:
        found = []
        for path in self.data_dir.glob(f"{SNAPSHOT_PREFIX}*.json"):
            try:
                seq = int(path.stem[len(SNAPSHOT_PREFIX) :])
            except ValueError:
                continue
            found.append((seq, path))
        return sorted(found)

    def latest_snapshot(self) -> tuple[int, dict] | None:
        """Best readable snapshot; unreadable ones fall back to older."""
        for seq, path in reversed(self.snapshots()):
            try:
                with open(path, encoding="utf-8") as fh:
                    data = json.load(fh)
                if data.get("seq") != seq:
                    raise ValueError("snapshot seq mismatch")
                return seq, data["state"]
            except (OSError, ValueError, KeyError) as exc:
                log.warning("skipping unreadable snapshot %s: %s", path.name, exc)
        return None

    @property
    def exists(self) -> bool:
        return self.path.exists() and self.path.stat().st_size > 0
