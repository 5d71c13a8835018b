"""JSON-lines event log with monotone timestamps."""

from __future__ import annotations

import json
import threading
import time


class EventLog:
    def __init__(self, path=None, clock=time.monotonic):
        self.path = path
        self.clock = clock
        self.events: list = []
        self._t0 = clock()
        self._last = 0.0
        self._lock = threading.Lock()
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def emit(self, event: str, **fields) -> dict:
        with self._lock:
            t = max(self.clock() - self._t0, self._last)
            self._last = t
            record = {"t": round(t, 6), "event": event, **fields}
            self.events.append(record)
            if self._fh:
                self._fh.write(json.dumps(record, sort_keys=False) + "\n")
                self._fh.flush()
        return record

    def close(self) -> None:
        with self._lock:
            if self._fh:
                self._fh.close()
                self._fh = None

    def of(self, event: str) -> list:
        return [e for e in self.events if e["event"] == event]

    def states(self) -> list:
        return [e["state"] for e in self.of("state")]


def read_log(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def without_time(events) -> list:
    """Events stripped of timestamps, for run-to-run comparison."""
    return [{k: v for k, v in e.items() if k != "t"} for e in events]
