"""In-process event bus.

Every observable state change (NS/VNF transitions, alarm transitions,
decisions, carrier grants, task progress) is published here as a flat JSON
record. The REST event stream, the scenario report and the tests all read
from the same bus, so "what the API shows" and "what the report shows" can
never drift apart.
"""
from __future__ import annotations

import itertools
import queue
import threading
from typing import Any, Callable


class EventBus:
    """Ordered fan-out of event records to live subscribers plus a replay log.

    emit() is called only from the engine's single writer path; subscribers
    may attach/detach from any thread.
    """

    def __init__(self, log_limit: int = 100_000):
        self._lock = threading.Lock()
        self._log: list[dict] = []
        self._log_limit = log_limit
        self._seq = itertools.count()
        self._subscribers: list[queue.SimpleQueue] = []

    def emit(self, kind: str, t: float, **fields: Any) -> dict:
        record = {"seq": next(self._seq), "t": t, "kind": kind}
        record.update(fields)
        with self._lock:
            self._log.append(record)
            if len(self._log) > self._log_limit:
                del self._log[: len(self._log) - self._log_limit]
            subscribers = list(self._subscribers)
        for q in subscribers:
            q.put(record)
        return record

    def log(self, kinds: set[str] | None = None) -> list[dict]:
        with self._lock:
            records = list(self._log)
        if kinds is None:
            return records
        return [r for r in records if r["kind"] in kinds]

    def replay(self, count: int) -> list[dict]:
        with self._lock:
            if count <= 0:
                return []
            return list(self._log[-count:])

    def subscribe(self) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.SimpleQueue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def clear(self) -> None:
        with self._lock:
            self._log.clear()


Listener = Callable[[dict], None]
