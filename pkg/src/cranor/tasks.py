"""Asynchronous command queue with per-NS FIFO ordering, retries and idempotency.

Each network service gets its own strictly serial lane: at most one task of
an NS runs at a time, and tasks finish in enqueue order. Failed executions
are retried with exponential backoff up to max_attempts; a duplicated
idempotency key maps onto the already-enqueued task.
"""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import IllegalState, UnknownTask
from .infra import Command

RETRY_BASE_S = 2.0
RETRY_FACTOR = 2.0
DEFAULT_MAX_ATTEMPTS = 3

TASK_STATES = ("Queued", "Running", "Done", "Failed", "Cancelled")


def retry_delay(attempts_done: int, base: float = RETRY_BASE_S, factor: float = RETRY_FACTOR) -> float:
    """Backoff before retry number attempts_done+1: base * factor^(attempts_done-1)."""
    return base * factor ** (attempts_done - 1)


@dataclass
class Task:
    task_id: str
    ns_id: str
    command: Command
    idempotency_key: str
    state: str = "Queued"
    attempts: int = 0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    enqueued_at: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    not_before: float = 0.0
    last_detail: str = ""

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "ns_id": self.ns_id,
            "kind": self.command.kind,
            "state": self.state,
            "attempts": self.attempts,
            "max_attempts": self.max_attempts,
            "idempotency_key": self.idempotency_key,
            "enqueued_at": self.enqueued_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "detail": self.last_detail,
        }


class TaskQueue:
    """Per-NS FIFO lanes feeding the driver, one running task per lane.

    enqueue may be called from any thread; dispatch/complete run on the
    engine's single event-loop tick.
    """

    def __init__(self, max_attempts: int = DEFAULT_MAX_ATTEMPTS):
        self._lock = threading.Lock()
        self._tasks: dict[str, Task] = {}
        self._lanes: dict[str, deque[str]] = {}
        self._running: dict[str, str] = {}  # ns_id -> task_id
        self._by_idempotency: dict[str, str] = {}
        self._counter = 0
        self.max_attempts = max_attempts

    # -- producers ---------------------------------------------------------

    def enqueue(self, ns_id: str, command: Command, idempotency_key: str, now: float = 0.0) -> str:
        with self._lock:
            existing = self._by_idempotency.get(idempotency_key)
            if existing is not None:
                return existing
            self._counter += 1
            task = Task(
                task_id=f"task-{self._counter:05d}",
                ns_id=ns_id,
                command=command,
                idempotency_key=idempotency_key,
                max_attempts=self.max_attempts,
                enqueued_at=now,
            )
            self._tasks[task.task_id] = task
            self._lanes.setdefault(ns_id, deque()).append(task.task_id)
            self._by_idempotency[idempotency_key] = task.task_id
            return task.task_id

    # -- scheduler tick ------------------------------------------------------

    def dispatch(self, now: float) -> list[Task]:
        """Start the head task of every NS lane that has nothing running."""
        started: list[Task] = []
        with self._lock:
            for ns_id, lane in self._lanes.items():
                if ns_id in self._running:
                    continue
                while lane and self._tasks[lane[0]].state == "Cancelled":
                    lane.popleft()
                if not lane:
                    continue
                task = self._tasks[lane[0]]
                if task.not_before > now:
                    continue
                lane.popleft()
                task.state = "Running"
                task.attempts += 1
                task.started_at = now
                self._running[ns_id] = task.task_id
                started.append(task)
        return started

    def complete(self, task_id: str, ok: bool, now: float, detail: str = "") -> str:
        """Record the outcome of a Running task; returns the resulting state."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(f"task {task_id} not known")
            if task.state != "Running":
                raise IllegalState(f"task {task_id} is {task.state}, not Running")
            self._running.pop(task.ns_id, None)
            task.last_detail = detail
            if ok:
                task.state = "Done"
                task.finished_at = now
            elif task.attempts >= task.max_attempts:
                task.state = "Failed"
                task.finished_at = now
            else:
                # Back to the head of its lane so per-NS ordering is kept.
                task.state = "Queued"
                task.not_before = now + retry_delay(task.attempts)
                self._lanes.setdefault(task.ns_id, deque()).appendleft(task.task_id)
            return task.state

    def cancel_pending(self, ns_id: str) -> int:
        with self._lock:
            lane = self._lanes.get(ns_id)
            if not lane:
                return 0
            cancelled = 0
            for task_id in list(lane):
                task = self._tasks[task_id]
                if task.state == "Queued":
                    task.state = "Cancelled"
                    cancelled += 1
            lane.clear()
            return cancelled

    # -- queries ---------------------------------------------------------

    def get(self, task_id: str) -> Task:
        try:
            return self._tasks[task_id]
        except KeyError:
            raise UnknownTask(f"task {task_id} not known") from None

    def tasks(self, ns_id: Optional[str] = None) -> list[Task]:
        out = [t for t in self._tasks.values() if ns_id is None or t.ns_id == ns_id]
        return sorted(out, key=lambda t: t.task_id)

    def running(self, ns_id: str) -> Optional[Task]:
        task_id = self._running.get(ns_id)
        return self._tasks[task_id] if task_id else None

    def pending_count(self, ns_id: str) -> int:
        lane = self._lanes.get(ns_id, ())
        return sum(1 for tid in lane if self._tasks[tid].state == "Queued")

    def idle(self) -> bool:
        return not self._running and all(
            self._tasks[tid].state != "Queued" for lane in self._lanes.values() for tid in lane
        )
