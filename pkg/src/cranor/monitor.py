"""Metric ingestion, threshold-with-hold alarm evaluation, webhook dispatch.

The store keeps one append-only array per series with strictly increasing
timestamps; range queries are binary-searched. Alarm rules are small state
machines (Clear -> Pending -> Firing -> Clear): a rule starts Pending at the
first breaching sample, fires once the predicate has held for hold_s, and
clears after the predicate has been false for clear_hold_s. Firing emits
exactly one webhook carrying the credential token.
"""
from __future__ import annotations

import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import OutOfOrder, ValidationFailed

SCOPES = ("ns", "vnf", "node")
METRICS = ("cpu_pct", "ram_mb", "bler", "snr_db", "rb_occupied", "rb_capacity", "load_demand_rbs")

# Which metric may appear at which scope. Resource-block counters only make
# sense for a whole cell, so they are NS-scoped.
SCOPE_MATRIX = {
    "cpu_pct": ("ns", "vnf", "node"),
    "ram_mb": ("ns", "vnf", "node"),
    "bler": ("ns", "vnf"),
    "snr_db": ("ns", "vnf"),
    "rb_occupied": ("ns",),
    "rb_capacity": ("ns",),
    "load_demand_rbs": ("ns",),
}

PREDICATES = ("gt", "lt")
ALARM_STATES = ("Clear", "Pending", "Firing")


@dataclass(frozen=True)
class SeriesKey:
    scope: str
    scope_id: str
    metric: str

    def violations(self) -> list[str]:
        out = []
        if self.scope not in SCOPES:
            out.append(f"scope must be one of {SCOPES}")
        if self.metric not in METRICS:
            out.append(f"metric must be one of {METRICS}")
        elif self.scope in SCOPES and self.scope not in SCOPE_MATRIX[self.metric]:
            out.append(f"metric {self.metric} not defined at scope {self.scope}")
        return out

    @property
    def path(self) -> str:
        return f"{self.scope}/{self.scope_id}/{self.metric}"

    def to_dict(self) -> dict:
        return {"scope": self.scope, "scope_id": self.scope_id, "metric": self.metric}

    @classmethod
    def from_dict(cls, d: dict) -> "SeriesKey":
        return cls(scope=d["scope"], scope_id=d["scope_id"], metric=d["metric"])


@dataclass(frozen=True)
class MetricSample:
    key: SeriesKey
    t: float
    value: float


class MetricStore:
    """Append-only per-series storage with strictly increasing timestamps."""

    def __init__(self):
        self._lock = threading.Lock()
        self._series: dict[SeriesKey, tuple[list[float], list[float]]] = {}

    def ingest(self, sample: MetricSample) -> None:
        bad = sample.key.violations()
        if bad:
            raise ValidationFailed(bad)
        with self._lock:
            ts, vs = self._series.setdefault(sample.key, ([], []))
            if ts and sample.t <= ts[-1]:
                raise OutOfOrder(
                    f"sample at t={sample.t} not newer than last t={ts[-1]} for {sample.key.path}"
                )
            ts.append(sample.t)
            vs.append(sample.value)

    def query_range(self, key: SeriesKey, t0: float, t1: float) -> list[tuple[float, float]]:
        if t0 > t1:
            raise ValueError("t0 must be <= t1")
        with self._lock:
            series = self._series.get(key)
            if not series:
                return []
            ts, vs = series
            lo = bisect_left(ts, t0)
            hi = bisect_right(ts, t1)
            return list(zip(ts[lo:hi], vs[lo:hi]))

    def latest(self, key: SeriesKey) -> Optional[tuple[float, float]]:
        with self._lock:
            series = self._series.get(key)
            if not series or not series[0]:
                return None
            return series[0][-1], series[1][-1]

    def since(self, key: SeriesKey, t_exclusive: float) -> list[tuple[float, float]]:
        with self._lock:
            series = self._series.get(key)
            if not series:
                return []
            ts, vs = series
            lo = bisect_right(ts, t_exclusive)
            return list(zip(ts[lo:], vs[lo:]))

    def keys(self) -> list[SeriesKey]:
        with self._lock:
            return sorted(self._series, key=lambda k: k.path)

    def dump(self) -> dict[str, list[list[float]]]:
        with self._lock:
            return {
                key.path: [[t, v] for t, v in zip(ts, vs)]
                for key, (ts, vs) in sorted(self._series.items(), key=lambda kv: kv[0].path)
            }


@dataclass
class AlarmRule:
    rule_id: str
    selector: SeriesKey
    predicate: str  # gt | lt
    threshold: float
    hold_s: float = 0.0
    clear_hold_s: Optional[float] = None  # defaults to hold_s (symmetric hysteresis)
    severity: str = "warning"
    webhook_token: str = ""
    state: str = "Clear"
    breach_since: Optional[float] = None
    clear_since: Optional[float] = None
    last_seen_t: Optional[float] = None
    fired_count: int = 0

    def __post_init__(self):
        if self.hold_s < 0:
            raise ValueError("hold_s must be >= 0")
        if self.clear_hold_s is None:
            self.clear_hold_s = self.hold_s
        if self.predicate not in PREDICATES:
            raise ValueError(f"predicate must be one of {PREDICATES}")

    def breaches(self, value: float) -> bool:
        return value > self.threshold if self.predicate == "gt" else value < self.threshold

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "selector": self.selector.to_dict(),
            "predicate": self.predicate,
            "threshold": self.threshold,
            "hold_s": self.hold_s,
            "clear_hold_s": self.clear_hold_s,
            "severity": self.severity,
            "webhook_token": self.webhook_token,
            "state": self.state,
            "breach_since": self.breach_since,
            "clear_since": self.clear_since,
            "last_seen_t": self.last_seen_t,
            "fired_count": self.fired_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlarmRule":
        rule = cls(
            rule_id=d["rule_id"],
            selector=SeriesKey.from_dict(d["selector"]),
            predicate=d["predicate"],
            threshold=float(d["threshold"]),
            hold_s=float(d.get("hold_s", 0.0)),
            clear_hold_s=float(d["clear_hold_s"]) if d.get("clear_hold_s") is not None else None,
            severity=d.get("severity", "warning"),
            webhook_token=d.get("webhook_token", ""),
        )
        rule.state = d.get("state", "Clear")
        rule.breach_since = d.get("breach_since")
        rule.clear_since = d.get("clear_since")
        rule.last_seen_t = d.get("last_seen_t")
        rule.fired_count = int(d.get("fired_count", 0))
        return rule


@dataclass(frozen=True)
class Transition:
    rule_id: str
    frm: str
    to: str
    t: float
    value: float


def webhook_payload(rule: AlarmRule, transition: Transition) -> dict:
    """The exact JSON contract delivered on a Firing transition."""
    return {
        "rule_id": rule.rule_id,
        "series": {
            "scope": rule.selector.scope,
            "scope_id": rule.selector.scope_id,
            "metric": rule.selector.metric,
        },
        "value": transition.value,
        "state": "firing",
        "t": transition.t,
        "token": rule.webhook_token,
    }


class AlarmEvaluator:
    """Periodic evaluation of alarm rules over the metric store."""

    def __init__(self, store: MetricStore):
        self.store = store
        self.rules: dict[str, AlarmRule] = {}

    def add_rule(self, rule: AlarmRule) -> None:
        bad = rule.selector.violations()
        if bad:
            raise ValidationFailed(bad)
        if rule.rule_id in self.rules:
            raise ValidationFailed([f"duplicate alarm rule {rule.rule_id}"])
        self.rules[rule.rule_id] = rule

    def evaluate(self, rule: AlarmRule, now: float) -> list[Transition]:
        """Advance one rule's state machine over samples not yet seen.

        Between samples the last observed value is carried forward, so a
        Pending rule may fire on a quiet series once hold_s has elapsed.
        """
        transitions: list[Transition] = []
        last_t = rule.last_seen_t if rule.last_seen_t is not None else float("-inf")
        fresh = self.store.since(rule.selector, last_t)
        for t, value in fresh:
            if t > now:
                break
            rule.last_seen_t = t
            self._step(rule, t, value, transitions)
        # Carry-forward promotion between samples.
        if rule.state == "Pending" and rule.breach_since is not None:
            if now - rule.breach_since >= rule.hold_s:
                self._fire(rule, now, self._last_value(rule), transitions)
        elif rule.state == "Firing" and rule.clear_since is not None:
            if now - rule.clear_since >= rule.clear_hold_s:
                self._clear(rule, now, self._last_value(rule), transitions)
        return transitions

    def evaluate_all(self, now: float) -> list[tuple[AlarmRule, Transition]]:
        out = []
        for rule_id in sorted(self.rules):
            rule = self.rules[rule_id]
            for transition in self.evaluate(rule, now):
                out.append((rule, transition))
        return out

    def _last_value(self, rule: AlarmRule) -> float:
        latest = self.store.latest(rule.selector)
        return latest[1] if latest else float("nan")

    def _step(self, rule: AlarmRule, t: float, value: float, transitions: list[Transition]) -> None:
        breaching = rule.breaches(value)
        if rule.state == "Clear":
            if breaching:
                rule.state = "Pending"
                rule.breach_since = t
                transitions.append(Transition(rule.rule_id, "Clear", "Pending", t, value))
                if t - rule.breach_since >= rule.hold_s:  # hold_s == 0
                    self._fire(rule, t, value, transitions)
        elif rule.state == "Pending":
            if not breaching:
                rule.state = "Clear"
                rule.breach_since = None
                transitions.append(Transition(rule.rule_id, "Pending", "Clear", t, value))
            elif t - rule.breach_since >= rule.hold_s:
                self._fire(rule, t, value, transitions)
        elif rule.state == "Firing":
            if breaching:
                rule.clear_since = None
            else:
                if rule.clear_since is None:
                    rule.clear_since = t
                if t - rule.clear_since >= rule.clear_hold_s:
                    self._clear(rule, t, value, transitions)

    def _fire(self, rule: AlarmRule, t: float, value: float, transitions: list[Transition]) -> None:
        frm = rule.state
        rule.state = "Firing"
        rule.clear_since = None
        rule.fired_count += 1
        transitions.append(Transition(rule.rule_id, frm, "Firing", t, value))

    def _clear(self, rule: AlarmRule, t: float, value: float, transitions: list[Transition]) -> None:
        frm = rule.state
        rule.state = "Clear"
        rule.breach_since = None
        rule.clear_since = None
        transitions.append(Transition(rule.rule_id, frm, "Clear", t, value))


@dataclass
class DeliveryRecord:
    rule_id: str
    t: float
    target: str
    disposition: str  # delivered | suppressed:<reason> | error:<detail>
    attempts: int
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "t": self.t,
            "target": self.target,
            "disposition": self.disposition,
            "attempts": self.attempts,
        }


class WebhookDispatcher:
    """Delivers Firing payloads to a callback; one retry on delivery failure.

    The in-process target is the lifecycle engine's alarm handler; an HTTP
    target can be swapped in without touching the evaluator.
    """

    def __init__(self, target: Callable[[dict], dict], target_name: str = "lifecycle"):
        self.target = target
        self.target_name = target_name
        self.deliveries: list[DeliveryRecord] = []

    def dispatch(self, rule: AlarmRule, transition: Transition) -> DeliveryRecord:
        payload = webhook_payload(rule, transition)
        attempts = 0
        disposition = ""
        for attempts in (1, 2):
            try:
                decision = self.target(payload)
                outcome = decision.get("decision", "delivered")
                reason = decision.get("reason")
                disposition = outcome if not reason else f"{outcome}:{reason}"
                break
            except Exception as exc:  # delivery failure, retry once
                disposition = f"error:{exc}"
        record = DeliveryRecord(
            rule_id=rule.rule_id,
            t=transition.t,
            target=self.target_name,
            disposition=disposition,
            attempts=attempts,
            payload=payload,
        )
        self.deliveries.append(record)
        return record
