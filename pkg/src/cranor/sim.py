"""Deterministic scenario engine.

A scenario is a virtual-time script: timed operator intents, a piecewise
cell-load profile, alarm rules, and (optionally) the catalog, inventory and
engine configuration it needs, so one JSON file can describe a whole
reproducible experiment. Running a scenario ticks the orchestrator clock
from 0 to duration_s and collects every event, metric trace and downtime
window into a JSON-serializable report. Identical inputs produce
byte-identical reports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .catalog import Catalog
from .errors import CranorError, ValidationFailed
from .infra import Inventory
from .monitor import AlarmRule, SeriesKey
from .orchestrator import Orchestrator, OrchestratorConfig, round_half_up

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LoadSegment:
    t_start: float
    t_end: float
    demand_from: float
    demand_to: float  # equal to demand_from for constant segments
    ns_id: Optional[str] = None  # None applies to every NS

    def value_at(self, t: float) -> float:
        if self.t_end == self.t_start:
            return self.demand_from
        frac = (t - self.t_start) / (self.t_end - self.t_start)
        return self.demand_from + (self.demand_to - self.demand_from) * frac

    @classmethod
    def from_dict(cls, d: dict) -> "LoadSegment":
        demand = d["demand_rbs"]
        if isinstance(demand, dict):
            lo, hi = float(demand["from"]), float(demand["to"])
        else:
            lo = hi = float(demand)
        return cls(
            t_start=float(d["t_start"]),
            t_end=float(d["t_end"]),
            demand_from=lo,
            demand_to=hi,
            ns_id=d.get("ns_id"),
        )

    def to_dict(self) -> dict:
        demand = (
            self.demand_from
            if self.demand_from == self.demand_to
            else {"from": self.demand_from, "to": self.demand_to}
        )
        out = {"t_start": self.t_start, "t_end": self.t_end, "demand_rbs": demand}
        if self.ns_id:
            out["ns_id"] = self.ns_id
        return out


@dataclass(frozen=True)
class TimedAction:
    t: float
    op: str  # deploy | terminate | reconfigure
    nsd: Optional[str] = None
    ns_id: Optional[str] = None
    target: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "TimedAction":
        return cls(
            t=float(d["t"]),
            op=d["op"],
            nsd=d.get("nsd"),
            ns_id=d.get("ns_id"),
            target=d.get("target"),
        )

    def to_dict(self) -> dict:
        out = {"t": self.t, "op": self.op}
        for k in ("nsd", "ns_id", "target"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


@dataclass
class Scenario:
    duration_s: float
    seed: int = 0
    tick_s: float = 1.0
    load_segments: list[LoadSegment] = field(default_factory=list)
    actions: list[TimedAction] = field(default_factory=list)
    # Optional embedded environment so one file is a full experiment.
    catalog: dict = field(default_factory=dict)
    inventory: Optional[dict] = None
    alarm_rules: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def validate(self) -> list[str]:
        out = []
        if self.duration_s <= 0:
            out.append("duration_s must be > 0")
        if self.tick_s <= 0:
            out.append("tick_s must be > 0")
        prev_end: dict = {}
        for seg in self.load_segments:
            if seg.t_start >= seg.t_end:
                out.append(f"load segment ({seg.t_start},{seg.t_end}) is empty or reversed")
            if seg.demand_from < 0 or seg.demand_to < 0:
                out.append("demand_rbs must be >= 0")
            # Segments for the same target must be ordered and disjoint;
            # different NSs may overlap freely.
            if prev_end.get(seg.ns_id) is not None and seg.t_start < prev_end[seg.ns_id]:
                out.append("load segments overlap or are out of order")
            prev_end[seg.ns_id] = seg.t_end
        for action in self.actions:
            if not (0 <= action.t <= self.duration_s):
                out.append(f"action at t={action.t} outside scenario duration")
            if action.op not in ("deploy", "terminate", "reconfigure"):
                out.append(f"unknown action op {action.op}")
            if action.op == "deploy" and not action.nsd:
                out.append("deploy action requires nsd")
            if action.op in ("terminate", "reconfigure") and not action.ns_id:
                out.append(f"{action.op} action requires ns_id")
            if action.op == "reconfigure" and not action.target:
                out.append("reconfigure action requires target")
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        scenario = cls(
            duration_s=float(d["duration_s"]),
            seed=int(d.get("seed", 0)),
            tick_s=float(d.get("tick_s", 1.0)),
            load_segments=[LoadSegment.from_dict(s) for s in d.get("load_segments", [])],
            actions=[TimedAction.from_dict(a) for a in d.get("actions", [])],
            catalog=d.get("catalog", {}),
            inventory=d.get("inventory"),
            alarm_rules=d.get("alarm_rules", []),
            config=d.get("config", {}),
        )
        problems = scenario.validate()
        if problems:
            raise ValidationFailed(problems)
        return scenario

    @classmethod
    def from_file(cls, path: str | Path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def offered_load(self, t: float, ns_id: Optional[str] = None) -> int:
        """Demand in whole resource blocks at time t (piecewise, ramps interpolate)."""
        value = 0.0
        for seg in self.load_segments:
            if seg.ns_id is not None and ns_id is not None and seg.ns_id != ns_id:
                continue
            if seg.t_start <= t <= seg.t_end:
                value = seg.value_at(t)
        return round_half_up(value)


class ScenarioRunner:
    """Drives one orchestrator through a scenario, one tick at a time."""

    def __init__(self, scenario: Scenario, orchestrator: Orchestrator):
        self.scenario = scenario
        self.orch = orchestrator
        self.orch.load_provider = lambda t, ns_id: float(scenario.offered_load(t, ns_id))
        token = scenario.config.get("webhook_token", self.orch.config.webhook_token)
        for rule_doc in scenario.alarm_rules:
            doc = dict(rule_doc)
            doc.setdefault("webhook_token", token)
            self.orch.add_alarm_rule(
                AlarmRule(
                    rule_id=doc["rule_id"],
                    selector=SeriesKey.from_dict(doc["selector"]),
                    predicate=doc["predicate"],
                    threshold=float(doc["threshold"]),
                    hold_s=float(doc.get("hold_s", 0.0)),
                    clear_hold_s=(
                        float(doc["clear_hold_s"]) if doc.get("clear_hold_s") is not None else None
                    ),
                    severity=doc.get("severity", "warning"),
                    webhook_token=doc["webhook_token"],
                )
            )
        self._pending = sorted(
            range(len(scenario.actions)), key=lambda i: (scenario.actions[i].t, i)
        )
        self._precheck_refs()

    def _precheck_refs(self) -> None:
        problems = []
        for action in self.scenario.actions:
            try:
                if action.op == "deploy":
                    self.orch.catalog.fetch_nsd_ref(action.nsd)
                elif action.op == "reconfigure":
                    self.orch.catalog.fetch_nsd_ref(action.target)
            except CranorError as exc:
                problems.append(str(exc))
        if problems:
            raise ValidationFailed(problems)

    @property
    def total_ticks(self) -> int:
        return int(round(self.scenario.duration_s / self.scenario.tick_s))

    @property
    def done(self) -> bool:
        return self.orch.now >= self.scenario.duration_s

    def step(self, n: int = 1) -> float:
        for _ in range(n):
            self._apply_due_actions()
            self.orch.tick()
        return self.orch.now

    def _apply_due_actions(self) -> None:
        now = self.orch.now
        while self._pending and self.scenario.actions[self._pending[0]].t <= now:
            action = self.scenario.actions[self._pending.pop(0)]
            try:
                if action.op == "deploy":
                    self.orch.deploy_ns(action.nsd, ns_id=action.ns_id)
                elif action.op == "terminate":
                    self.orch.terminate_ns(action.ns_id)
                elif action.op == "reconfigure":
                    self.orch.reconfigure_ns(action.ns_id, action.target)
            except CranorError as exc:
                # Runtime failures are part of the record, not a crash.
                self.orch.bus.emit(
                    "action_error", now, op=action.op, ns_id=action.ns_id or "", detail=str(exc)
                )

    def run(self) -> dict:
        while not self.done:
            self.step()
        return self.report()

    def report(self) -> dict:
        downtime = []
        for ns in self.orch.lifecycle.list_ns():
            for start, end in ns.downtime_log:
                downtime.append(
                    {"ns_id": ns.ns_id, "start": start, "end": end, "length_s": end - start}
                )
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "scenario": {
                "seed": self.scenario.seed,
                "tick_s": self.scenario.tick_s,
                "duration_s": self.scenario.duration_s,
            },
            "events": self.orch.bus.log(),
            "traces": self.orch.store.dump(),
            "downtime": downtime,
            "final": {
                "ns": [ns.to_dict() for ns in self.orch.lifecycle.list_ns()],
                "capacity": self.orch.driver.capacity_report(),
                "spectrum": [a.to_dict() for a in self.orch.rf.assignments()],
            },
        }


def build_orchestrator(
    scenario: Scenario,
    catalog: Optional[Catalog] = None,
    inventory: Optional[Inventory] = None,
) -> Orchestrator:
    """Materialize the environment a scenario needs, favoring embedded sections."""
    if catalog is None:
        catalog = Catalog()
    if scenario.catalog:
        catalog.load_dict(scenario.catalog)
    if scenario.inventory is not None:
        inventory = Inventory.from_dict(scenario.inventory)
    if inventory is None:
        raise ValidationFailed(["scenario embeds no inventory and none was supplied"])
    config = OrchestratorConfig(
        webhook_token=scenario.config.get("webhook_token", ""),
        durations=scenario.config.get("durations", {}),
        tick_s=scenario.tick_s,
    )
    baseline = scenario.config.get("baseline")
    if baseline:
        config.baseline = dict(baseline)
    return Orchestrator(catalog, inventory, config)


def run_scenario(
    scenario: Scenario,
    catalog: Optional[Catalog] = None,
    inventory: Optional[Inventory] = None,
) -> dict:
    """One-shot offline run: build the environment, tick to the end, report."""
    orch = build_orchestrator(scenario, catalog=catalog, inventory=inventory)
    runner = ScenarioRunner(scenario, orch)
    return runner.run()


def report_to_json(report: dict) -> str:
    """Canonical serialization; equal reports give equal bytes."""
    return json.dumps(report, sort_keys=True, separators=(",", ":"))
