"""Composition root: wires catalog, infra, RF pool, queue, monitor and lifecycle.

One Orchestrator instance is one management plane over one simulated
infrastructure. All state advances through tick(), which runs the fixed
per-tick sequence on a virtual clock:

    synthesize + ingest metrics -> evaluate alarms -> dispatch webhooks
    -> dispatch tasks -> apply due outcomes -> advance clock

Intents (deploy/terminate/reconfigure), inbound webhooks and metric writes
enter through the same lock that serializes ticks, so the engine is a single
logical writer no matter how many HTTP handlers call in.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .catalog import Catalog
from .errors import OutOfOrder
from .events import EventBus
from .infra import Inventory, SimulatedDriver
from .lifecycle import LifecycleEngine, NsInstance
from .monitor import (
    AlarmEvaluator,
    AlarmRule,
    MetricSample,
    MetricStore,
    SeriesKey,
    WebhookDispatcher,
)
from .rf import RfPool, bandwidth_to_rbs
from .tasks import TaskQueue

# Footprint of the management plane itself, charted when nothing else runs
# and used as the floor for NS-scope traces during a reconfiguration gap.
DEFAULT_BASELINE = {"cpu_pct": 1.0, "ram_mb": 800.0}
ORCHESTRATOR_NODE_ID = "orchestrator"


def round_half_up(x: float) -> int:
    """Resource blocks are indivisible; .5 rounds up."""
    return int(x + 0.5) if x >= 0 else -int(-x + 0.5)


@dataclass
class OrchestratorConfig:
    webhook_token: str = ""
    durations: dict = field(default_factory=dict)
    baseline: dict = field(default_factory=lambda: dict(DEFAULT_BASELINE))
    tick_s: float = 1.0


class Orchestrator:
    def __init__(self, catalog: Catalog, inventory: Inventory, config: Optional[OrchestratorConfig] = None):
        self.config = config or OrchestratorConfig()
        self.catalog = catalog
        self.inventory = inventory
        self.bus = EventBus()
        self.rf = RfPool(bands=inventory.bands, frontends=inventory.frontends)
        self.driver = SimulatedDriver(nodes=inventory.nodes, rf=self.rf)
        self.queue = TaskQueue()
        self.store = MetricStore()
        self.evaluator = AlarmEvaluator(self.store)
        self.now = 0.0
        self.lock = threading.RLock()
        self.lifecycle = LifecycleEngine(
            catalog=catalog,
            driver=self.driver,
            queue=self.queue,
            bus=self.bus,
            frontends=inventory.frontends,
            now_fn=lambda: self.now,
            webhook_token=self.config.webhook_token,
            durations=self.config.durations,
        )
        self.webhooks = WebhookDispatcher(self.lifecycle.handle_alarm)
        # Started tasks awaiting their simulated completion time.
        self._in_flight: list[tuple[float, object]] = []
        # Demand callable: t -> occupied-RB demand for a given NS.
        self.load_provider: Optional[Callable[[float, str], float]] = None

    # ------------------------------------------------------------------
    # intents (thread-safe entry points for API handlers)
    # ------------------------------------------------------------------

    def deploy_ns(self, nsd_ref: str, ns_id: Optional[str] = None) -> str:
        with self.lock:
            return self.lifecycle.deploy_ns(nsd_ref, ns_id)

    def terminate_ns(self, ns_id: str) -> None:
        with self.lock:
            self.lifecycle.terminate_ns(ns_id)

    def reconfigure_ns(self, ns_id: str, target_ref: str) -> None:
        with self.lock:
            self.lifecycle.reconfigure_ns(ns_id, target_ref)

    def handle_webhook(self, payload: dict) -> dict:
        with self.lock:
            return self.lifecycle.handle_alarm(payload)

    def ingest(self, sample: MetricSample) -> None:
        with self.lock:
            self.store.ingest(sample)

    def add_alarm_rule(self, rule: AlarmRule) -> None:
        with self.lock:
            self.evaluator.add_rule(rule)

    # ------------------------------------------------------------------
    # the tick
    # ------------------------------------------------------------------

    def tick(self, n: int = 1) -> float:
        """Advance the virtual clock by n ticks, running the full sequence each time."""
        for _ in range(n):
            with self.lock:
                self._tick_once()
        return self.now

    def _tick_once(self) -> None:
        t = self.now
        self._synthesize_metrics(t)
        for rule, transition in self.evaluator.evaluate_all(t):
            self.bus.emit(
                "alarm_state",
                transition.t,
                rule_id=rule.rule_id,
                **{"from": transition.frm, "to": transition.to},
                value=transition.value,
            )
            if transition.to == "Firing":
                self.webhooks.dispatch(rule, transition)
        for task in self.queue.dispatch(t):
            self.bus.emit(
                "task_state", t, ns_id=task.ns_id, task_id=task.task_id,
                state="Running", command=task.command.kind,
            )
            self._in_flight.append((t + task.command.duration_s, task))
        self._apply_due_outcomes(t)
        self.now = t + self.config.tick_s

    def _apply_due_outcomes(self, t: float) -> None:
        due = [item for item in self._in_flight if item[0] <= t]
        if not due:
            return
        self._in_flight = [item for item in self._in_flight if item[0] > t]
        due.sort(key=lambda item: (item[0], item[1].task_id))
        for _due_t, task in due:
            outcome = self.driver.apply(task.command, issued_at=task.started_at)
            state = self.queue.complete(task.task_id, outcome.ok, now=outcome.completed_at, detail=outcome.detail)
            self.bus.emit(
                "task_state", outcome.completed_at, ns_id=task.ns_id, task_id=task.task_id,
                state=state, command=task.command.kind, detail=outcome.detail,
            )
            self.lifecycle.apply_outcome(task, outcome, state)

    # ------------------------------------------------------------------
    # metric synthesis
    # ------------------------------------------------------------------

    def _synthesize_metrics(self, t: float) -> None:
        baseline_cpu = float(self.config.baseline.get("cpu_pct", DEFAULT_BASELINE["cpu_pct"]))
        baseline_ram = float(self.config.baseline.get("ram_mb", DEFAULT_BASELINE["ram_mb"]))
        self._ingest_quiet(SeriesKey("node", ORCHESTRATOR_NODE_ID, "cpu_pct"), t, baseline_cpu)
        self._ingest_quiet(SeriesKey("node", ORCHESTRATOR_NODE_ID, "ram_mb"), t, baseline_ram)

        for ns in self.lifecycle.live_ns():
            demand = 0.0
            if self.load_provider is not None:
                demand = self.load_provider(t, ns.ns_id)
            self._synthesize_ns(ns, demand, t, baseline_cpu, baseline_ram)

    def _synthesize_ns(
        self, ns: NsInstance, demand_rbs: float, t: float, baseline_cpu: float, baseline_ram: float
    ) -> None:
        """Emit one tick of series for an NS from its current instance states.

        The NS-scope cpu/ram series track the serving eNB instances (the
        cell's monitored footprint); every active member additionally
        reports its own vnf-scope series. With no active eNB the NS-scope
        values sit at the management-plane baseline and rb counters are 0.
        """
        demand = round_half_up(demand_rbs)
        active_enbs = [i for i in ns.active_instances() if i.role == "enb"]
        capacity = sum(
            bandwidth_to_rbs(i.radio_profile.bandwidth_mhz) for i in active_enbs
        )
        occupied = min(demand, capacity)

        if active_enbs:
            cpu = sum(
                i.metric_model.cpu_base_pct + i.metric_model.cpu_per_rb_pct * occupied
                for i in active_enbs
            )
            ram = sum(i.metric_model.ram_fixed_mb for i in active_enbs)
        else:
            cpu, ram = baseline_cpu, baseline_ram

        nominal = self._nominal_link_quality(ns)

        ns_id = ns.ns_id
        self._ingest_quiet(SeriesKey("ns", ns_id, "rb_capacity"), t, float(capacity))
        self._ingest_quiet(SeriesKey("ns", ns_id, "rb_occupied"), t, float(occupied))
        self._ingest_quiet(SeriesKey("ns", ns_id, "load_demand_rbs"), t, float(demand))
        self._ingest_quiet(SeriesKey("ns", ns_id, "cpu_pct"), t, cpu)
        self._ingest_quiet(SeriesKey("ns", ns_id, "ram_mb"), t, ram)
        self._ingest_quiet(SeriesKey("ns", ns_id, "bler"), t, nominal[0])
        self._ingest_quiet(SeriesKey("ns", ns_id, "snr_db"), t, nominal[1])

        for inst in ns.active_instances():
            rb = occupied if inst.role == "enb" else 0
            self._ingest_quiet(
                SeriesKey("vnf", inst.vnf_id, "cpu_pct"),
                t,
                inst.metric_model.cpu_base_pct + inst.metric_model.cpu_per_rb_pct * rb,
            )
            self._ingest_quiet(
                SeriesKey("vnf", inst.vnf_id, "ram_mb"), t, inst.metric_model.ram_fixed_mb
            )

    def _nominal_link_quality(self, ns: NsInstance) -> tuple[float, float]:
        # The simulated channel never changes, so link quality stays at the
        # eNB profile's nominal constants straight through a reconfiguration.
        for inst in ns.vnf_instances:
            if inst.role == "enb":
                return inst.metric_model.bler_nominal, inst.metric_model.snr_nominal_db
        return 0.0, 30.0

    def _ingest_quiet(self, key: SeriesKey, t: float, value: float) -> None:
        try:
            self.store.ingest(MetricSample(key, t, value))
        except OutOfOrder:
            pass

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def idle(self) -> bool:
        return not self._in_flight and self.queue.idle()

    def run_until_idle(self, max_ticks: int = 10_000) -> float:
        for _ in range(max_ticks):
            if self.idle():
                return self.now
            self.tick()
        raise RuntimeError("engine did not quiesce")
