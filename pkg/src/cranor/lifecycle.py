"""Network-service lifecycle engine.

Owns the NS/VNF state machines and turns intents (deploy, reconfigure,
terminate) and authenticated alarm events into ordered task plans. Task
outcomes flow back through apply_outcome, which is the single place where
NS/VNF state advances. Reconfiguration is stop-and-redeploy: the old chain
is fully torn down and its resources freed before the replacement is built,
so a downtime window with strictly positive length is inherent to the
strategy and is recorded per reconfiguration.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .catalog import Catalog, Flavor, MetricModel, NsDescriptor, RadioProfile
from .errors import IllegalState, Infeasible, NotFound, ValidationFailed
from .events import EventBus
from .infra import Command, Outcome, RfFrontend, SimulatedDriver, duration_for, place
from .rf import bandwidth_to_hz
from .tasks import Task, TaskQueue

NS_STATES = ("Defined", "Deploying", "Running", "Reconfiguring", "Terminating", "Terminated", "Error")
VNF_STATES = ("Pending", "Building", "Active", "Stopping", "Stopped", "Failed")

# Legal NS transition graph. Error is reachable from every non-terminal
# state; Terminating is reachable from Error so operators can clean up.
ALLOWED_NS_TRANSITIONS: dict[str, set[str]] = {
    "Defined": {"Deploying", "Error"},
    "Deploying": {"Running", "Terminating", "Error"},
    "Running": {"Reconfiguring", "Terminating", "Error"},
    "Reconfiguring": {"Running", "Error"},
    "Error": {"Terminating"},
    "Terminating": {"Terminated", "Error"},
    "Terminated": set(),
}

ALLOWED_VNF_TRANSITIONS: dict[str, set[str]] = {
    "Pending": {"Building", "Stopped", "Failed"},
    "Building": {"Active", "Stopped", "Failed"},
    "Active": {"Stopping", "Stopped", "Failed"},
    "Stopping": {"Stopped", "Failed"},
    "Stopped": set(),
    "Failed": set(),
}


@dataclass
class VnfInstance:
    vnf_id: str
    member_id: str
    vnfd_ref: str
    flavor: Flavor
    metric_model: MetricModel
    radio_profile: Optional[RadioProfile] = None
    state: str = "Pending"
    node_id: Optional[str] = None
    allocated: bool = False

    @property
    def role(self) -> Optional[str]:
        return self.radio_profile.role if self.radio_profile else None

    def to_dict(self) -> dict:
        return {
            "vnf_id": self.vnf_id,
            "member_id": self.member_id,
            "vnfd_ref": self.vnfd_ref,
            "state": self.state,
            "node_id": self.node_id,
            "allocated": self.allocated,
            "flavor": self.flavor.to_dict(),
            "metric_model": self.metric_model.to_dict(),
            "radio_profile": self.radio_profile.to_dict() if self.radio_profile else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VnfInstance":
        rp = d.get("radio_profile")
        inst = cls(
            vnf_id=d["vnf_id"],
            member_id=d["member_id"],
            vnfd_ref=d["vnfd_ref"],
            flavor=Flavor.from_dict(d["flavor"]),
            metric_model=MetricModel.from_dict(d["metric_model"]),
            radio_profile=RadioProfile.from_dict(rp) if rp else None,
        )
        inst.state = d["state"]
        inst.node_id = d.get("node_id")
        inst.allocated = bool(d.get("allocated", False))
        return inst


@dataclass
class AlarmEvent:
    rule_id: str
    scope: str
    scope_id: str
    metric: str
    value: float
    fired_at: float
    token: str

    @classmethod
    def from_webhook(cls, payload: dict) -> "AlarmEvent":
        series = payload.get("series", {})
        return cls(
            rule_id=payload.get("rule_id", ""),
            scope=series.get("scope", ""),
            scope_id=series.get("scope_id", ""),
            metric=series.get("metric", ""),
            value=float(payload.get("value", 0.0)),
            fired_at=float(payload.get("t", 0.0)),
            token=payload.get("token", ""),
        )


@dataclass
class NsInstance:
    ns_id: str
    nsd: NsDescriptor
    state: str = "Defined"
    vnf_instances: list[VnfInstance] = field(default_factory=list)
    carrier_refs: list[str] = field(default_factory=list)
    created_at: float = 0.0
    state_changed_at: float = 0.0
    downtime_log: list[tuple[float, float]] = field(default_factory=list)
    error_reason: str = ""
    # plan-tracking internals; rebuilt from scratch on every intent
    phase: Optional[str] = None  # deploy | teardown:* | build:reconfigure | teardown_wait:*
    pending_task_ids: set[str] = field(default_factory=set)
    links_established: list[tuple[str, str, str]] = field(default_factory=list)
    reconfigure_target: Optional[str] = None
    downtime_open: Optional[float] = None
    generation: int = 0

    @property
    def nsd_ref(self) -> str:
        return self.nsd.ref

    def instance(self, vnf_id: str) -> Optional[VnfInstance]:
        for inst in self.vnf_instances:
            if inst.vnf_id == vnf_id:
                return inst
        return None

    def active_instances(self) -> list[VnfInstance]:
        return [i for i in self.vnf_instances if i.state == "Active"]

    def enb_instances(self) -> list[VnfInstance]:
        return [i for i in self.vnf_instances if i.role == "enb"]

    def to_dict(self) -> dict:
        return {
            "ns_id": self.ns_id,
            "nsd_ref": self.nsd_ref,
            "state": self.state,
            "vnf_instances": [v.to_dict() for v in self.vnf_instances],
            "carrier_refs": list(self.carrier_refs),
            "created_at": self.created_at,
            "state_changed_at": self.state_changed_at,
            "downtime_log": [list(w) for w in self.downtime_log],
            "error_reason": self.error_reason,
        }


class LifecycleEngine:
    """Single writer of NS/VNF state; all mutations run on the engine's event path."""

    def __init__(
        self,
        catalog: Catalog,
        driver: SimulatedDriver,
        queue: TaskQueue,
        bus: EventBus,
        frontends: list[RfFrontend],
        now_fn: Callable[[], float],
        webhook_token: str = "",
        durations: Optional[dict] = None,
    ):
        self.catalog = catalog
        self.driver = driver
        self.queue = queue
        self.bus = bus
        self.frontends = sorted(frontends, key=lambda f: f.frontend_id)
        self.now = now_fn
        self.webhook_token = webhook_token
        self.durations = durations or {}
        self._instances: dict[str, NsInstance] = {}
        self._task_ns: dict[str, str] = {}
        self._ns_counter = 0
        self._cmd_counter = 0
        self._last_trigger: dict[tuple[str, str], float] = {}
        self._lock = threading.RLock()

    # ------------------------------------------------------------------
    # intents
    # ------------------------------------------------------------------

    def deploy_ns(self, nsd_ref: str, ns_id: Optional[str] = None) -> str:
        with self._lock:
            nsd = self.catalog.fetch_nsd_ref(nsd_ref)
            if ns_id is None:
                self._ns_counter += 1
                ns_id = f"ns-{self._ns_counter:04d}"
            if ns_id in self._instances:
                raise ValidationFailed([f"ns_id {ns_id} already in use"])
            now = self.now()
            ns = NsInstance(ns_id=ns_id, nsd=nsd, created_at=now, state_changed_at=now)
            self._instances[ns_id] = ns
            self._transition(ns, "Deploying", reason="deploy")
            self._plan_build(ns, phase="deploy")
            return ns_id

    def terminate_ns(self, ns_id: str) -> None:
        with self._lock:
            ns = self.get_ns(ns_id)
            if ns.state not in ("Running", "Error", "Deploying"):
                raise IllegalState(f"cannot terminate NS in state {ns.state}")
            self.queue.cancel_pending(ns_id)
            ns.pending_task_ids.clear()
            self._transition(ns, "Terminating", reason="terminate")
            if self.queue.running(ns_id) is None:
                self._plan_teardown(ns, phase="teardown:terminate")
            else:
                # An in-flight command may still materialize state; plan the
                # teardown once it lands so nothing is missed.
                ns.phase = "teardown_wait:terminate"

    def reconfigure_ns(self, ns_id: str, target_nsd_ref: str) -> None:
        with self._lock:
            ns = self.get_ns(ns_id)
            if ns.state != "Running":
                raise IllegalState(f"cannot reconfigure NS in state {ns.state}")
            target = self.catalog.fetch_nsd_ref(target_nsd_ref)
            if target.ref == ns.nsd_ref:
                raise ValidationFailed(["reconfigure target equals current NSD"])
            ns.reconfigure_target = target.ref
            self._transition(ns, "Reconfiguring", reason=f"reconfigure to {target.ref}")
            self._plan_teardown(ns, phase="teardown:reconfigure")

    # ------------------------------------------------------------------
    # alarm handling
    # ------------------------------------------------------------------

    def handle_alarm(self, payload: dict) -> dict:
        """Decide on an authenticated alarm event; every path yields a decision record."""
        with self._lock:
            event = AlarmEvent.from_webhook(payload)
            now = self.now()

            def decision(outcome: str, reason: str = "", action: str = "", ns_id: str = "") -> dict:
                record = {
                    "decision": outcome,
                    "reason": reason,
                    "action": action,
                    "ns_id": ns_id,
                    "rule_id": event.rule_id,
                }
                self.bus.emit("decision", now, **record)
                return record

            if event.token != self.webhook_token:
                return decision("suppressed", reason="unauthorized")
            ns = self._instances.get(event.scope_id) if event.scope == "ns" else None
            if ns is None:
                return decision("suppressed", reason="no matching ns")
            policy = next(
                (p for p in ns.nsd.policies if p.alarm_rule_ref == event.rule_id), None
            )
            if policy is None:
                return decision("suppressed", reason="no matching policy", ns_id=ns.ns_id)
            last = self._last_trigger.get((ns.ns_id, policy.rule_id))
            if last is not None and now - last < policy.cooldown_s:
                return decision("suppressed", reason="cooldown", ns_id=ns.ns_id)
            if ns.state != "Running":
                return decision("suppressed", reason="illegal state", ns_id=ns.ns_id)

            self._last_trigger[(ns.ns_id, policy.rule_id)] = now
            if policy.action == "notify_only":
                return decision("triggered", action="notify_only", ns_id=ns.ns_id)
            self.reconfigure_ns(ns.ns_id, policy.target)
            return decision(
                "triggered", action=f"reconfigure_to {policy.target}", ns_id=ns.ns_id
            )

    # ------------------------------------------------------------------
    # outcome application
    # ------------------------------------------------------------------

    def apply_outcome(self, task: Task, outcome: Outcome, task_state: str) -> None:
        """Advance NS/VNF state for one completed task execution.

        task_state is the queue's verdict: Done applies effects, Queued means
        a retry is scheduled (no state change yet), Failed drives the NS to
        Error.
        """
        with self._lock:
            ns_id = self._task_ns.get(task.task_id)
            if ns_id is None or ns_id not in self._instances:
                raise NotFound(f"task {task.task_id} does not belong to a known NS")
            ns = self._instances[ns_id]

            if task_state == "Queued":
                return
            if task_state == "Failed":
                self._on_task_failed(ns, task, outcome)
                return

            cmd = task.command
            if cmd.kind == "allocate_compute":
                inst = ns.instance(cmd.vnf_id)
                if inst:
                    inst.node_id = cmd.node_id
                    inst.allocated = True
                    self._vnf_transition(ns, inst, "Building", outcome.completed_at)
            elif cmd.kind == "boot_vnf":
                inst = ns.instance(cmd.vnf_id)
                if inst:
                    self._vnf_transition(ns, inst, "Active", outcome.completed_at)
                    self._maybe_close_downtime(ns, outcome.completed_at)
            elif cmd.kind == "stop_vnf":
                inst = ns.instance(cmd.vnf_id)
                if inst:
                    self._vnf_transition(ns, inst, "Stopped", outcome.completed_at)
                    self._maybe_open_downtime(ns, outcome.completed_at)
            elif cmd.kind == "free_compute":
                inst = ns.instance(cmd.vnf_id)
                if inst:
                    inst.allocated = False
            elif cmd.kind == "assign_carrier":
                assignment = outcome.data.get("assignment", {})
                if assignment.get("assignment_id"):
                    ns.carrier_refs.append(assignment["assignment_id"])
                self.bus.emit(
                    "carrier_assigned",
                    outcome.completed_at,
                    ns_id=ns.ns_id,
                    **assignment,
                )
            elif cmd.kind == "release_carrier":
                released = outcome.data.get("assignment", {})
                if cmd.assignment_id in ns.carrier_refs:
                    ns.carrier_refs.remove(cmd.assignment_id)
                self.bus.emit(
                    "carrier_released",
                    outcome.completed_at,
                    ns_id=ns.ns_id,
                    **released,
                )
            elif cmd.kind == "link_vnfs":
                ns.links_established.append(
                    (cmd.link["a_vnf"], cmd.link["b_vnf"], cmd.link.get("link_kind", "ip"))
                )
            elif cmd.kind == "unlink_vnfs":
                ns.links_established = [
                    l
                    for l in ns.links_established
                    if {l[0], l[1]} != {cmd.link["a_vnf"], cmd.link["b_vnf"]}
                ]

            ns.pending_task_ids.discard(task.task_id)
            self._advance_phase(ns, outcome)

    def _on_task_failed(self, ns: NsInstance, task: Task, outcome: Outcome) -> None:
        cmd = task.command
        if cmd.vnf_id:
            inst = ns.instance(cmd.vnf_id)
            if inst and inst.state not in ("Stopped", "Failed"):
                self._vnf_transition(ns, inst, "Failed", outcome.completed_at)
        self.queue.cancel_pending(ns.ns_id)
        ns.pending_task_ids.clear()
        if ns.state != "Error":
            self._transition(
                ns, "Error", reason=f"task {task.task_id} ({cmd.kind}) failed: {outcome.detail}"
            )

    def _advance_phase(self, ns: NsInstance, outcome: Outcome) -> None:
        if ns.phase and ns.phase.startswith("teardown_wait") and self.queue.running(ns.ns_id) is None:
            ns.pending_task_ids.clear()
            self._plan_teardown(ns, phase="teardown:" + ns.phase.split(":", 1)[1])
            return
        if ns.pending_task_ids or ns.phase is None:
            return
        phase, ns.phase = ns.phase, None
        if phase == "deploy":
            self._transition(ns, "Running", reason="deploy complete")
        elif phase == "teardown:terminate":
            self._transition(ns, "Terminated", reason="teardown complete")
        elif phase == "teardown:reconfigure":
            self._plan_build_for_reconfigure(ns)
        elif phase == "build:reconfigure":
            ns.nsd = self.catalog.fetch_nsd_ref(ns.reconfigure_target)
            ns.reconfigure_target = None
            self._transition(ns, "Running", reason="reconfiguration complete")

    # ------------------------------------------------------------------
    # planning
    # ------------------------------------------------------------------

    def _plan_build(self, ns: NsInstance, phase: str) -> None:
        """Expand a build plan: allocate per member, carrier if needed, boot, link."""
        nsd = ns.nsd if phase == "deploy" else self.catalog.fetch_nsd_ref(ns.reconfigure_target)
        ns.generation += 1

        instances: list[VnfInstance] = []
        for member in nsd.members:
            vnfd = self.catalog.fetch_vnfd_ref(member.vnfd_ref)
            for replica in range(member.replicas):
                suffix = f"-{replica}" if member.replicas > 1 else ""
                instances.append(
                    VnfInstance(
                        vnf_id=f"{ns.ns_id}.g{ns.generation}.{member.member_id}{suffix}",
                        member_id=member.member_id,
                        vnfd_ref=vnfd.ref,
                        flavor=vnfd.flavor,
                        metric_model=vnfd.metric_model,
                        radio_profile=vnfd.radio_profile,
                    )
                )

        try:
            mapping = place([i.flavor for i in instances], list(self.driver.nodes.values()))
        except Infeasible as exc:
            self._transition(ns, "Error", reason=f"infeasible placement: {exc}")
            return

        carrier_plans: list[tuple[VnfInstance, dict]] = []
        if nsd.requires_frontend:
            picked: set[str] = set()
            busy = {a.frontend_id for a in self.driver.rf.assignments()}
            for inst in instances:
                if inst.role != "enb":
                    continue
                bw_hz = bandwidth_to_hz(inst.radio_profile.bandwidth_mhz)
                usable = [
                    f
                    for f in self.frontends
                    if f.max_bw_hz >= bw_hz and f.frontend_id not in picked
                ]
                if not usable:
                    self._transition(
                        ns, "Error", reason=f"no usable RF frontend for {bw_hz} Hz"
                    )
                    return
                free = [f for f in usable if f.frontend_id not in busy]
                frontend = (free or usable)[0]
                picked.add(frontend.frontend_id)
                carrier_plans.append(
                    (inst, {"frontend_id": frontend.frontend_id, "bw_hz": bw_hz})
                )

        ns.vnf_instances = instances
        for inst in instances:
            self._emit_vnf_state(ns, inst, None, "Pending")
        ns.links_established = []
        ns.phase = phase if phase == "deploy" else "build:reconfigure"
        ns.pending_task_ids.clear()

        for idx, inst in enumerate(instances):
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="allocate_compute",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("allocate_compute", self.durations),
                    vnf_id=inst.vnf_id,
                    node_id=mapping[idx],
                    flavor=inst.flavor,
                ),
            )
        for _inst, carrier in carrier_plans:
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="assign_carrier",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("assign_carrier", self.durations),
                    carrier=carrier,
                ),
            )
        for inst in instances:
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="boot_vnf",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("boot_vnf", self.durations),
                    vnf_id=inst.vnf_id,
                ),
            )
        by_member = {}
        for inst in instances:
            by_member.setdefault(inst.member_id, inst)
        for link in nsd.links:
            a = by_member.get(link.a)
            b = by_member.get(link.b)
            if a is None or b is None:
                continue
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="link_vnfs",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("link_vnfs", self.durations),
                    link={"a_vnf": a.vnf_id, "b_vnf": b.vnf_id, "link_kind": link.link_kind},
                ),
            )

    def _plan_build_for_reconfigure(self, ns: NsInstance) -> None:
        # Old resources are already freed; a build failure here leaves the NS
        # in Error with nothing running. That hazard is inherent to
        # stop-and-redeploy and is surfaced, not rolled back.
        self._plan_build(ns, phase="reconfigure")

    def _plan_teardown(self, ns: NsInstance, phase: str) -> None:
        """Expand a teardown plan: unlink, stop, release carrier, free compute."""
        ns.generation += 1
        ns.phase = phase
        ns.pending_task_ids.clear()
        for a, b, kind in list(ns.links_established):
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="unlink_vnfs",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("unlink_vnfs", self.durations),
                    link={"a_vnf": a, "b_vnf": b, "link_kind": kind},
                ),
            )
        for inst in ns.vnf_instances:
            if inst.state == "Active":
                self._enqueue(
                    ns,
                    Command(
                        command_id=self._next_cmd_id(ns),
                        kind="stop_vnf",
                        ns_id=ns.ns_id,
                        duration_s=duration_for("stop_vnf", self.durations),
                        vnf_id=inst.vnf_id,
                    ),
                )
        for assignment_id in list(ns.carrier_refs):
            self._enqueue(
                ns,
                Command(
                    command_id=self._next_cmd_id(ns),
                    kind="release_carrier",
                    ns_id=ns.ns_id,
                    duration_s=duration_for("release_carrier", self.durations),
                    assignment_id=assignment_id,
                ),
            )
        for inst in ns.vnf_instances:
            if inst.allocated:
                self._enqueue(
                    ns,
                    Command(
                        command_id=self._next_cmd_id(ns),
                        kind="free_compute",
                        ns_id=ns.ns_id,
                        duration_s=duration_for("free_compute", self.durations),
                        vnf_id=inst.vnf_id,
                    ),
                )
        if not ns.pending_task_ids:
            # Nothing materialized (e.g. terminate straight out of Error at
            # plan time); the phase completes immediately.
            done = Outcome("", "done", "", self.now())
            self._advance_phase(ns, done)

    def _enqueue(self, ns: NsInstance, cmd: Command) -> str:
        task_id = self.queue.enqueue(ns.ns_id, cmd, idempotency_key=cmd.command_id, now=self.now())
        ns.pending_task_ids.add(task_id)
        self._task_ns[task_id] = ns.ns_id
        return task_id

    def _next_cmd_id(self, ns: NsInstance) -> str:
        self._cmd_counter += 1
        return f"{ns.ns_id}/g{ns.generation}/c{self._cmd_counter:05d}"

    # ------------------------------------------------------------------
    # downtime bookkeeping
    # ------------------------------------------------------------------

    def _maybe_open_downtime(self, ns: NsInstance, t: float) -> None:
        if ns.phase == "teardown:reconfigure" and ns.downtime_open is None:
            if not ns.active_instances():
                ns.downtime_open = t

    def _maybe_close_downtime(self, ns: NsInstance, t: float) -> None:
        if ns.phase == "build:reconfigure" and ns.downtime_open is not None:
            if all(i.state == "Active" for i in ns.vnf_instances):
                ns.downtime_log.append((ns.downtime_open, t))
                self.bus.emit(
                    "downtime", t, ns_id=ns.ns_id, start=ns.downtime_open, end=t,
                    length_s=t - ns.downtime_open,
                )
                ns.downtime_open = None

    # ------------------------------------------------------------------
    # state transitions
    # ------------------------------------------------------------------

    def _transition(self, ns: NsInstance, to: str, reason: str = "") -> None:
        frm = ns.state
        if to not in ALLOWED_NS_TRANSITIONS[frm]:
            raise IllegalState(f"illegal NS transition {frm} -> {to}")
        ns.state = to
        now = self.now()
        ns.state_changed_at = now
        if to == "Error":
            ns.error_reason = reason
            self.queue.cancel_pending(ns.ns_id)
            ns.pending_task_ids.clear()
            ns.phase = None
        self.bus.emit("ns_state", now, ns_id=ns.ns_id, **{"from": frm, "to": to}, reason=reason)

    def _vnf_transition(self, ns: NsInstance, inst: VnfInstance, to: str, t: float) -> None:
        frm = inst.state
        if to not in ALLOWED_VNF_TRANSITIONS[frm]:
            raise IllegalState(f"illegal VNF transition {frm} -> {to} ({inst.vnf_id})")
        inst.state = to
        self._emit_vnf_state(ns, inst, frm, to, t)

    def _emit_vnf_state(self, ns, inst, frm, to, t: Optional[float] = None) -> None:
        self.bus.emit(
            "vnf_state",
            self.now() if t is None else t,
            ns_id=ns.ns_id,
            vnf_id=inst.vnf_id,
            **{"from": frm, "to": to},
        )

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def get_ns(self, ns_id: str) -> NsInstance:
        try:
            return self._instances[ns_id]
        except KeyError:
            raise NotFound(f"ns {ns_id} not found") from None

    def list_ns(self) -> list[NsInstance]:
        return sorted(self._instances.values(), key=lambda n: n.ns_id)

    def live_ns(self) -> list[NsInstance]:
        return [n for n in self.list_ns() if n.state != "Terminated"]

    # ------------------------------------------------------------------
    # snapshot
    # ------------------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "ns_counter": self._ns_counter,
            "cmd_counter": self._cmd_counter,
            "instances": [ns.to_dict() for ns in self.list_ns()],
            "last_trigger": [
                {"ns_id": k[0], "rule_id": k[1], "t": v} for k, v in sorted(self._last_trigger.items())
            ],
        }

    def load_state(self, d: dict) -> None:
        self._ns_counter = int(d.get("ns_counter", 0))
        self._cmd_counter = int(d.get("cmd_counter", 0))
        for rec in d.get("instances", []):
            nsd = self.catalog.fetch_nsd_ref(rec["nsd_ref"])
            ns = NsInstance(ns_id=rec["ns_id"], nsd=nsd)
            ns.state = rec["state"]
            ns.vnf_instances = [VnfInstance.from_dict(v) for v in rec.get("vnf_instances", [])]
            ns.carrier_refs = [c for c in rec.get("carrier_refs", []) if c]
            ns.created_at = rec.get("created_at", 0.0)
            ns.state_changed_at = rec.get("state_changed_at", 0.0)
            ns.downtime_log = [tuple(w) for w in rec.get("downtime_log", [])]
            ns.error_reason = rec.get("error_reason", "")
            if ns.state in ("Defined", "Deploying", "Reconfiguring", "Terminating"):
                # In-flight tasks are not persisted; a restart mid-plan parks
                # the NS in Error for the operator to clean up.
                ns.state = "Error"
                ns.error_reason = "interrupted by restart"
            self._instances[ns.ns_id] = ns
        for rec in d.get("last_trigger", []):
            self._last_trigger[(rec["ns_id"], rec["rule_id"])] = rec["t"]
