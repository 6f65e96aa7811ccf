"""Simulated NFV infrastructure: compute nodes, frontends, placement, driver.

The driver is the single point through which state-changing commands execute.
Commands carry a simulated duration; the engine calls apply() when the clock
reaches issue time + duration, so mutations land atomically at completion
time. A command whose preconditions no longer hold yields a failed Outcome
rather than raising.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .catalog import Flavor
from .errors import CranorError, Infeasible, NotFound
from .rf import RfPool, SpectrumBand

COMMAND_KINDS = (
    "allocate_compute",
    "free_compute",
    "boot_vnf",
    "stop_vnf",
    "assign_carrier",
    "release_carrier",
    "link_vnfs",
    "unlink_vnfs",
)

# Simulated seconds per command kind. Boot dominates; the defaults keep a
# full stop-and-redeploy cycle inside a minute.
DEFAULT_DURATIONS_S = {"boot_vnf": 10.0, "stop_vnf": 5.0, "default": 1.0}


def duration_for(kind: str, durations: Optional[dict] = None) -> float:
    table = {**DEFAULT_DURATIONS_S, **(durations or {})}
    return float(table.get(kind, table["default"]))


@dataclass
class ComputeNode:
    node_id: str
    vcpus_total: int
    ram_mb_total: int
    disk_gb_total: int
    allocations: dict[str, Flavor] = field(default_factory=dict)

    @property
    def vcpus_used(self) -> int:
        return sum(f.vcpus for f in self.allocations.values())

    @property
    def ram_mb_used(self) -> int:
        return sum(f.ram_mb for f in self.allocations.values())

    @property
    def disk_gb_used(self) -> int:
        return sum(f.disk_gb for f in self.allocations.values())

    def fits(self, flavor: Flavor) -> bool:
        return (
            self.vcpus_used + flavor.vcpus <= self.vcpus_total
            and self.ram_mb_used + flavor.ram_mb <= self.ram_mb_total
            and self.disk_gb_used + flavor.disk_gb <= self.disk_gb_total
        )

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "vcpus_total": self.vcpus_total,
            "ram_mb_total": self.ram_mb_total,
            "disk_gb_total": self.disk_gb_total,
            "allocations": {k: f.to_dict() for k, f in sorted(self.allocations.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComputeNode":
        return cls(
            node_id=d["node_id"],
            vcpus_total=int(d["vcpus_total"]),
            ram_mb_total=int(d["ram_mb_total"]),
            disk_gb_total=int(d["disk_gb_total"]),
            allocations={
                k: Flavor.from_dict(f) for k, f in d.get("allocations", {}).items()
            },
        )


@dataclass(frozen=True)
class RfFrontend:
    frontend_id: str
    site_id: str
    freq_min_hz: int
    freq_max_hz: int
    max_bw_hz: int

    def violations(self) -> list[str]:
        out = []
        if self.freq_min_hz >= self.freq_max_hz:
            out.append(f"frontend {self.frontend_id}: freq_min_hz must be < freq_max_hz")
        if self.max_bw_hz > self.freq_max_hz - self.freq_min_hz:
            out.append(f"frontend {self.frontend_id}: max_bw_hz exceeds tunable range")
        return out

    def to_dict(self) -> dict:
        return {
            "frontend_id": self.frontend_id,
            "site_id": self.site_id,
            "freq_min_hz": self.freq_min_hz,
            "freq_max_hz": self.freq_max_hz,
            "max_bw_hz": self.max_bw_hz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RfFrontend":
        return cls(
            frontend_id=d["frontend_id"],
            site_id=d["site_id"],
            freq_min_hz=int(d["freq_min_hz"]),
            freq_max_hz=int(d["freq_max_hz"]),
            max_bw_hz=int(d["max_bw_hz"]),
        )


@dataclass
class Command:
    """One state-changing instruction for the driver."""

    command_id: str
    kind: str
    ns_id: str
    duration_s: float
    vnf_id: Optional[str] = None
    node_id: Optional[str] = None
    flavor: Optional[Flavor] = None
    carrier: Optional[dict] = None  # {"frontend_id", "bw_hz", "band_id"?}
    assignment_id: Optional[str] = None
    link: Optional[dict] = None  # {"a_vnf", "b_vnf", "link_kind"}

    def shape_violations(self) -> list[str]:
        need = {
            "allocate_compute": ("vnf_id", "node_id", "flavor"),
            "free_compute": ("vnf_id",),
            "boot_vnf": ("vnf_id",),
            "stop_vnf": ("vnf_id",),
            "assign_carrier": ("carrier",),
            "release_carrier": ("assignment_id",),
            "link_vnfs": ("link",),
            "unlink_vnfs": ("link",),
        }
        if self.kind not in need:
            return [f"unknown command kind {self.kind}"]
        return [
            f"{self.kind} requires {attr}" for attr in need[self.kind] if getattr(self, attr) is None
        ]

    def to_dict(self) -> dict:
        return {
            "command_id": self.command_id,
            "kind": self.kind,
            "ns_id": self.ns_id,
            "duration_s": self.duration_s,
            "vnf_id": self.vnf_id,
            "node_id": self.node_id,
            "flavor": self.flavor.to_dict() if self.flavor else None,
            "carrier": self.carrier,
            "assignment_id": self.assignment_id,
            "link": self.link,
        }


@dataclass
class Outcome:
    command_id: str
    status: str  # done | failed
    detail: str
    completed_at: float
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "done"

    def to_dict(self) -> dict:
        return {
            "command_id": self.command_id,
            "status": self.status,
            "detail": self.detail,
            "completed_at": self.completed_at,
            "data": self.data,
        }


def place(demands: list[Flavor], nodes: list[ComputeNode]) -> dict[int, str]:
    """First-fit-decreasing placement of flavors onto nodes.

    Demands are sorted by vcpus descending (ties: larger ram first, then
    input order); each goes to the first node with room in all three
    dimensions, accounting for earlier picks. Raises Infeasible when any
    demand cannot be placed.
    """
    order = sorted(
        range(len(demands)),
        key=lambda i: (-demands[i].vcpus, -demands[i].ram_mb, i),
    )
    used = {
        n.node_id: [n.vcpus_used, n.ram_mb_used, n.disk_gb_used] for n in nodes
    }
    result: dict[int, str] = {}
    for i in order:
        d = demands[i]
        for n in nodes:
            u = used[n.node_id]
            if (
                u[0] + d.vcpus <= n.vcpus_total
                and u[1] + d.ram_mb <= n.ram_mb_total
                and u[2] + d.disk_gb <= n.disk_gb_total
            ):
                u[0] += d.vcpus
                u[1] += d.ram_mb
                u[2] += d.disk_gb
                result[i] = n.node_id
                break
        else:
            raise Infeasible(
                f"no node can host demand {i} ({d.vcpus} vcpus, {d.ram_mb} MB, {d.disk_gb} GB)"
            )
    return result


class SimulatedDriver:
    """Executes commands against the in-memory infrastructure and RF pool."""

    def __init__(self, nodes: list[ComputeNode], rf: RfPool):
        self.nodes = {n.node_id: n for n in nodes}
        self.rf = rf
        self.live_vnfs: set[str] = set()
        self.links: set[tuple[str, str]] = set()

    def apply(self, cmd: Command, issued_at: float) -> Outcome:
        """Execute cmd now; the outcome is stamped issued_at + duration."""
        completed_at = issued_at + cmd.duration_s
        bad = cmd.shape_violations()
        if bad:
            return self._failed(cmd, completed_at, "; ".join(bad))
        try:
            handler = getattr(self, f"_do_{cmd.kind}")
            data = handler(cmd) or {}
        except CranorError as exc:
            return self._failed(cmd, completed_at, str(exc))
        return Outcome(cmd.command_id, "done", "", completed_at, data)

    @staticmethod
    def _failed(cmd: Command, completed_at: float, detail: str) -> Outcome:
        return Outcome(cmd.command_id, "failed", detail, completed_at)

    # -- command handlers ----------------------------------------------

    def _do_allocate_compute(self, cmd: Command) -> dict:
        node = self.nodes.get(cmd.node_id)
        if node is None:
            raise NotFound(f"no such node {cmd.node_id}")
        if cmd.vnf_id in node.allocations:
            raise Infeasible(f"{cmd.vnf_id} already allocated on {cmd.node_id}")
        if not node.fits(cmd.flavor):
            raise Infeasible(f"insufficient capacity on {cmd.node_id}")
        node.allocations[cmd.vnf_id] = cmd.flavor
        return {"node_id": node.node_id}

    def _do_free_compute(self, cmd: Command) -> dict:
        for node in self.nodes.values():
            if cmd.vnf_id in node.allocations:
                del node.allocations[cmd.vnf_id]
                return {"node_id": node.node_id}
        raise NotFound("no such allocation")

    def _do_boot_vnf(self, cmd: Command) -> dict:
        if not any(cmd.vnf_id in n.allocations for n in self.nodes.values()):
            raise NotFound(f"{cmd.vnf_id} has no compute allocation")
        if cmd.vnf_id in self.live_vnfs:
            raise Infeasible(f"{cmd.vnf_id} already running")
        self.live_vnfs.add(cmd.vnf_id)
        return {}

    def _do_stop_vnf(self, cmd: Command) -> dict:
        if cmd.vnf_id not in self.live_vnfs:
            raise NotFound(f"{cmd.vnf_id} is not running")
        self.live_vnfs.discard(cmd.vnf_id)
        return {}

    def _do_assign_carrier(self, cmd: Command) -> dict:
        assignment = self.rf.assign_carrier(
            frontend_id=cmd.carrier["frontend_id"],
            bw_hz=int(cmd.carrier["bw_hz"]),
            owner_ns_id=cmd.ns_id,
            band_id=cmd.carrier.get("band_id"),
        )
        return {"assignment": assignment.to_dict()}

    def _do_release_carrier(self, cmd: Command) -> dict:
        released = self.rf.release_carrier(cmd.assignment_id)
        return {"assignment": released.to_dict()}

    def _do_link_vnfs(self, cmd: Command) -> dict:
        a, b = cmd.link["a_vnf"], cmd.link["b_vnf"]
        for v in (a, b):
            if v not in self.live_vnfs:
                raise NotFound(f"{v} is not running")
        self.links.add(self._link_key(a, b))
        return {}

    def _do_unlink_vnfs(self, cmd: Command) -> dict:
        key = self._link_key(cmd.link["a_vnf"], cmd.link["b_vnf"])
        if key not in self.links:
            raise NotFound("no such link")
        self.links.discard(key)
        return {}

    @staticmethod
    def _link_key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    # -- reporting -------------------------------------------------------

    def capacity_report(self) -> list[dict]:
        report = []
        for node in sorted(self.nodes.values(), key=lambda n: n.node_id):
            report.append(
                {
                    "node_id": node.node_id,
                    "totals": {
                        "vcpus": node.vcpus_total,
                        "ram_mb": node.ram_mb_total,
                        "disk_gb": node.disk_gb_total,
                    },
                    "allocated": {
                        "vcpus": node.vcpus_used,
                        "ram_mb": node.ram_mb_used,
                        "disk_gb": node.disk_gb_used,
                    },
                    "free": {
                        "vcpus": node.vcpus_total - node.vcpus_used,
                        "ram_mb": node.ram_mb_total - node.ram_mb_used,
                        "disk_gb": node.disk_gb_total - node.disk_gb_used,
                    },
                    "instances": sorted(node.allocations),
                }
            )
        return report

    # -- snapshot ----------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in sorted(self.nodes.values(), key=lambda n: n.node_id)],
            "live_vnfs": sorted(self.live_vnfs),
            "links": sorted(list(k) for k in self.links),
        }

    def load_state(self, d: dict) -> None:
        for nd in d.get("nodes", []):
            node = ComputeNode.from_dict(nd)
            self.nodes[node.node_id] = node
        self.live_vnfs = set(d.get("live_vnfs", []))
        self.links = {tuple(k) for k in d.get("links", [])}


@dataclass
class Inventory:
    """Static description of the simulated infrastructure, loaded at startup."""

    nodes: list[ComputeNode]
    frontends: list[RfFrontend]
    bands: list[SpectrumBand]

    @classmethod
    def from_dict(cls, d: dict) -> "Inventory":
        inv = cls(
            nodes=[ComputeNode.from_dict(n) for n in d.get("nodes", [])],
            frontends=[RfFrontend.from_dict(f) for f in d.get("frontends", [])],
            bands=[SpectrumBand.from_dict(b) for b in d.get("bands", [])],
        )
        problems = []
        for f in inv.frontends:
            problems.extend(f.violations())
        for b in inv.bands:
            problems.extend(b.violations())
        if problems:
            raise ValueError("; ".join(problems))
        return inv

    @classmethod
    def from_file(cls, path: str | Path) -> "Inventory":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "frontends": [f.to_dict() for f in self.frontends],
            "bands": [b.to_dict() for b in self.bands],
        }
