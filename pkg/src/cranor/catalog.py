"""Descriptor catalog: blueprints for VNFs and VNF chains.

The catalog is the authoritative, append-only store of VNF descriptors
(VNFDs) and network-service descriptors (NSDs). Descriptors are validated
before they can be stored; the lifecycle engine only ever instantiates
stored descriptors. Persistence is one canonical JSON document per
(name, version) under a data directory.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import Conflict, NotFound, ValidationFailed

LTE_BANDWIDTHS_MHZ = (1.4, 3.0, 5.0, 10.0, 15.0, 20.0)
VNF_KINDS = ("radio", "generic")
RADIO_ROLES = ("enb", "ue", "channel")
LINK_KINDS = ("ip", "radio")
POLICY_ACTIONS = ("reconfigure_to", "notify_only")


def parse_ref(ref: str) -> tuple[str, str]:
    """Split a "name/version" reference."""
    name, sep, version = ref.partition("/")
    if not sep or not name or not version:
        raise ValidationFailed([f"malformed descriptor reference {ref!r} (want name/version)"])
    return name, version


@dataclass(frozen=True)
class Flavor:
    """Compute demand of one VNF instance."""

    vcpus: int
    ram_mb: int
    disk_gb: int

    def violations(self) -> list[str]:
        out = []
        if self.vcpus <= 0:
            out.append("flavor.vcpus must be > 0")
        if self.ram_mb <= 0:
            out.append("flavor.ram_mb must be > 0")
        if self.disk_gb <= 0:
            out.append("flavor.disk_gb must be > 0")
        return out

    def to_dict(self) -> dict:
        return {"vcpus": self.vcpus, "ram_mb": self.ram_mb, "disk_gb": self.disk_gb}

    @classmethod
    def from_dict(cls, d: dict) -> "Flavor":
        return cls(vcpus=d["vcpus"], ram_mb=d["ram_mb"], disk_gb=d["disk_gb"])


@dataclass(frozen=True)
class RadioProfile:
    """Radio configuration of a radio-kind VNF: LTE channel bandwidth and role."""

    bandwidth_mhz: float
    role: str

    def violations(self) -> list[str]:
        out = []
        if not _is_lte_bandwidth(self.bandwidth_mhz):
            out.append("bandwidth not in LTE set")
        if self.role not in RADIO_ROLES:
            out.append(f"radio role must be one of {RADIO_ROLES}")
        return out

    def to_dict(self) -> dict:
        return {"bandwidth_mhz": self.bandwidth_mhz, "role": self.role}

    @classmethod
    def from_dict(cls, d: dict) -> "RadioProfile":
        return cls(bandwidth_mhz=float(d["bandwidth_mhz"]), role=d["role"])


def _is_lte_bandwidth(mhz: float) -> bool:
    return any(abs(mhz - b) < 1e-9 for b in LTE_BANDWIDTHS_MHZ)


@dataclass(frozen=True)
class MetricModel:
    """Coefficients from which a running instance's metric streams are synthesized.

    cpu grows linearly with occupied resource blocks; ram is flat while the
    instance is active; bler/snr are the nominal link-quality constants.
    """

    cpu_base_pct: float
    cpu_per_rb_pct: float
    ram_fixed_mb: float
    bler_nominal: float = 0.0
    snr_nominal_db: float = 30.0

    def violations(self) -> list[str]:
        out = []
        if self.cpu_base_pct < 0:
            out.append("metric_model.cpu_base_pct must be >= 0")
        if self.cpu_per_rb_pct < 0:
            out.append("metric_model.cpu_per_rb_pct must be >= 0")
        if self.ram_fixed_mb <= 0:
            out.append("metric_model.ram_fixed_mb must be > 0")
        if not (0.0 <= self.bler_nominal <= 1.0):
            out.append("metric_model.bler_nominal must be in [0, 1]")
        return out

    def to_dict(self) -> dict:
        return {
            "cpu_base_pct": self.cpu_base_pct,
            "cpu_per_rb_pct": self.cpu_per_rb_pct,
            "ram_fixed_mb": self.ram_fixed_mb,
            "bler_nominal": self.bler_nominal,
            "snr_nominal_db": self.snr_nominal_db,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricModel":
        return cls(
            cpu_base_pct=float(d["cpu_base_pct"]),
            cpu_per_rb_pct=float(d["cpu_per_rb_pct"]),
            ram_fixed_mb=float(d["ram_fixed_mb"]),
            bler_nominal=float(d.get("bler_nominal", 0.0)),
            snr_nominal_db=float(d.get("snr_nominal_db", 30.0)),
        )


@dataclass(frozen=True)
class VnfDescriptor:
    name: str
    version: str
    kind: str
    flavor: Flavor
    metric_model: MetricModel
    radio_profile: Optional[RadioProfile] = None
    image_ref: str = ""

    @property
    def ref(self) -> str:
        return f"{self.name}/{self.version}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "kind": self.kind,
            "flavor": self.flavor.to_dict(),
            "radio_profile": self.radio_profile.to_dict() if self.radio_profile else None,
            "metric_model": self.metric_model.to_dict(),
            "image_ref": self.image_ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VnfDescriptor":
        rp = d.get("radio_profile")
        return cls(
            name=d["name"],
            version=d["version"],
            kind=d["kind"],
            flavor=Flavor.from_dict(d["flavor"]),
            metric_model=MetricModel.from_dict(d["metric_model"]),
            radio_profile=RadioProfile.from_dict(rp) if rp else None,
            image_ref=d.get("image_ref", ""),
        )


@dataclass(frozen=True)
class PolicyRule:
    """Reaction to a named alarm: reconfigure to another NSD or notify only."""

    rule_id: str
    alarm_rule_ref: str
    action: str
    target: Optional[str] = None  # "name/version" for reconfigure_to
    cooldown_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "alarm_rule_ref": self.alarm_rule_ref,
            "action": self.action,
            "target": self.target,
            "cooldown_s": self.cooldown_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyRule":
        return cls(
            rule_id=d["rule_id"],
            alarm_rule_ref=d["alarm_rule_ref"],
            action=d["action"],
            target=d.get("target"),
            cooldown_s=float(d.get("cooldown_s", 0.0)),
        )


@dataclass(frozen=True)
class NsMember:
    member_id: str
    vnfd_ref: str
    replicas: int = 1

    def to_dict(self) -> dict:
        return {"member_id": self.member_id, "vnfd_ref": self.vnfd_ref, "replicas": self.replicas}

    @classmethod
    def from_dict(cls, d: dict) -> "NsMember":
        return cls(member_id=d["member_id"], vnfd_ref=d["vnfd_ref"], replicas=int(d.get("replicas", 1)))


@dataclass(frozen=True)
class NsLink:
    a: str
    b: str
    link_kind: str

    def to_dict(self) -> dict:
        return {"endpoints": [self.a, self.b], "link_kind": self.link_kind}

    @classmethod
    def from_dict(cls, d: dict) -> "NsLink":
        a, b = d["endpoints"]
        return cls(a=a, b=b, link_kind=d["link_kind"])


@dataclass(frozen=True)
class NsDescriptor:
    name: str
    version: str
    members: tuple[NsMember, ...]
    links: tuple[NsLink, ...] = ()
    policies: tuple[PolicyRule, ...] = ()
    requires_frontend: bool = False

    @property
    def ref(self) -> str:
        return f"{self.name}/{self.version}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "members": [m.to_dict() for m in self.members],
            "links": [l.to_dict() for l in self.links],
            "policies": [p.to_dict() for p in self.policies],
            "requires_frontend": self.requires_frontend,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NsDescriptor":
        return cls(
            name=d["name"],
            version=d["version"],
            members=tuple(NsMember.from_dict(m) for m in d.get("members", [])),
            links=tuple(NsLink.from_dict(l) for l in d.get("links", [])),
            policies=tuple(PolicyRule.from_dict(p) for p in d.get("policies", [])),
            requires_frontend=bool(d.get("requires_frontend", False)),
        )


def validate_vnfd(vnfd: VnfDescriptor) -> list[str]:
    """Check every VNFD invariant; an empty list means the descriptor is valid."""
    out: list[str] = []
    if not vnfd.name:
        out.append("name must be non-empty")
    if not vnfd.version:
        out.append("version must be non-empty")
    if vnfd.kind not in VNF_KINDS:
        out.append(f"kind must be one of {VNF_KINDS}")
    out.extend(vnfd.flavor.violations())
    out.extend(vnfd.metric_model.violations())
    if vnfd.kind == "radio" and vnfd.radio_profile is None:
        out.append("radio kind requires radio_profile")
    if vnfd.kind == "generic" and vnfd.radio_profile is not None:
        out.append("generic kind must not carry radio_profile")
    if vnfd.radio_profile is not None:
        out.extend(vnfd.radio_profile.violations())
    return out


def validate_nsd(nsd: NsDescriptor, catalog: "Catalog") -> list[str]:
    """Check every NSD invariant, including cross-references into the catalog."""
    out: list[str] = []
    if not nsd.name:
        out.append("name must be non-empty")
    if not nsd.version:
        out.append("version must be non-empty")
    if not nsd.members:
        out.append("NSD must declare at least one member")

    member_ids = [m.member_id for m in nsd.members]
    if len(set(member_ids)) != len(member_ids):
        out.append("member_ids not unique")

    resolved: dict[str, VnfDescriptor] = {}
    for m in nsd.members:
        if m.replicas < 1:
            out.append(f"member {m.member_id}: replicas must be >= 1")
        try:
            resolved[m.member_id] = catalog.fetch_vnfd_ref(m.vnfd_ref)
        except (NotFound, ValidationFailed):
            out.append(f"unresolved member {m.member_id} (vnfd {m.vnfd_ref})")

    id_set = set(member_ids)
    for link in nsd.links:
        if link.link_kind not in LINK_KINDS:
            out.append(f"link {link.a}-{link.b}: kind must be one of {LINK_KINDS}")
        if link.a == link.b:
            out.append(f"link {link.a}-{link.b}: endpoints must differ")
        for end in (link.a, link.b):
            if end not in id_set:
                out.append(f"link endpoint {end} does not resolve to a member")
        enb_ends = sum(
            1
            for end in (link.a, link.b)
            if end in resolved
            and resolved[end].radio_profile is not None
            and resolved[end].radio_profile.role == "enb"
        )
        if link.link_kind == "radio" and enb_ends > 1:
            out.append(f"radio link {link.a}-{link.b} connects more than one enb")

    if nsd.members and not _connected(id_set, nsd.links):
        out.append("link graph not connected")

    # Channel emulators exist to stand in for the air interface; they only
    # make sense wired to at least one radio member.
    adjacency = _adjacency(nsd.links)
    for m in nsd.members:
        vnfd = resolved.get(m.member_id)
        if vnfd and vnfd.radio_profile and vnfd.radio_profile.role == "channel":
            neighbours = adjacency.get(m.member_id, set())
            has_radio_peer = any(
                resolved.get(n) and resolved[n].kind == "radio" for n in neighbours
            )
            if not has_radio_peer:
                out.append(f"channel member {m.member_id} not linked to any radio member")

    has_enb = any(
        v.radio_profile is not None and v.radio_profile.role == "enb" for v in resolved.values()
    )
    if nsd.requires_frontend != has_enb:
        out.append("requires_frontend must be true iff some member has role=enb")

    for p in nsd.policies:
        if p.cooldown_s < 0:
            out.append(f"policy {p.rule_id}: cooldown_s must be >= 0")
        if p.action not in POLICY_ACTIONS:
            out.append(f"policy {p.rule_id}: action must be one of {POLICY_ACTIONS}")
        elif p.action == "reconfigure_to":
            if not p.target:
                out.append(f"policy {p.rule_id}: reconfigure_to requires a target")
            else:
                try:
                    target = catalog.fetch_nsd_ref(p.target)
                    if (target.name, target.version) == (nsd.name, nsd.version):
                        out.append(f"policy {p.rule_id}: reconfigure_to target equals owning NSD")
                except (NotFound, ValidationFailed):
                    out.append(f"policy {p.rule_id}: reconfigure_to target {p.target} not in catalog")
    return out


def _adjacency(links: tuple[NsLink, ...]) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}
    for l in links:
        adj.setdefault(l.a, set()).add(l.b)
        adj.setdefault(l.b, set()).add(l.a)
    return adj


def _connected(member_ids: set[str], links: tuple[NsLink, ...]) -> bool:
    if len(member_ids) <= 1:
        return True
    adj = _adjacency(links)
    seen: set[str] = set()
    stack = [next(iter(member_ids))]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(adj.get(node, set()) & member_ids - seen)
    return seen >= member_ids


class Catalog:
    """Append-only descriptor store. Reads are lock-free snapshots; writes serialize.

    With a data_dir, every stored descriptor is also written as one canonical
    JSON file, and existing files are loaded on construction.
    """

    def __init__(self, data_dir: Optional[str | Path] = None):
        self._vnfds: dict[tuple[str, str], VnfDescriptor] = {}
        self._nsds: dict[tuple[str, str], NsDescriptor] = {}
        self._write_lock = threading.Lock()
        self._data_dir = Path(data_dir) if data_dir else None
        if self._data_dir:
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    # -- store / fetch -------------------------------------------------

    def store_vnfd(self, vnfd: VnfDescriptor) -> str:
        violations = validate_vnfd(vnfd)
        if violations:
            raise ValidationFailed(violations)
        with self._write_lock:
            key = (vnfd.name, vnfd.version)
            if key in self._vnfds:
                raise Conflict(f"vnfd {vnfd.ref} already stored")
            self._vnfds[key] = vnfd
            self._persist("vnfd", vnfd)
        return vnfd.ref

    def store_nsd(self, nsd: NsDescriptor) -> str:
        violations = validate_nsd(nsd, self)
        if violations:
            raise ValidationFailed(violations)
        with self._write_lock:
            key = (nsd.name, nsd.version)
            if key in self._nsds:
                raise Conflict(f"nsd {nsd.ref} already stored")
            self._nsds[key] = nsd
            self._persist("nsd", nsd)
        return nsd.ref

    def fetch_vnfd(self, name: str, version: str) -> VnfDescriptor:
        try:
            return self._vnfds[(name, version)]
        except KeyError:
            raise NotFound(f"vnfd {name}/{version} not found") from None

    def fetch_nsd(self, name: str, version: str) -> NsDescriptor:
        try:
            return self._nsds[(name, version)]
        except KeyError:
            raise NotFound(f"nsd {name}/{version} not found") from None

    def fetch_vnfd_ref(self, ref: str) -> VnfDescriptor:
        return self.fetch_vnfd(*parse_ref(ref))

    def fetch_nsd_ref(self, ref: str) -> NsDescriptor:
        return self.fetch_nsd(*parse_ref(ref))

    def list_vnfds(self) -> list[VnfDescriptor]:
        return sorted(self._vnfds.values(), key=lambda v: (v.name, v.version))

    def list_nsds(self) -> list[NsDescriptor]:
        return sorted(self._nsds.values(), key=lambda n: (n.name, n.version))

    # -- persistence ---------------------------------------------------

    def _persist(self, prefix: str, descriptor) -> None:
        if not self._data_dir:
            return
        path = self._data_dir / f"{prefix}__{descriptor.name}__{descriptor.version}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(descriptor.to_dict(), indent=2, sort_keys=True))
        tmp.replace(path)

    def _load_existing(self) -> None:
        assert self._data_dir is not None
        for path in sorted(self._data_dir.glob("vnfd__*.json")):
            vnfd = VnfDescriptor.from_dict(json.loads(path.read_text()))
            self._vnfds[(vnfd.name, vnfd.version)] = vnfd
        for path in sorted(self._data_dir.glob("nsd__*.json")):
            nsd = NsDescriptor.from_dict(json.loads(path.read_text()))
            self._nsds[(nsd.name, nsd.version)] = nsd

    def to_dict(self) -> dict:
        return {
            "vnfds": [v.to_dict() for v in self.list_vnfds()],
            "nsds": [n.to_dict() for n in self.list_nsds()],
        }

    def load_dict(self, d: dict) -> None:
        """Bulk-load descriptors (vnfds first so nsd cross-refs resolve)."""
        for v in d.get("vnfds", []):
            self.store_vnfd(VnfDescriptor.from_dict(v))
        for n in d.get("nsds", []):
            self.store_nsd(NsDescriptor.from_dict(n))
