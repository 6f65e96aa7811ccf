"""Snapshot persistence: one JSON file, written temp-then-rename.

A snapshot captures everything needed to reproduce an equivalent in-memory
state across a restart: catalog contents, NS/VNF instance records, carrier
assignments, infra allocations, alarm-rule states and the virtual clock.
In-flight tasks are deliberately not persisted; services caught mid-plan
come back in Error for the operator to re-drive.
"""
from __future__ import annotations

import json
from pathlib import Path

from .monitor import AlarmRule
from .orchestrator import Orchestrator

SNAPSHOT_SCHEMA_VERSION = 1


def take_snapshot(orch: Orchestrator) -> dict:
    with orch.lock:
        return {
            "schema_version": SNAPSHOT_SCHEMA_VERSION,
            "now": orch.now,
            "catalog": orch.catalog.to_dict(),
            "lifecycle": orch.lifecycle.state_dict(),
            "rf": orch.rf.state_dict(),
            "infra": orch.driver.state_dict(),
            "alarm_rules": [rule.to_dict() for rule in orch.evaluator.rules.values()],
        }


def write_snapshot(orch: Orchestrator, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(take_snapshot(orch), indent=2, sort_keys=True))
    tmp.replace(path)
    return path


def restore_snapshot(orch: Orchestrator, snapshot: dict) -> None:
    """Load a snapshot into a freshly built orchestrator (same inventory/catalog dirs)."""
    if snapshot.get("schema_version") != SNAPSHOT_SCHEMA_VERSION:
        raise ValueError(f"unsupported snapshot schema {snapshot.get('schema_version')!r}")
    with orch.lock:
        orch.now = float(snapshot.get("now", 0.0))
        loaded = orch.catalog.to_dict()
        have_vnfds = {(v["name"], v["version"]) for v in loaded["vnfds"]}
        have_nsds = {(n["name"], n["version"]) for n in loaded["nsds"]}
        snap_catalog = snapshot.get("catalog", {})
        orch.catalog.load_dict(
            {
                "vnfds": [
                    v for v in snap_catalog.get("vnfds", [])
                    if (v["name"], v["version"]) not in have_vnfds
                ],
                "nsds": [
                    n for n in snap_catalog.get("nsds", [])
                    if (n["name"], n["version"]) not in have_nsds
                ],
            }
        )
        orch.rf.load_state(snapshot.get("rf", {}))
        orch.driver.load_state(snapshot.get("infra", {}))
        orch.lifecycle.load_state(snapshot.get("lifecycle", {}))
        for doc in snapshot.get("alarm_rules", []):
            orch.evaluator.add_rule(AlarmRule.from_dict(doc))


def read_snapshot(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
