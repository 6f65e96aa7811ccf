"""Shared drivers for lifecycle/e2e tests: engine builders and the event fuzz."""
from __future__ import annotations

import random

from cranor.catalog import Catalog
from cranor.fixtures import DEMO_TOKEN, demo_catalog_dict, demo_inventory_dict
from cranor.infra import Command, Inventory
from cranor.lifecycle import ALLOWED_NS_TRANSITIONS, ALLOWED_VNF_TRANSITIONS
from cranor.orchestrator import Orchestrator, OrchestratorConfig

MHZ = 1_000_000


def make_command(key: str, kind: str = "boot_vnf") -> Command:
    return Command(command_id=key, kind=kind, ns_id="ns", duration_s=1.0, vnf_id="v1")


def build_orch(frontends=1, webhook_token=DEMO_TOKEN) -> Orchestrator:
    catalog = Catalog()
    catalog.load_dict(demo_catalog_dict())
    inventory_doc = demo_inventory_dict()
    inventory_doc["frontends"] = [
        {
            "frontend_id": f"rru-{i}",
            "site_id": f"site-{chr(ord('a') + i)}",
            "freq_min_hz": 2300 * MHZ,
            "freq_max_hz": 2600 * MHZ,
            "max_bw_hz": 20 * MHZ,
        }
        for i in range(frontends)
    ]
    inventory = Inventory.from_dict(inventory_doc)
    return Orchestrator(catalog, inventory, OrchestratorConfig(webhook_token=webhook_token))


def settle(orch: Orchestrator, max_ticks: int = 1000) -> float:
    return orch.run_until_idle(max_ticks)


def ns_transitions(orch: Orchestrator) -> list[tuple[str, str, str]]:
    return [
        (e["ns_id"], e["from"], e["to"])
        for e in orch.bus.log({"ns_state"})
        if e.get("from") is not None
    ]


def vnf_transitions(orch: Orchestrator) -> list[tuple[str, str, str]]:
    return [
        (e["vnf_id"], e["from"], e["to"])
        for e in orch.bus.log({"vnf_state"})
        if e.get("from") is not None
    ]


def assert_only_legal_transitions(orch: Orchestrator) -> None:
    for ns_id, frm, to in ns_transitions(orch):
        assert to in ALLOWED_NS_TRANSITIONS[frm], f"{ns_id}: illegal {frm} -> {to}"
    for vnf_id, frm, to in vnf_transitions(orch):
        assert to in ALLOWED_VNF_TRANSITIONS[frm], f"{vnf_id}: illegal {frm} -> {to}"


def lifecycle_event_fuzz(seed: int, n_events: int, frontends: int = 2) -> Orchestrator:
    """Random interleaving of intents, alarms and ticks against one engine.

    Ends by terminating everything and draining the queues, then asserts:
    only legal transitions ever happened, Running NSs were fully Active,
    terminated NSs hold nothing, and infra + spectrum match the pre-deploy
    state exactly.
    """
    rng = random.Random(seed)
    orch = build_orch(frontends=frontends)
    initial_capacity = orch.driver.capacity_report()
    nsd_refs = ["lte-cell-1.4/v1", "lte-cell-5/v1"]
    counter = 0

    def live_ids():
        return [ns.ns_id for ns in orch.lifecycle.live_ns()]

    for _ in range(n_events):
        roll = rng.random()
        ids = live_ids()
        try:
            if roll < 0.15:
                counter += 1
                orch.deploy_ns(rng.choice(nsd_refs), ns_id=f"fuzz-{seed}-{counter}")
            elif roll < 0.25 and ids:
                orch.terminate_ns(rng.choice(ids))
            elif roll < 0.35 and ids:
                ns_id = rng.choice(ids)
                current = orch.lifecycle.get_ns(ns_id).nsd_ref
                target = next(r for r in nsd_refs if r != current)
                orch.reconfigure_ns(ns_id, target)
            elif roll < 0.40 and ids:
                orch.handle_webhook(
                    {
                        "rule_id": "cell-a-overload",
                        "series": {"scope": "ns", "scope_id": rng.choice(ids), "metric": "rb_occupied"},
                        "value": 6,
                        "state": "firing",
                        "t": orch.now,
                        "token": rng.choice([DEMO_TOKEN, "wrong"]),
                    }
                )
            else:
                orch.tick()
        except Exception as exc:  # intents may legally be rejected
            from cranor.errors import CranorError

            assert isinstance(exc, CranorError), f"non-domain error {type(exc)}: {exc}"

        for ns in orch.lifecycle.list_ns():
            if ns.state == "Running":
                assert all(i.state == "Active" for i in ns.vnf_instances), ns.ns_id

    # Drain: settle, then terminate whatever is terminable; Reconfiguring
    # services resolve to Running or Error once idle, so a few passes cover
    # every state.
    for _ in range(8):
        settle(orch, 5000)
        remaining = [ns for ns in orch.lifecycle.list_ns() if ns.state != "Terminated"]
        if not remaining:
            break
        for ns in remaining:
            if ns.state in ("Running", "Error", "Deploying"):
                orch.terminate_ns(ns.ns_id)
    else:
        raise AssertionError("fuzz drain did not converge")

    assert_only_legal_transitions(orch)
    for ns in orch.lifecycle.list_ns():
        assert ns.state == "Terminated", f"{ns.ns_id} ended {ns.state}"
        assert ns.carrier_refs == []
        assert all(not i.allocated for i in ns.vnf_instances)
    assert orch.driver.capacity_report() == initial_capacity
    assert orch.rf.assignments() == []
    assert orch.driver.live_vnfs == set()
    return orch
