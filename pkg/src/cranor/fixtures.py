"""Canned demo environment: an LTE cell that scales from 1.4 MHz to 5 MHz.

The demo chain is eNB + simulated channel + UE. The 1.4 MHz cell caps at
6 resource blocks; when offered load saturates it (occupied RBs > 5 held for
30 s) the overload alarm fires and policy swaps the service to the 5 MHz
blueprint (25 RBs). The 5 MHz eNB profile pins 3600 MB of RAM and CPU
coefficients that put full-load usage at 17%.

scripts/make_scenarios.py renders these dicts into the checked-in JSON
files; tests import them directly.
"""
from __future__ import annotations

DEMO_TOKEN = "demo-secret"

MHZ = 1_000_000


def _vnfd(name, kind, flavor, metric, profile=None, version="v1"):
    return {
        "name": name,
        "version": version,
        "kind": kind,
        "flavor": flavor,
        "radio_profile": profile,
        "metric_model": metric,
        "image_ref": f"images/{name}:{version}",
    }


def demo_catalog_dict() -> dict:
    def cell_members(bw):
        return [
            {"member_id": "enb", "vnfd_ref": f"lte-enb-{bw}/v1", "replicas": 1},
            {"member_id": "chan", "vnfd_ref": f"lte-chan-{bw}/v1", "replicas": 1},
            {"member_id": "ue", "vnfd_ref": f"lte-ue-{bw}/v1", "replicas": 1},
        ]
    cell_links = [
        {"endpoints": ["enb", "chan"], "link_kind": "radio"},
        {"endpoints": ["chan", "ue"], "link_kind": "ip"},
    ]
    side_metric = {
        "cpu_base_pct": 0.5,
        "cpu_per_rb_pct": 0.0,
        "ram_fixed_mb": 512,
        "bler_nominal": 0.0,
        "snr_nominal_db": 30.0,
    }
    side_flavor = {"vcpus": 1, "ram_mb": 512, "disk_gb": 4}

    vnfds = []
    for bw, bw_mhz, enb_flavor, enb_ram in (
        ("1.4", 1.4, {"vcpus": 1, "ram_mb": 1500, "disk_gb": 8}, 1500),
        ("5", 5.0, {"vcpus": 2, "ram_mb": 3600, "disk_gb": 8}, 3600),
    ):
        enb_metric = {
            "cpu_base_pct": 2.0,
            "cpu_per_rb_pct": 0.6,
            "ram_fixed_mb": enb_ram,
            "bler_nominal": 0.0,
            "snr_nominal_db": 30.0,
        }
        vnfds.append(
            _vnfd(f"lte-enb-{bw}", "radio", enb_flavor, enb_metric,
                  {"bandwidth_mhz": bw_mhz, "role": "enb"})
        )
        vnfds.append(
            _vnfd(f"lte-chan-{bw}", "radio", side_flavor, side_metric,
                  {"bandwidth_mhz": bw_mhz, "role": "channel"})
        )
        vnfds.append(
            _vnfd(f"lte-ue-{bw}", "radio", side_flavor, side_metric,
                  {"bandwidth_mhz": bw_mhz, "role": "ue"})
        )

    # The scale-up target must land in the catalog before the policy that
    # references it (the catalog validates cross-refs at store time).
    nsds = [
        {
            "name": "lte-cell-5",
            "version": "v1",
            "members": cell_members("5"),
            "links": cell_links,
            "policies": [],
            "requires_frontend": True,
        },
        {
            "name": "lte-cell-1.4",
            "version": "v1",
            "members": cell_members("1.4"),
            "links": cell_links,
            "policies": [
                {
                    "rule_id": "scale-up",
                    "alarm_rule_ref": "cell-a-overload",
                    "action": "reconfigure_to",
                    "target": "lte-cell-5/v1",
                    "cooldown_s": 300,
                }
            ],
            "requires_frontend": True,
        },
    ]
    return {"vnfds": vnfds, "nsds": nsds}


def demo_inventory_dict() -> dict:
    return {
        "nodes": [
            {"node_id": "server-1", "vcpus_total": 8, "ram_mb_total": 16384, "disk_gb_total": 200},
            {"node_id": "server-2", "vcpus_total": 8, "ram_mb_total": 16384, "disk_gb_total": 200},
        ],
        "frontends": [
            {
                "frontend_id": "rru-1",
                "site_id": "site-a",
                "freq_min_hz": 2_300 * MHZ,
                "freq_max_hz": 2_600 * MHZ,
                "max_bw_hz": 20 * MHZ,
            }
        ],
        "bands": [
            {
                "band_id": "band-2400",
                "low_hz": 2_400 * MHZ,
                "high_hz": 2_410 * MHZ,
                "raster_hz": 100_000,
            }
        ],
    }


def demo_alarm_rules() -> list[dict]:
    # clear_hold far above the reconfiguration gap: the breach episode spans
    # the switchover, so the rule fires exactly once per overload.
    return [
        {
            "rule_id": "cell-a-overload",
            "selector": {"scope": "ns", "scope_id": "cell-a", "metric": "rb_occupied"},
            "predicate": "gt",
            "threshold": 5,
            "hold_s": 30,
            "clear_hold_s": 1200,
            "severity": "major",
        }
    ]


def demo_scenario_dict() -> dict:
    """Load ramps a 1.4 MHz cell past saturation; policy scales it to 5 MHz."""
    return {
        "seed": 7,
        "tick_s": 1.0,
        "duration_s": 300,
        "actions": [
            {"t": 0, "op": "deploy", "nsd": "lte-cell-1.4/v1", "ns_id": "cell-a"},
        ],
        "load_segments": [
            {"t_start": 0, "t_end": 60, "demand_rbs": 3},
            {"t_start": 60, "t_end": 180, "demand_rbs": {"from": 3, "to": 25}},
            {"t_start": 180, "t_end": 300, "demand_rbs": 25},
        ],
        "alarm_rules": demo_alarm_rules(),
        "config": {"webhook_token": DEMO_TOKEN},
        "catalog": demo_catalog_dict(),
        "inventory": demo_inventory_dict(),
    }


def baseline_scenario_dict() -> dict:
    """Nothing deployed: only the management plane's own flat footprint."""
    return {
        "seed": 7,
        "tick_s": 1.0,
        "duration_s": 60,
        "actions": [],
        "load_segments": [],
        "alarm_rules": [],
        "config": {"webhook_token": DEMO_TOKEN},
        "catalog": demo_catalog_dict(),
        "inventory": demo_inventory_dict(),
    }
