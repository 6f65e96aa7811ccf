import random

import pytest
from hypothesis import given, settings, strategies as st

from cranor.catalog import Flavor
from cranor.errors import Infeasible
from cranor.infra import (
    Command,
    ComputeNode,
    Inventory,
    RfFrontend,
    SimulatedDriver,
    duration_for,
    place,
)
from cranor.rf import RfPool, SpectrumBand

MHZ = 1_000_000


def node(node_id="n1", vcpus=4, ram=8000, disk=100):
    return ComputeNode(node_id, vcpus, ram, disk)


def exhaustive_feasible(demands: list[Flavor], nodes: list[ComputeNode]) -> bool:
    """Try every demand->node assignment; the independent feasibility oracle."""

    def recurse(i, used):
        if i == len(demands):
            return True
        d = demands[i]
        for n in nodes:
            u = used[n.node_id]
            if (
                u[0] + d.vcpus <= n.vcpus_total
                and u[1] + d.ram_mb <= n.ram_mb_total
                and u[2] + d.disk_gb <= n.disk_gb_total
            ):
                used[n.node_id] = [u[0] + d.vcpus, u[1] + d.ram_mb, u[2] + d.disk_gb]
                if recurse(i + 1, used):
                    return True
                used[n.node_id] = u
        return False

    return recurse(0, {n.node_id: [n.vcpus_used, n.ram_mb_used, n.disk_gb_used] for n in nodes})


class TestPlace:
    def test_single_feasible_node(self):
        mapping = place([Flavor(2, 3600, 8)], [node()])
        assert mapping == {0: "n1"}

    def test_ffd_spreads_big_demands_first(self):
        # Sorted by vcpus desc the two 2-vcpu demands go to separate nodes
        # (3-vcpu node fills to 1 free), then the 1-vcpu fits beside the first.
        nodes = [node("n1", vcpus=3, ram=8000), node("n2", vcpus=2, ram=8000)]
        demands = [Flavor(2, 1000, 10), Flavor(2, 1000, 10), Flavor(1, 500, 10)]
        mapping = place(demands, nodes)
        assert mapping == {0: "n1", 1: "n2", 2: "n1"}
        assert exhaustive_feasible(demands, nodes)

    def test_infeasible_when_no_node_fits(self):
        with pytest.raises(Infeasible):
            place([Flavor(8, 1000, 10)], [node(vcpus=4)])

    def test_tie_break_prefers_larger_ram(self):
        nodes = [node("n1", vcpus=2, ram=4000), node("n2", vcpus=2, ram=4000)]
        demands = [Flavor(2, 1000, 10), Flavor(2, 4000, 10)]
        mapping = place(demands, nodes)
        # The 4000 MB demand is placed first and takes n1.
        assert mapping[1] == "n1" and mapping[0] == "n2"

    def test_accounts_for_existing_allocations(self):
        n1 = node("n1", vcpus=4)
        n1.allocations["x"] = Flavor(3, 1000, 10)
        with pytest.raises(Infeasible):
            place([Flavor(2, 1000, 10)], [n1])

    def test_respects_all_dimensions(self):
        nodes = [node("n1", vcpus=8, ram=1000, disk=100)]
        with pytest.raises(Infeasible):
            place([Flavor(1, 2000, 10)], nodes)


flavor_st = st.builds(
    Flavor, vcpus=st.integers(1, 8), ram_mb=st.integers(256, 8192), disk_gb=st.integers(1, 50)
)


@settings(max_examples=200, deadline=None)
@given(
    demands=st.lists(flavor_st, min_size=1, max_size=8),
    nodes=st.lists(
        st.builds(
            ComputeNode,
            node_id=st.uuids().map(str),
            vcpus_total=st.integers(1, 16),
            ram_mb_total=st.integers(1024, 16384),
            disk_gb_total=st.integers(10, 200),
        ),
        min_size=1,
        max_size=4,
    ),
)
def test_ffd_feasible_implies_exhaustive_feasible(demands, nodes):
    try:
        mapping = place(demands, nodes)
    except Infeasible:
        return
    # Every FFD assignment must be realizable, so the oracle must agree.
    assert exhaustive_feasible(demands, nodes)
    by_node: dict[str, list[int]] = {}
    for i, node_id in mapping.items():
        by_node.setdefault(node_id, []).append(i)
    for n in nodes:
        picked = [demands[i] for i in by_node.get(n.node_id, [])]
        assert sum(f.vcpus for f in picked) <= n.vcpus_total
        assert sum(f.ram_mb for f in picked) <= n.ram_mb_total
        assert sum(f.disk_gb for f in picked) <= n.disk_gb_total


def make_driver(nodes=None):
    pool = RfPool(
        bands=[SpectrumBand("b1", 2400 * MHZ, 2410 * MHZ)],
        frontends=[RfFrontend("fe-0", "site-a", 2300 * MHZ, 2600 * MHZ, 20 * MHZ)],
    )
    return SimulatedDriver(nodes=nodes or [node()], rf=pool)


def cmd(kind, duration=1.0, **kwargs):
    return Command(
        command_id=f"c-{kind}-{random.randrange(1 << 30)}",
        kind=kind, ns_id="ns-1", duration_s=duration, **kwargs,
    )


class TestDriver:
    def test_allocate_on_empty_node(self):
        driver = make_driver()
        out = driver.apply(cmd("allocate_compute", vnf_id="v1", node_id="n1",
                               flavor=Flavor(1, 1500, 8)), issued_at=0)
        assert out.ok
        assert driver.nodes["n1"].allocations["v1"] == Flavor(1, 1500, 8)

    def test_free_unknown_allocation_fails(self):
        driver = make_driver()
        out = driver.apply(cmd("free_compute", vnf_id="ghost"), issued_at=0)
        assert out.status == "failed"
        assert "no such allocation" in out.detail

    def test_completion_time_is_additive(self):
        driver = make_driver()
        driver.apply(cmd("allocate_compute", vnf_id="v1", node_id="n1",
                         flavor=Flavor(1, 100, 1)), issued_at=0)
        out = driver.apply(cmd("boot_vnf", vnf_id="v1", duration=10.0), issued_at=0)
        assert out.completed_at == 10.0

    def test_failed_outcome_has_detail(self):
        driver = make_driver()
        out = driver.apply(cmd("stop_vnf", vnf_id="v1"), issued_at=0)
        assert out.status == "failed" and out.detail

    def test_boot_requires_allocation(self):
        driver = make_driver()
        out = driver.apply(cmd("boot_vnf", vnf_id="v1"), issued_at=0)
        assert out.status == "failed"

    def test_capacity_overflow_fails_cleanly(self):
        driver = make_driver([node(vcpus=2)])
        ok = driver.apply(cmd("allocate_compute", vnf_id="v1", node_id="n1",
                              flavor=Flavor(2, 100, 1)), issued_at=0)
        assert ok.ok
        out = driver.apply(cmd("allocate_compute", vnf_id="v2", node_id="n1",
                               flavor=Flavor(1, 100, 1)), issued_at=0)
        assert out.status == "failed"

    def test_link_requires_live_endpoints(self):
        driver = make_driver()
        out = driver.apply(cmd("link_vnfs", link={"a_vnf": "a", "b_vnf": "b"}), issued_at=0)
        assert out.status == "failed"

    def test_command_shape_validated(self):
        driver = make_driver()
        out = driver.apply(cmd("allocate_compute", vnf_id="v1"), issued_at=0)
        assert out.status == "failed" and "requires" in out.detail


class TestCapacityReport:
    def test_empty_infra(self):
        driver = make_driver()
        report = driver.capacity_report()
        assert report[0]["allocated"] == {"vcpus": 0, "ram_mb": 0, "disk_gb": 0}

    def test_allocation_shows_up(self):
        driver = make_driver()
        driver.apply(cmd("allocate_compute", vnf_id="v1", node_id="n1",
                         flavor=Flavor(2, 3600, 8)), issued_at=0)
        report = driver.capacity_report()
        assert report[0]["free"]["vcpus"] == 4 - 2
        assert report[0]["allocated"]["ram_mb"] == 3600

    def test_allocate_free_is_identity(self):
        driver = make_driver()
        before = driver.capacity_report()
        driver.apply(cmd("allocate_compute", vnf_id="v1", node_id="n1",
                         flavor=Flavor(2, 3600, 8)), issued_at=0)
        driver.apply(cmd("free_compute", vnf_id="v1"), issued_at=0)
        assert driver.capacity_report() == before


def test_capacity_safety_random_sequences():
    # 10^4 random allocate/free/boot/stop commands; no node ever exceeds any
    # dimension no matter how many commands fail.
    rng = random.Random(42)
    nodes = [node(f"n{i}", vcpus=8, ram=8192, disk=80) for i in range(3)]
    driver = make_driver(nodes)
    vnf_ids = [f"v{i}" for i in range(40)]
    for step in range(10_000):
        kind = rng.choice(["allocate_compute", "free_compute", "boot_vnf", "stop_vnf"])
        v = rng.choice(vnf_ids)
        if kind == "allocate_compute":
            c = cmd(kind, vnf_id=v, node_id=f"n{rng.randrange(3)}",
                    flavor=Flavor(rng.randint(1, 4), rng.randint(128, 4096), rng.randint(1, 20)))
        else:
            c = cmd(kind, vnf_id=v)
        driver.apply(c, issued_at=step)
        for n in driver.nodes.values():
            assert n.vcpus_used <= n.vcpus_total
            assert n.ram_mb_used <= n.ram_mb_total
            assert n.disk_gb_used <= n.disk_gb_total


class TestInventory:
    def test_round_trip(self, tmp_path):
        doc = {
            "nodes": [{"node_id": "n1", "vcpus_total": 4, "ram_mb_total": 1024, "disk_gb_total": 10}],
            "frontends": [{"frontend_id": "f1", "site_id": "s1", "freq_min_hz": 1,
                           "freq_max_hz": 10 * MHZ, "max_bw_hz": 5 * MHZ}],
            "bands": [{"band_id": "b1", "low_hz": 2400 * MHZ, "high_hz": 2410 * MHZ}],
        }
        path = tmp_path / "inv.json"
        import json

        path.write_text(json.dumps(doc))
        inv = Inventory.from_file(path)
        assert inv.nodes[0].vcpus_total == 4
        assert inv.bands[0].raster_hz == 100_000

    def test_invalid_frontend_rejected(self):
        with pytest.raises(ValueError):
            Inventory.from_dict(
                {"frontends": [{"frontend_id": "f1", "site_id": "s1", "freq_min_hz": 10,
                                "freq_max_hz": 5, "max_bw_hz": 1}]}
            )


def test_duration_defaults():
    assert duration_for("boot_vnf") == 10.0
    assert duration_for("stop_vnf") == 5.0
    assert duration_for("link_vnfs") == 1.0
    assert duration_for("boot_vnf", {"boot_vnf": 3.0}) == 3.0
    assert duration_for("stop_vnf", {"boot_vnf": 3.0}) == 5.0
