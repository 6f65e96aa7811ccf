import itertools

import pytest
from hypothesis import given, strategies as st

from cranor.catalog import (
    Catalog,
    Flavor,
    LTE_BANDWIDTHS_MHZ,
    MetricModel,
    NsDescriptor,
    NsLink,
    NsMember,
    PolicyRule,
    RadioProfile,
    VnfDescriptor,
    validate_nsd,
    validate_vnfd,
)
from cranor.errors import Conflict, NotFound, ValidationFailed


def make_vnfd(name="lte-enb-5", kind="radio", bandwidth=5.0, role="enb",
              vcpus=2, ram=3600, disk=8, version="v1"):
    return VnfDescriptor(
        name=name,
        version=version,
        kind=kind,
        flavor=Flavor(vcpus, ram, disk),
        metric_model=MetricModel(2.0, 0.6, ram),
        radio_profile=RadioProfile(bandwidth, role) if kind == "radio" else None,
        image_ref=f"images/{name}",
    )


class TestValidateVnfd:
    def test_5mhz_enb_descriptor_ok(self):
        # 5 MHz cell profile: 2 vcpus, 3600 MB ram, 8 GB disk
        assert validate_vnfd(make_vnfd()) == []

    def test_radio_kind_requires_radio_profile(self):
        vnfd = VnfDescriptor(
            name="x", version="v1", kind="radio",
            flavor=Flavor(1, 512, 4), metric_model=MetricModel(1, 0, 512),
        )
        assert "radio kind requires radio_profile" in validate_vnfd(vnfd)

    def test_bandwidth_outside_lte_set(self):
        vnfd = make_vnfd(bandwidth=7.0)
        assert "bandwidth not in LTE set" in validate_vnfd(vnfd)

    @pytest.mark.parametrize("field,value", [("vcpus", 0), ("ram_mb", -1), ("disk_gb", 0)])
    def test_flavor_must_be_positive(self, field, value):
        kwargs = {"vcpus": 1, "ram_mb": 512, "disk_gb": 4}
        kwargs[field] = value
        vnfd = VnfDescriptor(
            name="x", version="v1", kind="generic",
            flavor=Flavor(**kwargs), metric_model=MetricModel(1, 0, 512),
        )
        assert any(field in v for v in validate_vnfd(vnfd))

    def test_bler_out_of_range(self):
        vnfd = VnfDescriptor(
            name="x", version="v1", kind="generic",
            flavor=Flavor(1, 512, 4),
            metric_model=MetricModel(1, 0, 512, bler_nominal=1.5),
        )
        assert any("bler" in v for v in validate_vnfd(vnfd))


def chain_nsd(catalog, name="cell", links=None, members=None, requires_frontend=True,
              policies=(), version="v1"):
    members = members or (
        NsMember("enb", "lte-enb-5/v1"),
        NsMember("chan", "lte-chan-5/v1"),
        NsMember("ue", "lte-ue-5/v1"),
    )
    links = links if links is not None else (
        NsLink("enb", "chan", "radio"),
        NsLink("chan", "ue", "ip"),
    )
    return NsDescriptor(
        name=name, version=version, members=tuple(members), links=tuple(links),
        policies=tuple(policies), requires_frontend=requires_frontend,
    )


@pytest.fixture
def radio_catalog():
    catalog = Catalog()
    catalog.store_vnfd(make_vnfd("lte-enb-5", role="enb"))
    catalog.store_vnfd(make_vnfd("lte-chan-5", role="channel", vcpus=1, ram=512, disk=4))
    catalog.store_vnfd(make_vnfd("lte-ue-5", role="ue", vcpus=1, ram=512, disk=4))
    catalog.store_vnfd(make_vnfd("worker", kind="generic", vcpus=1, ram=512, disk=4))
    return catalog


class TestValidateNsd:
    def test_chain_with_radio_and_ip_links_ok(self, radio_catalog):
        assert validate_nsd(chain_nsd(radio_catalog), radio_catalog) == []

    def test_unresolved_member(self, radio_catalog):
        nsd = chain_nsd(
            radio_catalog,
            members=(NsMember("enb", "lte-enb-5/v1"), NsMember("chan", "missing/v1"),
                     NsMember("ue", "lte-ue-5/v1")),
        )
        assert any("unresolved member" in v for v in validate_nsd(nsd, radio_catalog))

    def test_disconnected_graph(self, radio_catalog):
        nsd = chain_nsd(radio_catalog, links=(NsLink("enb", "chan", "radio"),))
        assert "link graph not connected" in validate_nsd(nsd, radio_catalog)

    def test_duplicate_member_ids(self, radio_catalog):
        nsd = chain_nsd(
            radio_catalog,
            members=(NsMember("enb", "lte-enb-5/v1"), NsMember("enb", "lte-chan-5/v1"),
                     NsMember("ue", "lte-ue-5/v1")),
        )
        assert "member_ids not unique" in validate_nsd(nsd, radio_catalog)

    def test_requires_frontend_must_match_enb_presence(self, radio_catalog):
        nsd = chain_nsd(radio_catalog, requires_frontend=False)
        assert any("requires_frontend" in v for v in validate_nsd(nsd, radio_catalog))

    def test_link_endpoint_must_resolve(self, radio_catalog):
        nsd = chain_nsd(
            radio_catalog,
            links=(NsLink("enb", "chan", "radio"), NsLink("chan", "ghost", "ip")),
        )
        assert any("ghost" in v for v in validate_nsd(nsd, radio_catalog))

    def test_policy_target_must_exist_and_differ(self, radio_catalog):
        target_less = chain_nsd(
            radio_catalog,
            policies=(PolicyRule("p1", "alarm-1", "reconfigure_to", target="nothere/v1"),),
        )
        assert any("not in catalog" in v for v in validate_nsd(target_less, radio_catalog))

        radio_catalog.store_nsd(chain_nsd(radio_catalog, name="self"))
        selfing = chain_nsd(
            radio_catalog, name="self",
            policies=(PolicyRule("p1", "alarm-1", "reconfigure_to", target="self/v1"),),
        )
        assert any("equals owning NSD" in v for v in validate_nsd(selfing, radio_catalog))

    def test_single_member_nsd_is_connected(self, radio_catalog):
        nsd = NsDescriptor(
            name="lone", version="v1",
            members=(NsMember("w", "worker/v1"),), requires_frontend=False,
        )
        assert validate_nsd(nsd, radio_catalog) == []


class TestStoreFetch:
    def test_round_trip_identity(self, radio_catalog):
        nsd = chain_nsd(radio_catalog, name="lte-cell")
        radio_catalog.store_nsd(nsd)
        fetched = radio_catalog.fetch_nsd("lte-cell", "v1")
        assert fetched.to_dict() == nsd.to_dict()

    def test_fetch_miss(self, radio_catalog):
        with pytest.raises(NotFound):
            radio_catalog.fetch_nsd("missing", "v1")

    def test_duplicate_store_conflict(self, radio_catalog):
        nsd = chain_nsd(radio_catalog, name="lte-cell")
        radio_catalog.store_nsd(nsd)
        with pytest.raises(Conflict):
            radio_catalog.store_nsd(nsd)

    def test_store_rejects_invalid(self, radio_catalog):
        bad = chain_nsd(radio_catalog, links=())
        with pytest.raises(ValidationFailed):
            radio_catalog.store_nsd(bad)

    def test_persistence_round_trip(self, radio_catalog, tmp_path):
        disk_catalog = Catalog(data_dir=tmp_path)
        vnfd = make_vnfd("persisted")
        disk_catalog.store_vnfd(vnfd)
        reloaded = Catalog(data_dir=tmp_path)
        assert reloaded.fetch_vnfd("persisted", "v1").to_dict() == vnfd.to_dict()


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

flavors = st.builds(
    Flavor,
    vcpus=st.integers(1, 64),
    ram_mb=st.integers(1, 1 << 20),
    disk_gb=st.integers(1, 4096),
)
metric_models = st.builds(
    MetricModel,
    cpu_base_pct=st.floats(0, 100, allow_nan=False),
    cpu_per_rb_pct=st.floats(0, 5, allow_nan=False),
    ram_fixed_mb=st.floats(1, 1 << 20, allow_nan=False),
    bler_nominal=st.floats(0, 1, allow_nan=False),
    snr_nominal_db=st.floats(-20, 60, allow_nan=False),
)
names = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Nd"), whitelist_characters="-"),
    min_size=1, max_size=12,
).filter(lambda s: "/" not in s)


@st.composite
def vnfds(draw):
    kind = draw(st.sampled_from(["radio", "generic"]))
    profile = None
    if kind == "radio":
        profile = RadioProfile(
            bandwidth_mhz=draw(st.sampled_from(LTE_BANDWIDTHS_MHZ)),
            role=draw(st.sampled_from(["enb", "ue", "channel"])),
        )
    return VnfDescriptor(
        name=draw(names), version=draw(names), kind=kind,
        flavor=draw(flavors), metric_model=draw(metric_models),
        radio_profile=profile, image_ref=draw(st.text(max_size=20)),
    )


@given(vnfds())
def test_vnfd_store_fetch_round_trip(vnfd):
    catalog = Catalog()
    catalog.store_vnfd(vnfd)
    fetched = catalog.fetch_vnfd(vnfd.name, vnfd.version)
    assert fetched.to_dict() == vnfd.to_dict()
    assert VnfDescriptor.from_dict(fetched.to_dict()) == vnfd


@given(vnfds())
def test_vnfd_json_round_trip(vnfd):
    assert VnfDescriptor.from_dict(vnfd.to_dict()).to_dict() == vnfd.to_dict()


# ---------------------------------------------------------------------------
# brute-force oracle: small NSDs accepted iff a naive invariant checker agrees
# ---------------------------------------------------------------------------


def naive_nsd_accepts(nsd: NsDescriptor, catalog: Catalog) -> bool:
    """Re-check every NSD invariant with independent, unoptimized code."""
    ids = [m.member_id for m in nsd.members]
    if not ids or len(set(ids)) != len(ids):
        return False
    lookup = {}
    for m in nsd.members:
        if m.replicas < 1:
            return False
        try:
            lookup[m.member_id] = catalog.fetch_vnfd_ref(m.vnfd_ref)
        except Exception:
            return False
    for link in nsd.links:
        if link.link_kind not in ("ip", "radio"):
            return False
        if link.a == link.b:
            return False
        if link.a not in ids or link.b not in ids:
            return False
        if link.link_kind == "radio":
            enbs = sum(
                1 for e in (link.a, link.b)
                if lookup[e].radio_profile and lookup[e].radio_profile.role == "enb"
            )
            if enbs > 1:
                return False
    # Connectivity via transitive closure over adjacency (matrix powers).
    n = len(ids)
    idx = {m: i for i, m in enumerate(ids)}
    reach = [[i == j for j in range(n)] for i in range(n)]
    for link in nsd.links:
        reach[idx[link.a]][idx[link.b]] = True
        reach[idx[link.b]][idx[link.a]] = True
    for _ in range(n):
        for i, j, k in itertools.product(range(n), repeat=3):
            if reach[i][k] and reach[k][j]:
                reach[i][j] = True
    if not all(all(row) for row in reach):
        return False
    # Channel members need a radio neighbour.
    for m in nsd.members:
        profile = lookup[m.member_id].radio_profile
        if profile and profile.role == "channel":
            neighbours = [
                other for link in nsd.links for other in (link.a, link.b)
                if m.member_id in (link.a, link.b) and other != m.member_id
            ]
            if not any(lookup[o].kind == "radio" for o in neighbours):
                return False
    has_enb = any(
        v.radio_profile and v.radio_profile.role == "enb" for v in lookup.values()
    )
    if nsd.requires_frontend != has_enb:
        return False
    for p in nsd.policies:
        if p.cooldown_s < 0 or p.action not in ("reconfigure_to", "notify_only"):
            return False
        if p.action == "reconfigure_to":
            if not p.target:
                return False
            try:
                target = catalog.fetch_nsd_ref(p.target)
            except Exception:
                return False
            if (target.name, target.version) == (nsd.name, nsd.version):
                return False
    return True


@given(st.data())
def test_validate_nsd_matches_brute_force_oracle(data):
    catalog = Catalog()
    catalog.store_vnfd(make_vnfd("lte-enb-5", role="enb"))
    catalog.store_vnfd(make_vnfd("lte-chan-5", role="channel", vcpus=1, ram=512, disk=4))
    catalog.store_vnfd(make_vnfd("lte-ue-5", role="ue", vcpus=1, ram=512, disk=4))
    catalog.store_vnfd(make_vnfd("worker", kind="generic", vcpus=1, ram=512, disk=4))
    refs = ["lte-enb-5/v1", "lte-chan-5/v1", "lte-ue-5/v1", "worker/v1", "missing/v1"]

    n_members = data.draw(st.integers(1, 6), label="n_members")
    members = tuple(
        NsMember(f"m{i}", data.draw(st.sampled_from(refs), label=f"ref{i}"))
        for i in range(n_members)
    )
    ids = [m.member_id for m in members]
    n_links = data.draw(st.integers(0, 8), label="n_links")
    links = tuple(
        NsLink(
            data.draw(st.sampled_from(ids), label=f"a{i}"),
            data.draw(st.sampled_from(ids), label=f"b{i}"),
            data.draw(st.sampled_from(["ip", "radio"]), label=f"kind{i}"),
        )
        for i in range(n_links)
    )
    requires_frontend = data.draw(st.booleans(), label="requires_frontend")
    nsd = NsDescriptor(
        name="probe", version="v1", members=members, links=links,
        requires_frontend=requires_frontend,
    )
    assert (validate_nsd(nsd, catalog) == []) == naive_nsd_accepts(nsd, catalog)
