import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

import cranor.cli as cli_mod
from cranor.api import create_app
from cranor.catalog import Catalog
from cranor.config import ServiceConfig
from cranor.fixtures import DEMO_TOKEN, demo_catalog_dict, demo_inventory_dict
from cranor.infra import Inventory
from cranor.orchestrator import Orchestrator, OrchestratorConfig

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def live_server(monkeypatch):
    """Route the CLI's HTTP calls into an in-process TestClient."""
    catalog = Catalog()
    catalog.load_dict(demo_catalog_dict())
    orch = Orchestrator(
        catalog,
        Inventory.from_dict(demo_inventory_dict()),
        OrchestratorConfig(webhook_token=DEMO_TOKEN),
    )
    client = TestClient(create_app(orch, ServiceConfig(token=DEMO_TOKEN, tick_mode="manual")))

    def fake_request(method, url, headers=None, timeout=None, **kwargs):
        path = url.split("://", 1)[1].split("/", 1)[1]
        return client.request(method, "/" + path, headers=headers, **kwargs)

    monkeypatch.setattr(cli_mod.requests, "request", fake_request)
    return orch, client


class TestSimRun:
    def test_demo_scenario_writes_report(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            cli_mod.main, ["sim", "run", str(ROOT / "scenarios" / "demo.json"), "--report", str(out)]
        )
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["downtime"][0]["ns_id"] == "cell-a"
        assert "report written" in result.output

    def test_report_to_stdout_by_default(self, runner):
        result = runner.invoke(
            cli_mod.main, ["sim", "run", str(ROOT / "scenarios" / "baseline.json")]
        )
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["schema_version"] == 1

    def test_bad_scenario_exits_nonzero(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"duration_s": -5}))
        result = runner.invoke(cli_mod.main, ["sim", "run", str(bad)])
        assert result.exit_code == 1
        assert "duration_s" in result.output

    def test_scenario_without_inventory_uses_flag(self, runner, tmp_path):
        doc = json.loads((ROOT / "scenarios" / "baseline.json").read_text())
        del doc["inventory"]
        path = tmp_path / "no-inv.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(
            cli_mod.main,
            ["sim", "run", str(path), "--inventory", str(ROOT / "scenarios" / "inventory.json")],
        )
        assert result.exit_code == 0


class TestClientCommands:
    def args(self, *rest):
        return ["--server", "http://test", "--token", DEMO_TOKEN, *rest]

    def test_unknown_subcommand_exits_2(self, runner):
        result = runner.invoke(cli_mod.main, ["frobnicate"])
        assert result.exit_code == 2
        assert "Usage" in result.output or "No such command" in result.output

    def test_ns_deploy_prints_id(self, runner, live_server):
        result = runner.invoke(
            cli_mod.main, self.args("ns", "deploy", "--nsd", "lte-cell-1.4/v1", "--id", "cell-a")
        )
        assert result.exit_code == 0, result.output
        assert result.output.strip() == "cell-a"

    def test_ns_list_shows_state(self, runner, live_server):
        runner.invoke(cli_mod.main, self.args("ns", "deploy", "--nsd", "lte-cell-1.4/v1", "--id", "cell-a"))
        result = runner.invoke(cli_mod.main, self.args("ns", "list"))
        assert "cell-a Deploying nsd=lte-cell-1.4/v1" in result.output

    def test_vnfd_and_nsd_listing(self, runner, live_server):
        result = runner.invoke(cli_mod.main, self.args("vnfd", "list"))
        assert result.exit_code == 0
        assert "lte-enb-5/v1 kind=radio 5.0 MHz enb" in result.output
        result = runner.invoke(cli_mod.main, self.args("nsd", "list"))
        assert "lte-cell-1.4/v1 members=3 links=2" in result.output

    def test_vnfd_add_round_trip(self, runner, live_server, tmp_path):
        doc = demo_catalog_dict()["vnfds"][0] | {"name": "extra-enb"}
        path = tmp_path / "vnfd.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(cli_mod.main, self.args("vnfd", "add", str(path)))
        assert result.exit_code == 0
        assert result.output.strip() == "extra-enb/v1"

    def test_spectrum_and_tasks_views(self, runner, live_server):
        orch, client = live_server
        runner.invoke(cli_mod.main, self.args("ns", "deploy", "--nsd", "lte-cell-1.4/v1", "--id", "cell-a"))
        for _ in range(60):
            orch.tick()
        result = runner.invoke(cli_mod.main, self.args("spectrum"))
        assert "band-2400" in result.output and "ns=cell-a" in result.output
        result = runner.invoke(cli_mod.main, self.args("tasks", "--ns-id", "cell-a"))
        assert "boot_vnf Done" in result.output

    def test_api_error_surfaces_nonzero(self, runner, live_server):
        result = runner.invoke(cli_mod.main, self.args("ns", "terminate", "ghost"))
        assert result.exit_code == 1
        assert "404" in result.output

    def test_reconfigure_and_terminate(self, runner, live_server):
        orch, _ = live_server
        runner.invoke(cli_mod.main, self.args("ns", "deploy", "--nsd", "lte-cell-1.4/v1", "--id", "cell-a"))
        for _ in range(60):
            orch.tick()
        result = runner.invoke(
            cli_mod.main, self.args("ns", "reconfigure", "cell-a", "--target", "lte-cell-5/v1")
        )
        assert result.exit_code == 0
        assert "Reconfiguring" in result.output
        for _ in range(120):
            orch.tick()
        result = runner.invoke(cli_mod.main, self.args("ns", "terminate", "cell-a"))
        assert result.exit_code == 0
        assert "Terminating" in result.output
