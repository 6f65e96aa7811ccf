import pytest

from cranor.catalog import Catalog
from cranor.fixtures import DEMO_TOKEN, demo_catalog_dict, demo_inventory_dict
from cranor.infra import Inventory
from cranor.orchestrator import Orchestrator, OrchestratorConfig

ACCEPTANCE_RESULTS: list[str] = []


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    setattr(item, "rep_" + report.when, report)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def demo_catalog():
    catalog = Catalog()
    catalog.load_dict(demo_catalog_dict())
    return catalog


@pytest.fixture
def demo_inventory():
    return Inventory.from_dict(demo_inventory_dict())


@pytest.fixture
def orch(demo_catalog, demo_inventory):
    return Orchestrator(
        demo_catalog,
        demo_inventory,
        OrchestratorConfig(webhook_token=DEMO_TOKEN),
    )
