"""Command-line interface.

Two families of commands:

* `serve` runs the orchestration service (REST API + event stream) over an
  inventory file, persisting a snapshot on shutdown and restoring it on the
  next start.
* Client subcommands (`vnfd`, `nsd`, `ns`, `spectrum`, `tasks`) talk to a
  running server. `sim run` is fully offline: it executes a scenario file
  against a fresh in-process engine and emits the report JSON.
"""
from __future__ import annotations

import json
import os
import signal
import sys
from pathlib import Path

import click
import requests

from .catalog import Catalog
from .config import ServiceConfig
from .errors import CranorError
from .infra import Inventory
from .sim import Scenario, report_to_json, run_scenario


def _server(ctx) -> str:
    return ctx.obj["server"]


def _headers(ctx) -> dict:
    token = ctx.obj.get("token")
    return {"Authorization": f"Bearer {token}"} if token else {}


def _request(ctx, method: str, path: str, **kwargs):
    url = _server(ctx).rstrip("/") + path
    try:
        resp = requests.request(method, url, headers=_headers(ctx), timeout=30, **kwargs)
    except requests.RequestException as exc:
        raise click.ClickException(f"cannot reach server at {url}: {exc}")
    if resp.status_code >= 400:
        try:
            detail = resp.json()
        except ValueError:
            detail = resp.text
        raise click.ClickException(f"{resp.status_code}: {detail}")
    return resp.json()


@click.group()
@click.option("--server", default=lambda: os.environ.get("OOCRAN_SERVER", "http://127.0.0.1:8460"),
              show_default="http://127.0.0.1:8460", help="Base URL of a running service.")
@click.option("--token", default=lambda: os.environ.get("OOCRAN_TOKEN", ""), help="Bearer token.")
@click.pass_context
def main(ctx, server, token):
    """Orchestration service for simulated C-RAN network services."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["token"] = token


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------


@main.command()
@click.option("--port", type=int, default=None, help="Listen port (env OOCRAN_PORT).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(path_type=Path), default=None,
              help="Descriptor store + snapshot directory (env OOCRAN_DATA_DIR).")
@click.option("--inventory", "inventory_path", type=click.Path(path_type=Path), default=None,
              help="Infrastructure inventory JSON (env OOCRAN_INVENTORY).")
@click.option("--token", "serve_token", default=None, help="Shared bearer/webhook token (env OOCRAN_TOKEN).")
@click.option("--tick-s", type=float, default=1.0, show_default=True, help="Simulated seconds per tick.")
@click.option("--tick-mode", type=click.Choice(["auto", "manual"]), default="auto", show_default=True,
              help="auto: wall-clock timer drives ticks; manual: POST /sim/tick.")
@click.option("--time-scale", type=float, default=1.0, show_default=True,
              help="Simulated seconds per wall second in auto mode.")
def serve(port, host, data_dir, inventory_path, serve_token, tick_s, tick_mode, time_scale):
    """Run the orchestration service."""
    import uvicorn

    from .api import create_app
    from .orchestrator import Orchestrator, OrchestratorConfig
    from .snapshot import read_snapshot, restore_snapshot, write_snapshot

    config = ServiceConfig.from_env(
        port=port, data_dir=data_dir, inventory_path=inventory_path,
        token=serve_token, tick_s=tick_s, tick_mode=tick_mode, time_scale=time_scale,
    )
    if config.inventory_path is None:
        click.echo("error: --inventory (or OOCRAN_INVENTORY) is required", err=True)
        sys.exit(1)
    try:
        inventory = Inventory.from_file(config.inventory_path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot load inventory {config.inventory_path}: {exc}", err=True)
        sys.exit(1)

    config.data_dir.mkdir(parents=True, exist_ok=True)
    catalog = Catalog(data_dir=config.data_dir / "catalog")
    orch = Orchestrator(
        catalog,
        inventory,
        OrchestratorConfig(webhook_token=config.token, tick_s=config.tick_s),
    )
    if config.snapshot_path.exists():
        restore_snapshot(orch, read_snapshot(config.snapshot_path))
        click.echo(f"restored snapshot from {config.snapshot_path}")

    app = create_app(orch, config)
    state = app.state.service
    state.start_ticker()
    server = uvicorn.Server(
        uvicorn.Config(app, host=host, port=config.port, log_level="warning")
    )

    # Graceful shutdown on SIGTERM/SIGINT regardless of uvicorn's own signal
    # wiring: flip the flag, let the serve loop drain, then snapshot.
    def _request_exit(signum, frame):
        server.should_exit = True

    signal.signal(signal.SIGTERM, _request_exit)
    signal.signal(signal.SIGINT, _request_exit)
    try:
        server.run()
    finally:
        state.stop_ticker()
        path = write_snapshot(orch, config.snapshot_path)
        click.echo(f"snapshot written to {path}")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


@main.group()
def vnfd():
    """Manage VNF descriptors."""


@vnfd.command("add")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def vnfd_add(ctx, file):
    doc = json.loads(file.read_text())
    out = _request(ctx, "POST", "/vnfds", json=doc)
    click.echo(out["ref"])


@vnfd.command("list")
@click.pass_context
def vnfd_list(ctx):
    for v in _request(ctx, "GET", "/vnfds"):
        profile = v.get("radio_profile") or {}
        extra = f" {profile.get('bandwidth_mhz')} MHz {profile.get('role')}" if profile else ""
        click.echo(f"{v['name']}/{v['version']} kind={v['kind']}{extra}")


@main.group()
def nsd():
    """Manage NS descriptors."""


@nsd.command("add")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def nsd_add(ctx, file):
    doc = json.loads(file.read_text())
    out = _request(ctx, "POST", "/nsds", json=doc)
    click.echo(out["ref"])


@nsd.command("list")
@click.pass_context
def nsd_list(ctx):
    for n in _request(ctx, "GET", "/nsds"):
        click.echo(f"{n['name']}/{n['version']} members={len(n['members'])} links={len(n['links'])}")


# ---------------------------------------------------------------------------
# network services
# ---------------------------------------------------------------------------


@main.group()
def ns():
    """Deploy and manage network services."""


@ns.command("deploy")
@click.option("--nsd", "nsd_ref", required=True, help="Descriptor reference name/version.")
@click.option("--id", "ns_id", default=None, help="Explicit NS id.")
@click.pass_context
def ns_deploy(ctx, nsd_ref, ns_id):
    body = {"nsd": nsd_ref}
    if ns_id:
        body["ns_id"] = ns_id
    out = _request(ctx, "POST", "/ns", json=body)
    click.echo(out["ns_id"])


@ns.command("list")
@click.pass_context
def ns_list(ctx):
    for item in _request(ctx, "GET", "/ns"):
        click.echo(f"{item['ns_id']} {item['state']} nsd={item['nsd_ref']}")


@ns.command("reconfigure")
@click.argument("ns_id")
@click.option("--target", required=True, help="Target NSD reference name/version.")
@click.pass_context
def ns_reconfigure(ctx, ns_id, target):
    out = _request(ctx, "POST", f"/ns/{ns_id}/reconfigure", json={"target": target})
    click.echo(f"{out['ns_id']} {out['state']}")


@ns.command("terminate")
@click.argument("ns_id")
@click.pass_context
def ns_terminate(ctx, ns_id):
    out = _request(ctx, "DELETE", f"/ns/{ns_id}")
    click.echo(f"{out['ns_id']} {out['state']}")


# ---------------------------------------------------------------------------
# infrastructure views
# ---------------------------------------------------------------------------


@main.command()
@click.pass_context
def spectrum(ctx):
    """Show spectrum bands and live carrier assignments."""
    data = _request(ctx, "GET", "/spectrum")
    for band in data["bands"]:
        click.echo(f"{band['band_id']} [{band['low_hz']}..{band['high_hz']}] raster={band['raster_hz']}")
        for a in band["assignments"]:
            click.echo(
                f"  {a['assignment_id']} site={a['site_id']} center={a['center_hz']} "
                f"bw={a['bw_hz']} ns={a['owner_ns_id']}"
            )


@main.command()
@click.option("--ns-id", default=None)
@click.pass_context
def tasks(ctx, ns_id):
    """Show task queue records."""
    path = "/tasks" + (f"?ns_id={ns_id}" if ns_id else "")
    for t in _request(ctx, "GET", path):
        click.echo(
            f"{t['task_id']} ns={t['ns_id']} {t['kind']} {t['state']} attempts={t['attempts']}"
        )


@main.command()
@click.pass_context
def infra(ctx):
    """Show per-node capacity."""
    data = _request(ctx, "GET", "/infra")
    for node in data["nodes"]:
        a, tot = node["allocated"], node["totals"]
        click.echo(
            f"{node['node_id']} vcpus {a['vcpus']}/{tot['vcpus']} "
            f"ram {a['ram_mb']}/{tot['ram_mb']} disk {a['disk_gb']}/{tot['disk_gb']}"
        )


# ---------------------------------------------------------------------------
# offline scenario runner
# ---------------------------------------------------------------------------


@main.group()
def sim():
    """Deterministic scenario runs (no server needed)."""


@sim.command("run")
@click.argument("scenario_file", type=click.Path(exists=True, path_type=Path))
@click.option("--report", "report_path", type=click.Path(path_type=Path), default=None,
              help="Write the report JSON here instead of stdout.")
@click.option("--inventory", "inventory_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Inventory JSON if the scenario embeds none.")
def sim_run(scenario_file, report_path, inventory_path):
    """Execute SCENARIO_FILE to completion and emit its report."""
    try:
        scenario = Scenario.from_file(scenario_file)
        inventory = Inventory.from_file(inventory_path) if inventory_path else None
        report = run_scenario(scenario, inventory=inventory)
    except (CranorError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc))
    payload = report_to_json(report)
    if report_path:
        report_path.write_text(payload)
        downtime = ", ".join(
            f"{w['ns_id']}: {w['length_s']}s" for w in report["downtime"]
        ) or "none"
        click.echo(f"report written to {report_path}")
        click.echo(f"events={len(report['events'])} series={len(report['traces'])} downtime={downtime}")
    else:
        click.echo(payload)


if __name__ == "__main__":
    main()
