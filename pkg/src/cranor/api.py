"""REST API and event stream over one orchestrator instance.

Handlers never mutate engine state directly: every request enters through
the orchestrator's lock, which serializes it with the tick loop. The event
stream is newline-delimited JSON over a long-lived response; `replay=` pulls
buffered history and `once=true` closes after the replay (handy for tests
and polling clients).

Auth is a single shared bearer token. When configured, mutating endpoints
require `Authorization: Bearer <token>`; the alarm webhook instead carries
the token in its payload and is judged by the lifecycle engine.
"""
from __future__ import annotations

import json
import queue
import threading
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .catalog import NsDescriptor, VnfDescriptor, validate_nsd, validate_vnfd
from .config import ServiceConfig
from .errors import (
    Conflict,
    CranorError,
    FrontendBusy,
    IllegalState,
    Infeasible,
    NotFound,
    OutOfOrder,
    ValidationFailed,
)
from .monitor import MetricSample, SeriesKey
from .orchestrator import Orchestrator
from .sim import Scenario, ScenarioRunner


class ServiceState:
    """Mutable service-scope state shared by handlers and the ticker thread."""

    def __init__(self, orch: Orchestrator, config: ServiceConfig):
        self.orch = orch
        self.config = config
        self.runner: Optional[ScenarioRunner] = None
        self._ticker: Optional[threading.Thread] = None
        self._stop = threading.Event()

    def tick(self, n: int = 1) -> float:
        for _ in range(n):
            if self.runner is not None and not self.runner.done:
                self.runner.step()
            else:
                self.orch.tick()
        return self.orch.now

    def load_scenario(self, scenario: Scenario) -> None:
        scenario_catalog = scenario.catalog
        if scenario_catalog:
            have_v = {(v.name, v.version) for v in self.orch.catalog.list_vnfds()}
            have_n = {(n.name, n.version) for n in self.orch.catalog.list_nsds()}
            self.orch.catalog.load_dict(
                {
                    "vnfds": [
                        v for v in scenario_catalog.get("vnfds", [])
                        if (v["name"], v["version"]) not in have_v
                    ],
                    "nsds": [
                        n for n in scenario_catalog.get("nsds", [])
                        if (n["name"], n["version"]) not in have_n
                    ],
                }
            )
        self.runner = ScenarioRunner(scenario, self.orch)

    def start_ticker(self) -> None:
        if self.config.tick_mode != "auto" or self._ticker is not None:
            return
        interval = self.config.tick_s / self.config.time_scale

        def loop():
            while not self._stop.wait(interval):
                self.tick()

        self._ticker = threading.Thread(target=loop, name="tick-loop", daemon=True)
        self._ticker.start()

    def stop_ticker(self) -> None:
        self._stop.set()
        if self._ticker is not None:
            self._ticker.join(timeout=5)
            self._ticker = None


def create_app(orch: Orchestrator, config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    state = ServiceState(orch, config)
    app = FastAPI(title="cranor", version=__version__)
    app.state.service = state

    def require_token(request: Request) -> None:
        if not config.token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.token}":
            raise HTTPException(status_code=401, detail="bad token")

    @app.exception_handler(CranorError)
    async def _cranor_error(request: Request, exc: CranorError):
        status = 500
        body = {"error": str(exc)}
        if isinstance(exc, NotFound):
            status = 404
        elif isinstance(exc, (Conflict, IllegalState, FrontendBusy)):
            status = 409
        elif isinstance(exc, ValidationFailed):
            status = 400
            body["violations"] = exc.violations
        elif isinstance(exc, (Infeasible, OutOfOrder)):
            status = 400
        return JSONResponse(status_code=status, content=body)

    # -- health ----------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__, "t": orch.now}

    # -- catalog ----------------------------------------------------------

    @app.get("/vnfds")
    def list_vnfds():
        return [v.to_dict() for v in orch.catalog.list_vnfds()]

    @app.post("/vnfds", status_code=201, dependencies=[Depends(require_token)])
    def add_vnfd(doc: dict):
        vnfd = VnfDescriptor.from_dict(doc)
        violations = validate_vnfd(vnfd)
        if violations:
            raise ValidationFailed(violations)
        ref = orch.catalog.store_vnfd(vnfd)
        return {"ref": ref}

    @app.get("/nsds")
    def list_nsds():
        return [n.to_dict() for n in orch.catalog.list_nsds()]

    @app.post("/nsds", status_code=201, dependencies=[Depends(require_token)])
    def add_nsd(doc: dict):
        nsd = NsDescriptor.from_dict(doc)
        violations = validate_nsd(nsd, orch.catalog)
        if violations:
            raise ValidationFailed(violations)
        ref = orch.catalog.store_nsd(nsd)
        return {"ref": ref}

    # -- network services ---------------------------------------------------

    @app.post("/ns", status_code=201, dependencies=[Depends(require_token)])
    def deploy_ns(body: dict):
        nsd_ref = body.get("nsd")
        if not nsd_ref:
            raise ValidationFailed(["body must carry {'nsd': 'name/version'}"])
        ns_id = orch.deploy_ns(nsd_ref, ns_id=body.get("ns_id"))
        ns = orch.lifecycle.get_ns(ns_id)
        return {"ns_id": ns_id, "state": ns.state}

    @app.get("/ns")
    def list_ns():
        return [ns.to_dict() for ns in orch.lifecycle.list_ns()]

    @app.get("/ns/{ns_id}")
    def get_ns(ns_id: str):
        return orch.lifecycle.get_ns(ns_id).to_dict()

    @app.post("/ns/{ns_id}/reconfigure", status_code=202, dependencies=[Depends(require_token)])
    def reconfigure_ns(ns_id: str, body: dict):
        target = body.get("target")
        if not target:
            raise ValidationFailed(["body must carry {'target': 'name/version'}"])
        orch.reconfigure_ns(ns_id, target)
        return {"ns_id": ns_id, "state": orch.lifecycle.get_ns(ns_id).state}

    @app.delete("/ns/{ns_id}", status_code=202, dependencies=[Depends(require_token)])
    def terminate_ns(ns_id: str):
        orch.terminate_ns(ns_id)
        return {"ns_id": ns_id, "state": orch.lifecycle.get_ns(ns_id).state}

    # -- infrastructure ------------------------------------------------------

    @app.get("/infra")
    def infra():
        return {"nodes": orch.driver.capacity_report()}

    @app.get("/spectrum")
    def spectrum():
        bands = []
        for band in orch.rf.bands:
            assignments = [
                a.to_dict() for a in orch.rf.assignments() if a.band_id == band.band_id
            ]
            sites = sorted({a["site_id"] for a in assignments})
            bands.append(
                {
                    **band.to_dict(),
                    "assignments": assignments,
                    "occupancy_by_site": {
                        s: orch.rf.occupancy(band.band_id, s) for s in sites
                    },
                }
            )
        return {"bands": bands}

    @app.get("/tasks")
    def tasks(ns_id: Optional[str] = None):
        return [t.to_dict() for t in orch.queue.tasks(ns_id)]

    # -- metrics and alarms ---------------------------------------------------

    @app.get("/metrics/query")
    def metrics_query(
        scope: str, scope_id: str, metric: str,
        t0: float = Query(default=float("-inf")),
        t1: float = Query(default=float("inf")),
    ):
        key = SeriesKey(scope=scope, scope_id=scope_id, metric=metric)
        bad = key.violations()
        if bad:
            raise ValidationFailed(bad)
        samples = orch.store.query_range(key, t0, t1)
        return {"series": key.to_dict(), "samples": [[t, v] for t, v in samples]}

    @app.get("/metrics/series")
    def metrics_series():
        return {"series": [k.to_dict() for k in orch.store.keys()]}

    @app.post("/metrics/ingest", dependencies=[Depends(require_token)])
    def metrics_ingest(body: dict):
        key = SeriesKey.from_dict(body["series"])
        orch.ingest(MetricSample(key, float(body["t"]), float(body["value"])))
        return {"ok": True}

    @app.post("/alarms/webhook")
    def alarms_webhook(payload: dict):
        decision = orch.handle_webhook(payload)
        if decision["decision"] == "suppressed" and decision["reason"] == "unauthorized":
            return JSONResponse(status_code=401, content=decision)
        return decision

    @app.get("/alarms/rules")
    def alarm_rules():
        return [r.to_dict() for r in orch.evaluator.rules.values()]

    # -- scenario control ------------------------------------------------------

    @app.post("/sim/scenario", status_code=202, dependencies=[Depends(require_token)])
    def load_scenario(doc: dict):
        scenario = Scenario.from_dict(doc)
        state.load_scenario(scenario)
        return {"loaded": True, "duration_s": scenario.duration_s, "t": orch.now}

    @app.post("/sim/tick", dependencies=[Depends(require_token)])
    def sim_tick(n: int = 1):
        if config.tick_mode != "manual":
            raise IllegalState("manual ticking requires tick_mode=manual")
        now = state.tick(n)
        return {"now": now}

    # -- event stream -----------------------------------------------------------

    @app.get("/events")
    def events(replay: int = 0, once: bool = False):
        def stream():
            subscription = None
            try:
                if not once:
                    subscription = orch.bus.subscribe()
                for record in orch.bus.replay(replay):
                    yield json.dumps(record, sort_keys=True) + "\n"
                if once:
                    return
                while True:
                    try:
                        record = subscription.get(timeout=30.0)
                        yield json.dumps(record, sort_keys=True) + "\n"
                    except queue.Empty:
                        yield "\n"  # keepalive
            finally:
                if subscription is not None:
                    orch.bus.unsubscribe(subscription)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    console_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if console_dist.is_dir():
        app.mount("/console", StaticFiles(directory=console_dist, html=True), name="console")

    return app
