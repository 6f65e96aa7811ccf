/** DOM wiring: table, charts, feeds, action buttons, load slider. */

import { ApiClient, ApiError } from "./api.js";
import { drawChart } from "./charts.js";
import { EventStream } from "./stream.js";
import { allowedActions, Dashboard } from "./viewmodel.js";

const base = window.location.origin;
const token =
  new URLSearchParams(window.location.search).get("token") ??
  window.localStorage.getItem("cranor-token") ??
  "";
if (token) window.localStorage.setItem("cranor-token", token);

const api = new ApiClient(base, token);
const dash = new Dashboard();

const el = (id: string) => document.getElementById(id)!;
const banner = el("banner");
const tableBody = el("ns-rows") as HTMLTableSectionElement;

let selectedNs: string | null = null;

function toast(message: string): void {
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = message;
  el("toasts").appendChild(node);
  setTimeout(() => node.remove(), 6000);
}

async function act(label: string, call: () => Promise<unknown>): Promise<void> {
  try {
    await call();
  } catch (err) {
    toast(err instanceof ApiError ? `${label}: ${err.message}` : `${label} failed`);
  }
}

function renderTable(): void {
  tableBody.textContent = "";
  for (const nsId of dash.nsIds()) {
    const row = dash.rows.get(nsId)!;
    if (selectedNs === null) selectedNs = nsId;
    const tr = document.createElement("tr");
    if (nsId === selectedNs) tr.classList.add("selected");
    tr.addEventListener("click", () => {
      selectedNs = nsId;
      renderTable();
    });

    const cells = [
      row.nsId,
      row.nsdRef,
      row.state,
      row.capacityRbs ? `${row.capacityRbs} RB` : "-",
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    tr.children[2].classList.add(`state-${row.state.toLowerCase()}`);
    if (row.errorReason) (tr.children[2] as HTMLElement).title = row.errorReason;

    const actions = allowedActions(row.state);
    const td = document.createElement("td");
    const reconfigure = document.createElement("button");
    reconfigure.textContent = "Reconfigure";
    reconfigure.disabled = !actions.reconfigure;
    reconfigure.addEventListener("click", (ev) => {
      ev.stopPropagation();
      const target = (el("target-nsd") as HTMLInputElement).value.trim();
      if (!target) {
        toast("set a target NSD (name/version) first");
        return;
      }
      void act("reconfigure", () => api.reconfigureNs(nsId, target));
    });
    const terminate = document.createElement("button");
    terminate.textContent = "Terminate";
    terminate.disabled = !actions.terminate;
    terminate.addEventListener("click", (ev) => {
      ev.stopPropagation();
      void act("terminate", () => api.terminateNs(nsId));
    });
    td.append(reconfigure, terminate);
    tr.appendChild(td);
    tableBody.appendChild(tr);
  }
}

function renderFeeds(): void {
  const alarmList = el("alarm-feed");
  alarmList.textContent = "";
  for (const item of dash.alarmFeed.slice(-12).reverse()) {
    const li = document.createElement("li");
    li.textContent = `t=${item.t} ${item.text}`;
    alarmList.appendChild(li);
  }
  const taskList = el("task-feed");
  taskList.textContent = "";
  for (const item of dash.taskFeed.slice(-12).reverse()) {
    const li = document.createElement("li");
    li.textContent = `t=${item.t} ${item.text}`;
    taskList.appendChild(li);
  }
}

function renderCharts(): void {
  if (!selectedNs) return;
  const ns = selectedNs;
  const path = (metric: string) => `ns/${ns}/${metric}`;
  drawChart(el("chart-cpu") as HTMLCanvasElement, `cpu_pct ${ns}`, [
    { label: "cpu %", color: "#58a6ff", samples: dash.samples(path("cpu_pct")) },
  ]);
  drawChart(el("chart-ram") as HTMLCanvasElement, `ram_mb ${ns}`, [
    { label: "ram MB", color: "#d2a8ff", samples: dash.samples(path("ram_mb")) },
  ]);
  drawChart(el("chart-rb") as HTMLCanvasElement, `resource blocks ${ns}`, [
    { label: "occupied", color: "#3fb950", samples: dash.samples(path("rb_occupied")), step: true },
    { label: "capacity", color: "#f0883e", samples: dash.samples(path("rb_capacity")), step: true },
  ]);
  drawChart(el("chart-link") as HTMLCanvasElement, `link quality ${ns}`, [
    { label: "bler", color: "#f85149", samples: dash.samples(path("bler")) },
    { label: "snr dB", color: "#56d364", samples: dash.samples(path("snr_db")) },
  ]);
}

async function refreshNsList(): Promise<void> {
  dash.applyNsList(await api.listNs());
  renderTable();
}

const METRICS = ["cpu_pct", "ram_mb", "rb_occupied", "rb_capacity", "bler", "snr_db"];

async function refreshMetrics(): Promise<void> {
  if (!selectedNs) return;
  const ns = selectedNs;
  for (const metric of METRICS) {
    const path = `ns/${ns}/${metric}`;
    const since = dash.lastSampleT(path);
    const result = await api.metricsQuery("ns", ns, metric, since + 1e-9);
    dash.mergeSamples(path, result.samples);
  }
  renderCharts();
  renderTable(); // capacity column
}

function setConnected(ok: boolean): void {
  dash.connected = ok;
  banner.classList.toggle("hidden", ok);
  el("dot").className = ok ? "dot live" : "dot dead";
}

const stream = new EventStream(`${base}/events?replay=500`, {
  onEvent: (event) => {
    if (dash.applyEvent(event)) {
      renderTable();
      renderFeeds();
    }
  },
  onStatus: setConnected,
});

el("deploy").addEventListener("click", () => {
  const nsd = (el("deploy-nsd") as HTMLInputElement).value.trim();
  if (!nsd) {
    toast("set an NSD reference (name/version) first");
    return;
  }
  void act("deploy", async () => {
    await api.deployNs(nsd);
    await refreshNsList();
  });
});

const slider = el("load-slider") as HTMLInputElement;
slider.addEventListener("change", () => {
  void act("set load", async () => {
    const health = await api.health();
    await api.setLoad(Number(slider.value), health.t);
    el("load-value").textContent = `${slider.value} RB`;
  });
});
slider.addEventListener("input", () => {
  el("load-value").textContent = `${slider.value} RB`;
});

void (async () => {
  await act("initial load", refreshNsList);
  void stream.run();
  setInterval(() => void act("metrics", refreshMetrics), 1000);
  setInterval(() => void act("table", refreshNsList), 5000);
})();
