// Review console: queue on the left, the selected step's diff and
// candidates in the middle, calibration tools at the bottom. Plain DOM
// code, no framework; state lives in this module and every mutation
// goes through render().

import { ApiClient, ApiError } from "./api.js";
import { diffWords, diffStats } from "./diff.js";
import type {
  Candidate,
  Manual,
  ManualSummary,
  ReviewItem,
  TrainResponse,
  ValidationReport,
  Verdict,
} from "./types.js";

type AppState = {
  client: ApiClient | null;
  connected: boolean;
  modelVersion: number | null;
  queue: ReviewItem[];
  selected: ReviewItem | null;
  manuals: ManualSummary[];
  openManual: Manual | null;
  lastTraining: TrainResponse | null;
  notice: string;
};

const state: AppState = {
  client: null,
  connected: false,
  modelVersion: null,
  queue: [],
  selected: null,
  manuals: [],
  openManual: null,
  lastTraining: null,
  notice: "",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = ""
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function notify(message: string): void {
  state.notice = message;
  render();
}

async function guard<T>(work: Promise<T>): Promise<T | null> {
  try {
    return await work;
  } catch (err) {
    if (err instanceof ApiError) {
      notify(`Request failed (${err.status}): ${JSON.stringify(err.detail)}`);
    } else {
      notify(`Request failed: ${String(err)}`);
    }
    return null;
  }
}

// --- actions ------------------------------------------------------------

async function connect(baseUrl: string, token: string): Promise<void> {
  const client = new ApiClient({ baseUrl, token: token || undefined });
  const health = await guard(client.health());
  if (health === null) return;
  state.client = client;
  state.connected = true;
  state.modelVersion = health.model_version;
  state.notice = `Connected; calibrator v${health.model_version}.`;
  await Promise.all([refreshQueue(), refreshManuals()]);
}

async function refreshQueue(): Promise<void> {
  if (!state.client) return;
  const result = await guard(state.client.reviewQueue());
  if (result === null) return;
  state.queue = result.items;
  if (
    state.selected &&
    !result.items.some(
      (i) =>
        i.manual_id === state.selected?.manual_id && i.step_id === state.selected?.step_id
    )
  ) {
    state.selected = null;
  }
  render();
}

async function refreshManuals(): Promise<void> {
  if (!state.client) return;
  const result = await guard(state.client.listManuals());
  if (result === null) return;
  state.manuals = result.manuals;
  render();
}

async function openManual(manualId: string, version?: number): Promise<void> {
  if (!state.client) return;
  const manual = await guard(state.client.getManual(manualId, version));
  if (manual === null) return;
  state.openManual = manual;
  render();
}

async function simplifyManual(manualId: string): Promise<void> {
  if (!state.client) return;
  notify(`Simplifying ${manualId}...`);
  const result = await guard(state.client.simplify(manualId));
  if (result === null) return;
  state.notice = `Simplified ${result.steps.length} steps with calibrator v${result.model_version}.`;
  await Promise.all([refreshQueue(), refreshManuals()]);
  if (state.openManual?.manual_id === manualId) await openManual(manualId);
}

async function sendVerdict(item: ReviewItem, verdict: Verdict): Promise<void> {
  if (!state.client) return;
  const result = await guard(state.client.submitVerdict(item.manual_id, item.step_id, verdict));
  if (result === null) return;
  state.notice = `Step ${item.step_id}: recorded ${verdict.verdict}, gold verdict ${result.gold.verdict}, manual now v${result.version}.`;
  state.selected = null;
  await refreshQueue();
}

async function trainCalibrator(epochs: number, seed: number): Promise<void> {
  if (!state.client) return;
  notify("Training calibrator...");
  const result = await guard(state.client.train({ epochs, seed }));
  if (result === null) return;
  state.lastTraining = result;
  state.modelVersion = result.model.version;
  state.notice = `Calibrator v${result.model.version} trained on ${result.trained_on} samples; final loss ${result.final_loss.toFixed(4)}.`;
  render();
}

// --- rendering ----------------------------------------------------------

function renderConnectBar(): HTMLElement {
  const bar = el("div", "connect-bar");
  const url = el("input");
  url.id = "base-url";
  url.value = localStorage.getItem("artext-url") ?? "http://127.0.0.1:8571";
  const token = el("input");
  token.id = "api-token";
  token.placeholder = "API token (optional)";
  token.type = "password";
  const button = el("button", "", state.connected ? "Reconnect" : "Connect");
  button.onclick = () => {
    localStorage.setItem("artext-url", url.value);
    void connect(url.value, token.value);
  };
  const status = el(
    "span",
    state.connected ? "status ok" : "status",
    state.connected ? `connected, calibrator v${state.modelVersion}` : "not connected"
  );
  bar.append(url, token, button, status);
  return bar;
}

function renderQueue(): HTMLElement {
  const panel = el("section", "queue");
  const head = el("div", "panel-head");
  head.append(el("h2", "", `Review queue (${state.queue.length})`));
  const refresh = el("button", "", "Refresh");
  refresh.onclick = () => void refreshQueue();
  head.append(refresh);
  panel.append(head);

  const list = el("ul", "queue-list");
  for (const item of state.queue) {
    const row = el("li", "queue-item");
    if (
      state.selected?.manual_id === item.manual_id &&
      state.selected?.step_id === item.step_id
    ) {
      row.classList.add("active");
    }
    row.append(el("strong", "", `${item.title} / step ${item.step_id}`));
    row.append(el("div", "muted", (item.simplified_text ?? "").slice(0, 80)));
    row.onclick = () => {
      state.selected = item;
      render();
    };
    list.append(row);
  }
  if (state.queue.length === 0) {
    list.append(el("li", "muted", "Nothing waiting for review."));
  }
  panel.append(list);
  return panel;
}

function renderDiff(before: string, after: string): HTMLElement {
  const spans = diffWords(before, after);
  const stats = diffStats(spans);
  const box = el("div", "diff");
  for (const span of spans) {
    const node = el("span", `diff-${span.op}`, span.text);
    box.append(node, document.createTextNode(" "));
  }
  const summary = el(
    "div",
    "muted",
    `${stats.same} kept, ${stats.deleted} removed, ${stats.inserted} added`
  );
  const wrap = el("div");
  wrap.append(box, summary);
  return wrap;
}

function renderChecks(report: ValidationReport): HTMLElement {
  const list = el("ul", "checks");
  for (const check of report.checks) {
    const row = el("li", check.passed ? "check ok" : "check bad");
    row.textContent = `${check.passed ? "pass" : "FAIL"} ${check.rule}: ${check.detail}`;
    list.append(row);
  }
  return list;
}

function renderCandidates(
  candidates: Candidate[],
  validation: ValidationReport[] | null,
  chosen: number | null
): HTMLElement {
  const table = el("table", "candidates");
  const head = el("tr");
  for (const label of ["#", "candidate", "p", "q", "validation"]) {
    head.append(el("th", "", label));
  }
  table.append(head);
  candidates.forEach((candidate, index) => {
    const row = el("tr", index === chosen ? "chosen" : "");
    row.append(el("td", "", String(candidate.candidate_index)));
    row.append(el("td", "candidate-text", candidate.text));
    row.append(el("td", "", candidate.raw_probability.toFixed(3)));
    row.append(
      el(
        "td",
        "",
        candidate.calibrated_probability === null
          ? "-"
          : candidate.calibrated_probability.toFixed(3)
      )
    );
    const cell = el("td");
    const report = validation?.[index];
    if (report) cell.append(renderChecks(report));
    row.append(cell);
    table.append(row);
  });
  return table;
}

function renderDetail(): HTMLElement {
  const panel = el("section", "detail");
  const item = state.selected;
  if (!item) {
    panel.append(el("p", "muted", "Select a step from the queue."));
    return panel;
  }
  panel.append(el("h2", "", `${item.title}, step ${item.step_id}`));
  panel.append(el("h3", "", "Original vs simplified"));
  panel.append(renderDiff(item.original_text, item.simplified_text ?? ""));

  if (item.plan) {
    panel.append(el("h3", "", "Plan"));
    panel.append(el("p", "muted", item.plan.thoughts));
    const planList = el("ol");
    for (const action of item.plan.actions) {
      planList.append(el("li", "", `${action.technique}: ${action.description}`));
    }
    panel.append(planList);
  }

  if (item.candidates) {
    panel.append(el("h3", "", "Candidates"));
    panel.append(renderCandidates(item.candidates, item.validation, item.chosen_index));
  }

  panel.append(el("h3", "", "Verdict"));
  const actions = el("div", "verdict-actions");

  const accept = el("button", "accept", "Accept");
  accept.onclick = () => void sendVerdict(item, { verdict: "accept" });

  const errorSelect = el("select");
  for (const value of ["meaning_altered", "syntactically_complex", "too_long"]) {
    const option = el("option", "", value);
    option.value = value;
    errorSelect.append(option);
  }
  const reject = el("button", "reject", "Reject");
  reject.onclick = () =>
    void sendVerdict(item, { verdict: "reject", error_class: errorSelect.value });

  const editBox = el("textarea");
  editBox.value = item.simplified_text ?? "";
  editBox.rows = 3;
  const edit = el("button", "edit", "Save edit");
  edit.onclick = () => void sendVerdict(item, { verdict: "edit", text: editBox.value });

  actions.append(accept, reject, errorSelect);
  panel.append(actions, editBox, edit);
  return panel;
}

function renderLossCurve(losses: number[]): SVGSVGElement {
  const width = 420;
  const height = 120;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "loss-curve");
  const max = Math.max(...losses);
  const min = Math.min(...losses);
  const spread = max - min || 1;
  const points = losses
    .map((loss, i) => {
      const x = (i / (losses.length - 1 || 1)) * (width - 10) + 5;
      const y = height - 10 - ((loss - min) / spread) * (height - 20);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "#2563eb");
  line.setAttribute("stroke-width", "1.5");
  svg.append(line);
  return svg;
}

function renderCalibration(): HTMLElement {
  const panel = el("section", "calibration");
  panel.append(el("h2", "", "Calibration"));
  const controls = el("div", "train-controls");
  const epochs = el("input");
  epochs.type = "number";
  epochs.value = "500";
  const seed = el("input");
  seed.type = "number";
  seed.value = "13";
  const button = el("button", "", "Train on gold samples");
  button.onclick = () =>
    void trainCalibrator(Number(epochs.value) || 500, Number(seed.value) || 13);
  controls.append(el("label", "", "epochs"), epochs, el("label", "", "seed"), seed, button);
  panel.append(controls);

  if (state.lastTraining) {
    const t = state.lastTraining;
    panel.append(
      el(
        "p",
        "",
        `v${t.model.version}: ${t.trained_on} samples, loss ${t.loss_curve[0].toFixed(4)} down to ${t.final_loss.toFixed(4)}`
      )
    );
    panel.append(renderLossCurve(t.loss_curve));
    for (const warning of t.warnings) {
      panel.append(el("p", "warning", warning));
    }
  }
  return panel;
}

function renderManuals(): HTMLElement {
  const panel = el("section", "manuals");
  panel.append(el("h2", "", "Manuals"));
  const list = el("ul", "manual-list");
  for (const summary of state.manuals) {
    const row = el("li", "manual-item");
    row.append(el("strong", "", summary.title));
    row.append(el("span", "muted", ` v${summary.version}`));
    const open = el("button", "", "Open");
    open.onclick = () => void openManual(summary.manual_id);
    const simplify = el("button", "", "Simplify");
    simplify.onclick = () => void simplifyManual(summary.manual_id);
    row.append(open, simplify);
    list.append(row);
  }
  panel.append(list);

  const manual = state.openManual;
  if (manual) {
    const detail = el("div", "manual-detail");
    detail.append(el("h3", "", `${manual.title} (v${manual.version})`));
    const versionRow = el("div", "muted", "versions: ");
    for (let v = 1; v <= manual.version; v += 1) {
      const link = el("button", "version-link", `v${v}`);
      link.onclick = () => void openManual(manual.manual_id, v);
      versionRow.append(link);
    }
    detail.append(versionRow);
    const steps = el("ol");
    for (const step of manual.steps) {
      const li = el("li");
      li.append(el("div", "", step.original_text));
      if (step.simplified_text && step.simplified_text !== step.original_text) {
        li.append(el("div", "simplified", step.simplified_text));
      }
      li.append(el("div", "muted", step.status));
      steps.append(li);
    }
    detail.append(steps);
    panel.append(detail);
  }
  return panel;
}

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();
  root.append(renderConnectBar());
  if (state.notice) root.append(el("div", "notice", state.notice));
  const columns = el("div", "columns");
  columns.append(renderQueue(), renderDetail());
  root.append(columns, renderCalibration(), renderManuals());
}

export function start(): void {
  render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
