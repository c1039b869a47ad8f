import type {
  DatasetSummary,
  ScenarioParams,
  ScenarioResponse,
} from "./api.js";
import { isBaselineError } from "./api.js";
import {
  capacityLineSvg,
  gaugeSvg,
  lossCurveSvg,
  type CapacityPoint,
} from "./charts.js";
import { SLIDER_BOUNDS, type ParamName, type PinDiff } from "./state.js";

// Single-source-of-truth rule: every element carrying data-field shows
// String(<the API field at that path>), nothing recomputed client-side.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function resolvePath(obj: unknown, path: string): unknown {
  let cur: unknown = obj;
  for (const key of path.split(".")) {
    if (cur === null || cur === undefined) return undefined;
    cur = (cur as Record<string, unknown>)[key];
  }
  return cur;
}

function sliderRow(name: ParamName, label: string): string {
  const b = SLIDER_BOUNDS[name];
  return (
    `<label class="slider-row">` +
    `<span class="slider-label">${label}</span>` +
    `<input type="range" id="slider-${name}" min="${b.min}" max="${b.max}" step="${b.step}">` +
    `<output id="slider-${name}-value"></output>` +
    `</label>`
  );
}

function metricRow(field: string, label: string): string {
  return (
    `<div class="metric-row" id="metric-${field.replace(/\./g, "-")}">` +
    `<span class="metric-label">${label}</span>` +
    `<span class="metric-gauge"></span>` +
    `<span class="metric-value" data-field="${field}"></span>` +
    `</div>`
  );
}

export function renderSkeleton(root: HTMLElement): void {
  root.innerHTML = `
<header>
  <h1>capgate scenario explorer</h1>
  <label>dataset
    <select id="dataset-select"></select>
  </label>
  <div id="error-banner" hidden></div>
</header>
<section id="controls">
  ${sliderRow("alpha", "miss weight (alpha)")}
  ${sliderRow("beta", "false-alarm weight (beta)")}
  ${sliderRow("gamma", "disparity weight (gamma)")}
  ${sliderRow("capacity", "capacity budget (C)")}
</section>
<section id="decision-panel">
  <span id="constraint-badge" class="badge" hidden>capacity constraint active</span>
  <span id="residual-badge" class="badge warn" hidden>budget unattainable even at 1.0</span>
  <dl>
    <dt>dataset</dt><dd data-field="dataset_id"></dd>
    <dt>free threshold</dt><dd data-field="decision.tau_free"></dd>
    <dt>capacity threshold</dt><dd data-field="decision.tau_capacity"></dd>
    <dt>deployed threshold</dt><dd data-field="decision.tau_star"></dd>
    <dt>constraint active</dt><dd data-field="decision.constraint_active"></dd>
    <dt>critical capacity</dt><dd data-field="decision.critical_capacity"></dd>
    <dt>loss at deployment</dt><dd data-field="decision.loss_at_tau_star"></dd>
    <dt>residual infeasible</dt><dd data-field="decision.residual_infeasible"></dd>
  </dl>
</section>
<section id="metrics-panel">
  ${metricRow("metrics.recall", "recall")}
  ${metricRow("metrics.fpr", "false positive rate")}
  ${metricRow("metrics.disparity", "recall disparity")}
  ${metricRow("metrics.intervention_rate", "intervention rate")}
  <div class="metric-row">
    <span class="metric-label">loss</span>
    <span class="metric-gauge"></span>
    <span class="metric-value" data-field="metrics.loss"></span>
  </div>
  <div class="metric-row" id="feasible-row">
    <span class="metric-label">within budget</span>
    <span class="metric-gauge"></span>
    <span class="metric-value" data-field="metrics.feasible"></span>
  </div>
  <div id="group-tpr"></div>
  <div class="metric-row">
    <span class="metric-label">groups excluded</span>
    <span class="metric-gauge"></span>
    <span class="metric-value" data-field="groups_excluded"></span>
  </div>
</section>
<section id="params-echo">
  settled at alpha <span data-field="params.alpha"></span>,
  beta <span data-field="params.beta"></span>,
  gamma <span data-field="params.gamma"></span>,
  C <span data-field="params.capacity"></span>
</section>
<section id="charts">
  <div id="loss-curve-chart"></div>
  <div id="capacity-line-chart"></div>
  <button id="capacity-line-button">trace recall vs capacity</button>
</section>
<section id="baselines-section">
  <h2>reference policies</h2>
  <table id="baselines-table">
    <thead><tr>
      <th>policy</th><th>tau</th><th>recall</th><th>fpr</th>
      <th>disparity</th><th>rate</th><th>loss</th><th>feasible</th>
    </tr></thead>
    <tbody></tbody>
  </table>
</section>
<section id="pins-section">
  <button id="pin-button">pin scenario</button>
  <button id="clear-pins-button">clear pins</button>
  <table id="diff-table">
    <thead><tr>
      <th>pinned</th><th>recall delta</th><th>disparity delta</th><th>rate delta</th>
    </tr></thead>
    <tbody></tbody>
  </table>
</section>
`;
}

export function renderDatasets(
  root: HTMLElement,
  datasets: DatasetSummary[],
  selectedId: string | null,
): void {
  const select = root.querySelector<HTMLSelectElement>("#dataset-select")!;
  select.innerHTML = datasets
    .map((d) => {
      const id = escapeHtml(d.dataset_id);
      const sel = d.dataset_id === selectedId ? " selected" : "";
      return `<option value="${id}"${sel}>${id} (n=${d.n})</option>`;
    })
    .join("");
}

export function setSliders(root: HTMLElement, params: ScenarioParams): void {
  for (const name of Object.keys(SLIDER_BOUNDS) as ParamName[]) {
    const input = root.querySelector<HTMLInputElement>(`#slider-${name}`)!;
    input.value = String(params[name]);
    const echo = root.querySelector<HTMLOutputElement>(`#slider-${name}-value`)!;
    echo.textContent = input.value;
  }
}

export function readSliders(root: HTMLElement): ScenarioParams {
  const read = (name: ParamName) =>
    Number(root.querySelector<HTMLInputElement>(`#slider-${name}`)!.value);
  return {
    alpha: read("alpha"),
    beta: read("beta"),
    gamma: read("gamma"),
    capacity: read("capacity"),
  };
}

function renderGroupTpr(root: HTMLElement, response: ScenarioResponse): void {
  const holder = root.querySelector<HTMLElement>("#group-tpr")!;
  holder.innerHTML = Object.keys(response.per_group_tpr)
    .map(
      (group) =>
        `<div class="metric-row"><span class="metric-label">recall for ` +
        `${escapeHtml(group)}</span><span class="metric-gauge"></span>` +
        `<span class="metric-value" data-field="per_group_tpr.${escapeHtml(group)}"></span></div>`,
    )
    .join("");
}

function renderBaselines(root: HTMLElement, response: ScenarioResponse): void {
  const tbody = root.querySelector<HTMLElement>("#baselines-table tbody")!;
  if (response.baselines === null) {
    tbody.innerHTML = "";
    return;
  }
  tbody.innerHTML = response.baselines
    .map((entry, i) => {
      if (isBaselineError(entry)) {
        return (
          `<tr class="skipped"><td data-field="baselines.${i}.policy"></td>` +
          `<td colspan="7" data-field="baselines.${i}.error"></td></tr>`
        );
      }
      const cls = entry.feasible ? "feasible" : "infeasible";
      const cells = ["policy", "tau", "recall", "fpr", "disparity", "intervention_rate", "loss", "feasible"]
        .map((key) => `<td data-field="baselines.${i}.${key}"></td>`)
        .join("");
      return `<tr class="${cls}">${cells}</tr>`;
    })
    .join("");
}

function fillDataFields(root: HTMLElement, response: ScenarioResponse): void {
  for (const el of root.querySelectorAll<HTMLElement>("[data-field]")) {
    const value = resolvePath(response, el.dataset.field!);
    el.textContent = value === undefined ? "" : String(value);
  }
}

function renderGauges(root: HTMLElement, response: ScenarioResponse): void {
  const gauges: Array<[string, number]> = [
    ["metrics-recall", response.metrics.recall],
    ["metrics-fpr", response.metrics.fpr],
    ["metrics-disparity", response.metrics.disparity],
    ["metrics-intervention_rate", response.metrics.intervention_rate],
  ];
  for (const [idPart, value] of gauges) {
    const row = root.querySelector<HTMLElement>(`#metric-${idPart}`);
    if (row) row.querySelector<HTMLElement>(".metric-gauge")!.innerHTML = gaugeSvg(value);
  }
}

export function renderResponse(root: HTMLElement, response: ScenarioResponse): void {
  renderGroupTpr(root, response);
  renderBaselines(root, response);
  fillDataFields(root, response);
  renderGauges(root, response);

  const badge = root.querySelector<HTMLElement>("#constraint-badge")!;
  badge.hidden = !response.decision.constraint_active;
  const residual = root.querySelector<HTMLElement>("#residual-badge")!;
  residual.hidden = !response.decision.residual_infeasible;
  const feasibleRow = root.querySelector<HTMLElement>("#feasible-row")!;
  feasibleRow.classList.toggle("feasible", response.metrics.feasible);
  feasibleRow.classList.toggle("infeasible", !response.metrics.feasible);

  if (response.curve !== null) {
    root.querySelector<HTMLElement>("#loss-curve-chart")!.innerHTML = lossCurveSvg(
      response.curve,
      response.decision,
    );
  }
}

export function renderError(root: HTMLElement, message: string | null): void {
  const banner = root.querySelector<HTMLElement>("#error-banner")!;
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
  } else {
    banner.hidden = false;
    banner.textContent = message;
  }
}

export function renderCapacityLine(root: HTMLElement, points: CapacityPoint[]): void {
  root.querySelector<HTMLElement>("#capacity-line-chart")!.innerHTML =
    capacityLineSvg(points);
}

export function renderDiffs(root: HTMLElement, diffs: PinDiff[]): void {
  const tbody = root.querySelector<HTMLElement>("#diff-table tbody")!;
  tbody.innerHTML = diffs
    .map(
      (d) =>
        `<tr><td>${escapeHtml(d.label)}</td>` +
        `<td data-diff="recall">${d.recall}</td>` +
        `<td data-diff="disparity">${d.disparity}</td>` +
        `<td data-diff="intervention_rate">${d.intervention_rate}</td></tr>`,
    )
    .join("");
}
