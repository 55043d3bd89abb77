/** DOM wiring for the mining session client.
 *
 * Layout: session controls, Pareto projection with axis selectors and
 * baseline overlay, ruleset inspector, feedback console with transcript,
 * and the sampled-misclassified review. All state lives on the server; a
 * reload rebuilds the view from API responses alone.
 */

import { ApiClient } from "./api.js";
import type { BaselineSample } from "./projection.js";
import { baselineShares } from "./projection.js";
import { SessionStore, startPolling } from "./state.js";
import type { ObjectiveName, RulesetDetail, SampledRecord } from "./types.js";
import { ALL_OBJECTIVES } from "./types.js";
import { renderFeedbackConsole, renderTranscript } from "./views/feedback.js";
import { attributeRules, renderInspector } from "./views/inspector.js";
import { renderAxisSelectors, renderParetoSvg } from "./views/pareto.js";
import { paginate, renderSampleReview } from "./views/sample.js";

const POLL_INTERVAL_MS = Number(
  new URLSearchParams(window.location.search).get("poll") ?? "1500",
);

interface AppState {
  store: SessionStore | null;
  axes: { x: ObjectiveName; y: ObjectiveName };
  baseline: BaselineSample[];
  detail: RulesetDetail | null;
  sampled: SampledRecord[];
  samplePage: number;
}

const api = new ApiClient("");
const state: AppState = {
  store: null,
  axes: { x: "missed_remark_log", y: "saved_records_trimmed_mean" },
  baseline: [],
  detail: null,
  sampled: [],
  samplePage: 0,
};

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function loadBaseline(sessionId: string): Promise<void> {
  const samples: BaselineSample[] = [];
  for (const share of baselineShares()) {
    const resp = await api.baseline(sessionId, share, 20);
    samples.push({ share, objectives: resp.objectives });
  }
  state.baseline = samples;
}

function renderFront(): void {
  const store = state.store;
  if (!store || !store.pareto) return;
  el("pareto-box").innerHTML = renderParetoSvg(
    store.pareto.points,
    state.baseline,
    state.axes.x,
    state.axes.y,
  );
  el("generation").textContent = `generation ${store.pareto.generation}`;
  for (const circle of document.querySelectorAll("circle.front")) {
    circle.addEventListener("click", () => {
      const rid = (circle as SVGElement).dataset.ruleset;
      if (rid) void openInspector(rid);
    });
  }
}

async function openInspector(rulesetId: string): Promise<void> {
  const store = state.store;
  if (!store) return;
  state.detail = await api.ruleset(store.sessionId, rulesetId);
  const attribution = await attributeRules(api, store.sessionId, state.detail);
  el("inspector-box").innerHTML = renderInspector(state.detail, attribution);
  for (const button of document.querySelectorAll<HTMLButtonElement>(
    "#inspector-box button.reject, #inspector-box button.pin",
  )) {
    button.addEventListener("click", () => {
      const command = button.classList.contains("reject") ? "REJECT_RULE" : "PIN_RULE";
      void store.submitFeedback({ command, rule_text: button.dataset.rule });
    });
  }
  await refreshSample(rulesetId);
}

async function refreshSample(rulesetId: string): Promise<void> {
  const store = state.store;
  if (!store) return;
  const resp = await api.sample(store.sessionId, rulesetId, 50);
  state.sampled = resp.records;
  state.samplePage = 0;
  renderSample();
}

function renderSample(): void {
  el("sample-box").innerHTML = renderSampleReview(
    paginate(state.sampled, state.samplePage, 5),
  );
  el("sample-box").querySelector("button.prev")?.addEventListener("click", () => {
    state.samplePage -= 1;
    renderSample();
  });
  el("sample-box").querySelector("button.next")?.addEventListener("click", () => {
    state.samplePage += 1;
    renderSample();
  });
}

function renderTranscriptBox(): void {
  if (state.store) {
    el("transcript-box").innerHTML = renderTranscript(state.store.transcript);
  }
}

function wireAxisSelectors(): void {
  el("axes-box").innerHTML = renderAxisSelectors(state.axes, ALL_OBJECTIVES);
  el("axis-x").addEventListener("change", (ev) => {
    state.axes = { ...state.axes, x: (ev.target as HTMLSelectElement).value as ObjectiveName };
    renderFront();
  });
  el("axis-y").addEventListener("change", (ev) => {
    state.axes = { ...state.axes, y: (ev.target as HTMLSelectElement).value as ObjectiveName };
    renderFront();
  });
}

function wireFeedbackForms(): void {
  const features = state.detail
    ? Object.keys(state.detail.objectives)
    : ["author", "authorDay", "shiftedAuthorHour", "whitespaceOnly", "binary"];
  el("console-box").innerHTML = renderFeedbackConsole(features);
  el("blacklist-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const select = (ev.target as HTMLFormElement).elements.namedItem(
      "feature",
    ) as HTMLSelectElement;
    void state.store?.submitFeedback({
      command: "BLACKLIST_FEATURE",
      feature: select.value,
    });
  });
  el("exclude-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = (ev.target as HTMLFormElement).elements.namedItem(
      "ticket",
    ) as HTMLInputElement;
    if (input.value) {
      void state.store?.submitFeedback({
        command: "EXCLUDE_TICKET",
        ticket: input.value,
      });
    }
  });
  el("focus-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const weights: Record<string, number> = {};
    for (const objective of ALL_OBJECTIVES) {
      const input = form.elements.namedItem(`w-${objective}`) as HTMLInputElement;
      const value = Number(input.value);
      if (value > 0) weights[objective] = value;
    }
    void state.store?.submitFeedback({ command: "SET_FOCUS", weights });
  });
}

async function connect(datasetPath: string, seed: number): Promise<void> {
  const created = await api.createSession(datasetPath, seed);
  const store = new SessionStore(api, created.session_id);
  state.store = store;
  store.onChange(() => {
    renderFront();
    renderTranscriptBox();
  });
  await api.start(created.session_id);
  await loadBaseline(created.session_id);
  wireAxisSelectors();
  wireFeedbackForms();
  startPolling(store, () => state.axes, POLL_INTERVAL_MS, (err) => {
    el("status-box").textContent = String(err);
  });
  el("session-box").textContent = `session ${created.session_id}`;
}

export function bootstrap(): void {
  el("connect-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const dataset = (form.elements.namedItem("dataset") as HTMLInputElement).value;
    const seed = Number((form.elements.namedItem("seed") as HTMLInputElement).value || "0");
    connect(dataset, seed).catch((err) => {
      el("status-box").textContent = String(err);
    });
  });
}

if (typeof document !== "undefined" && document.getElementById("connect-form")) {
  bootstrap();
}
