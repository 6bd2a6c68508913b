/** Browser entry point: wires the service client, the polling loop and
 * the render functions together.  All state shown on screen comes from
 * server payloads via the pure view-model modules. */

import { ServiceClient, type ModelPayload, type SessionPayload } from "./api.js";
import {
  thresholdMarkers,
  thresholdPixelY,
  toSvgPath,
  utilityPolylines,
  type PixelBox,
} from "./chart.js";
import { naturalOrder, toView, type SessionView } from "./state.js";
import { AnswerGate } from "./submit.js";

const POLL_INTERVAL_MS = 500;
const CHART_BOX: PixelBox = { width: 360, height: 220, pad: 28 };
const LINE_COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

const client = new ServiceClient("");
const gate = new AnswerGate();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function sessionIdFromLocation(): string | null {
  return new URLSearchParams(window.location.search).get("session");
}

async function refreshLoop(sessionId: string): Promise<void> {
  const result = await client.fetchSession(sessionId);
  if (!result.ok) {
    renderError(`${result.error.code}: ${result.error.message}`);
    return;
  }
  renderSession(sessionId, result.value);
  void refreshModelPanel(sessionId);
  if (result.value.status === "selecting") {
    window.setTimeout(() => void refreshLoop(sessionId), POLL_INTERVAL_MS);
  }
}

function renderError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function renderSession(sessionId: string, payload: SessionPayload): void {
  el<HTMLDivElement>("error-banner").hidden = true;
  el<HTMLSpanElement>("progress").textContent = toView(payload).progressLabel;
  const view = toView(payload);
  const card = el<HTMLDivElement>("question-card");
  card.innerHTML = "";
  if (view.kind === "selecting") {
    card.append(spinner("choosing the most informative alternative..."));
  } else if (view.kind === "question") {
    card.append(questionCard(sessionId, payload, view));
  } else {
    card.append(finalCard(view.assignments, view.accuracyAll, view.early));
  }
}

function spinner(text: string): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "spinner-wrap";
  const dot = document.createElement("div");
  dot.className = "spinner";
  const label = document.createElement("p");
  label.textContent = text;
  wrap.append(dot, label);
  return wrap;
}

function questionCard(
  sessionId: string,
  payload: SessionPayload,
  view: Extract<SessionView, { kind: "question" }>,
): HTMLElement {
  const wrap = document.createElement("div");
  const title = document.createElement("h2");
  title.textContent = `Which category does ${view.alternativeId} belong to?`;
  const table = document.createElement("table");
  table.className = "performance-table";
  for (const [name, value] of view.performances) {
    const row = table.insertRow();
    row.insertCell().textContent = name;
    row.insertCell().textContent = String(value);
  }
  const buttons = document.createElement("div");
  buttons.className = "category-buttons";
  for (const category of view.categories) {
    const button = document.createElement("button");
    button.textContent = `C${category}`;
    button.addEventListener("click", () => {
      void answer(sessionId, payload, view.alternativeId, category);
    });
    buttons.append(button);
  }
  wrap.append(title, table, buttons);
  return wrap;
}

async function answer(
  sessionId: string,
  payload: SessionPayload,
  alternativeId: string,
  category: number,
): Promise<void> {
  setButtonsDisabled(true);
  const outcome = await gate.submit(
    () => client.submitAnswer(sessionId, alternativeId, category),
    () => client.fetchSession(sessionId),
  );
  setButtonsDisabled(false);
  if (outcome.kind === "ignored") {
    return; // double-click: the first submission owns this iteration
  }
  if (outcome.kind === "failed") {
    renderError(outcome.message);
    return;
  }
  renderSession(sessionId, outcome.payload);
  if (outcome.payload.status === "selecting") {
    window.setTimeout(() => void refreshLoop(sessionId), POLL_INTERVAL_MS);
  } else {
    void refreshModelPanel(sessionId);
  }
}

function setButtonsDisabled(disabled: boolean): void {
  document
    .querySelectorAll<HTMLButtonElement>(".category-buttons button")
    .forEach((b) => {
      b.disabled = disabled;
    });
}

function finalCard(
  assignments: [string, number][],
  accuracyAll: number | null,
  early: boolean,
): HTMLElement {
  const wrap = document.createElement("div");
  const title = document.createElement("h2");
  title.textContent = early ? "Stopped early - sorting result" : "Sorting result";
  wrap.append(title);
  if (accuracyAll !== null) {
    const acc = document.createElement("p");
    acc.textContent = `accuracy over all alternatives: ${accuracyAll.toFixed(2)}`;
    wrap.append(acc);
  }
  const table = document.createElement("table");
  table.className = "assignment-table";
  const head = table.insertRow();
  head.insertCell().textContent = "alternative";
  head.insertCell().textContent = "category";
  for (const [aid, category] of assignments) {
    const row = table.insertRow();
    row.insertCell().textContent = aid;
    row.insertCell().textContent = `C${category}`;
  }
  wrap.append(table);
  return wrap;
}

async function refreshModelPanel(sessionId: string): Promise<void> {
  const result = await client.fetchModel(sessionId);
  if (!result.ok) return;
  renderModel(result.value);
  const candidates = await client.fetchCandidates(sessionId);
  if (candidates.ok) {
    renderCandidateScores(candidates.value.scores);
  }
}

export function renderModel(model: ModelPayload): void {
  const svg = el<HTMLElement>("utility-chart");
  const polylines = utilityPolylines(model);
  const yMax = Math.max(
    1e-9,
    ...polylines.flatMap((p) => p.vertices.map((v) => v.y)),
  );
  const parts: string[] = [];
  polylines.forEach((polyline, j) => {
    const color = LINE_COLORS[j % LINE_COLORS.length];
    parts.push(
      `<path d="${toSvgPath(polyline, CHART_BOX, yMax)}" fill="none" ` +
      `stroke="${color}" stroke-width="2"/>`,
    );
    polyline.vertices.forEach((v) => {
      const xs = polyline.vertices.map((p) => p.x);
      const xMin = Math.min(...xs);
      const span = Math.max(...xs) - xMin || 1;
      const px = CHART_BOX.pad +
        ((v.x - xMin) / span) * (CHART_BOX.width - 2 * CHART_BOX.pad);
      const py = thresholdPixelY(v.y, CHART_BOX, yMax);
      parts.push(`<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="3" fill="${color}"/>`);
    });
  });
  svg.innerHTML = parts.join("");

  const legend = el<HTMLUListElement>("chart-legend");
  legend.innerHTML = "";
  polylines.forEach((polyline, j) => {
    const item = document.createElement("li");
    item.style.color = LINE_COLORS[j % LINE_COLORS.length] ?? "#000";
    item.textContent = polyline.name;
    legend.append(item);
  });

  const markers = el<HTMLParagraphElement>("threshold-markers");
  markers.textContent = "normalized thresholds: " + thresholdMarkers(model)
    .map((m) => `${m.label}=${m.value.toFixed(4)}`)
    .join("  ");

  const table = el<HTMLTableElement>("assignment-preview");
  table.innerHTML = "";
  const entries = Object.entries(model.assignments).sort((a, b) =>
    naturalOrder(a[0], b[0]),
  );
  for (const [aid, category] of entries) {
    const row = table.insertRow();
    row.insertCell().textContent = aid;
    row.insertCell().textContent = `C${category}`;
  }
}

function renderCandidateScores(scores: Record<string, number>): void {
  const table = el<HTMLTableElement>("candidate-scores");
  table.innerHTML = "";
  const entries = Object.entries(scores).sort((a, b) => b[1] - a[1]);
  for (const [aid, score] of entries) {
    const row = table.insertRow();
    row.insertCell().textContent = aid;
    row.insertCell().textContent = score.toFixed(6);
  }
}

function main(): void {
  const sessionId = sessionIdFromLocation();
  if (!sessionId) {
    renderError("open this console as /?session=<session id>");
    return;
  }
  void refreshLoop(sessionId);
}

if (typeof document !== "undefined" && document.getElementById("question-card")) {
  main();
}
