/**
 * DOM shell. Owns fetch timing and element wiring; every displayed value
 * comes out of the pure projection functions so this file stays thin.
 */

import { InputRejected, ServiceClient } from "./api.js";
import { caretSnippet, type ErrorMarker, markerFromDetail } from "./form.js";
import type { GraphEdge, GraphModel, GraphNode } from "./graph.js";
import type { ScenarioList } from "./schema.js";
import {
  type AnswerCard,
  type QueryView,
  bannerFor,
  graphForAnswer,
  projectEvidence,
  projectHint,
  projectQuery,
} from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

interface AppState {
  client: ServiceClient;
  scenarios: ScenarioList | null;
  sessionId: string | null;
  query: QueryView | null;
  selected: number;
  queryInFlight: boolean;
}

const state: AppState = {
  client: new ServiceClient(),
  scenarios: null,
  sessionId: null,
  query: null,
  selected: 0,
  queryInFlight: false,
};

function showBanner(error: unknown): void {
  const banner = bannerFor(error);
  const el = $("banner");
  if (!banner) {
    el.hidden = true;
    throw error;
  }
  el.hidden = false;
  el.className = `banner ${banner.kind}`;
  el.textContent = banner.message;
}

function clearBanner(): void {
  $("banner").hidden = true;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function drawEdge(svg: SVGElement, edge: GraphEdge, at: Map<string, GraphNode>): void {
  const from = at.get(edge.from);
  const to = at.get(edge.to);
  if (!from || !to) return;
  svg.appendChild(
    svgEl("line", {
      x1: String(from.x),
      y1: String(from.y),
      x2: String(to.x),
      y2: String(to.y),
      stroke: edge.color,
      "stroke-width": edge.kind === "defeat" ? "2" : "1",
    }),
  );
  if (edge.label) {
    const label = svgEl("text", {
      x: String((from.x + to.x) / 2 + 4),
      y: String((from.y + to.y) / 2),
      fill: edge.color,
      "font-size": "11",
    });
    label.textContent = edge.label;
    svg.appendChild(label);
  }
}

function drawNode(svg: SVGElement, node: GraphNode): void {
  const shape =
    node.kind === "fact" || node.kind === "builtin"
      ? svgEl("rect", {
          x: String(node.x - 80),
          y: String(node.y - 16),
          width: "160",
          height: "32",
          rx: "4",
        })
      : svgEl("ellipse", {
          cx: String(node.x),
          cy: String(node.y),
          rx: "85",
          ry: "20",
        });
  shape.setAttribute("fill", node.kind === "counter" ? "#fff0f0" : "#f4f6fa");
  shape.setAttribute("stroke", node.kind === "counter" ? "red" : "#333");
  if (node.dashed) shape.setAttribute("stroke-dasharray", "5,3");
  svg.appendChild(shape);

  const text = svgEl("text", {
    x: String(node.x),
    y: String(node.y + 4),
    "text-anchor": "middle",
    "font-size": "11",
  });
  text.textContent = node.label;
  svg.appendChild(text);
  if (node.sublabel) {
    const sub = svgEl("text", {
      x: String(node.x),
      y: String(node.y + 30),
      "text-anchor": "middle",
      "font-size": "9",
      fill: "#666",
    });
    sub.textContent = node.sublabel;
    svg.appendChild(sub);
  }
}

function renderGraph(model: GraphModel): void {
  const host = $("graph");
  host.textContent = "";
  const svg = svgEl("svg", {
    width: String(Math.max(model.width, 400)),
    height: String(model.height),
  });
  // edges first so nodes paint over them
  const at = new Map(model.nodes.map((n) => [n.id, n]));
  for (const edge of model.edges) drawEdge(svg, edge, at);
  for (const node of model.nodes) drawNode(svg, node);
  host.appendChild(svg);
}

async function refreshEvidence(): Promise<void> {
  if (!state.sessionId) return;
  const doc = await state.client.getSession(state.sessionId);
  const rows = projectEvidence(doc, state.scenarios ?? undefined);
  const table = $<HTMLTableSectionElement>("evidence-rows");
  table.textContent = "";
  for (const row of rows) {
    const tr = document.createElement("tr");
    if (row.retracted) tr.className = "retracted";
    const seq = document.createElement("td");
    seq.textContent = String(row.seq);
    const fact = document.createElement("td");
    fact.textContent = row.fact;
    const badge = document.createElement("td");
    badge.textContent = row.provenance;
    badge.className = `badge ${row.provenance}`;
    const action = document.createElement("td");
    if (!row.retracted) {
      const button = document.createElement("button");
      button.textContent = "retract";
      button.addEventListener("click", () => void retract(row.seq));
      action.appendChild(button);
    }
    tr.append(seq, fact, badge, action);
    table.appendChild(tr);
  }
}

async function retract(seq: number): Promise<void> {
  if (!state.sessionId) return;
  try {
    await state.client.retractEvidence(state.sessionId, seq);
    await refreshEvidence();
  } catch (error) {
    showBanner(error);
  }
}

function renderEvidenceError(marker: ErrorMarker | null, text: string): void {
  const out = $("evidence-error");
  if (!marker) {
    out.hidden = true;
    out.textContent = "";
    return;
  }
  out.hidden = false;
  out.textContent = caretSnippet(text, marker);
}

async function submitEvidence(): Promise<void> {
  const input = $<HTMLInputElement>("evidence-input");
  const text = input.value.trim();
  if (!text || !state.sessionId) return;
  try {
    await state.client.addEvidence(state.sessionId, text);
    renderEvidenceError(null, "");
    input.value = "";
    await refreshEvidence();
  } catch (error) {
    if (error instanceof InputRejected) {
      renderEvidenceError(markerFromDetail(error.detail), text);
      return;
    }
    showBanner(error);
  }
}

function renderAnswers(view: QueryView): void {
  const host = $("answers");
  host.textContent = "";
  if (view.emptyState) {
    const p = document.createElement("p");
    p.className = "empty-state";
    p.textContent = view.emptyState;
    host.appendChild(p);
  }
  view.answers.forEach((card: AnswerCard) => {
    const div = document.createElement("div");
    div.className = `answer-card ${card.status}${
      card.index === state.selected ? " selected" : ""
    }`;
    const badge = document.createElement("span");
    badge.className = `status-badge ${card.status}`;
    badge.textContent = card.badge;
    const binding = document.createElement("span");
    binding.textContent = ` ${card.bindingText}`;
    div.append(badge, binding);
    if (card.hypotheses.length) {
      const hyp = document.createElement("div");
      hyp.className = "hypotheses";
      hyp.textContent = `assuming ${card.hypotheses.join(", ")}`;
      div.appendChild(hyp);
    }
    div.addEventListener("click", () => {
      state.selected = card.index;
      renderAnswers(view);
      renderGraph(graphForAnswer(card));
    });
    host.appendChild(div);
  });
}

function renderHints(view: QueryView): void {
  const host = $("hints");
  host.textContent = "";
  for (const hint of view.hints) {
    const { title, detail, prefill } = projectHint(hint);
    const div = document.createElement("div");
    div.className = "hint-card";
    const head = document.createElement("strong");
    head.textContent = title;
    const body = document.createElement("span");
    body.textContent = ` ${detail} `;
    const button = document.createElement("button");
    button.textContent = "add as evidence";
    button.addEventListener("click", () => {
      $<HTMLInputElement>("evidence-input").value = prefill;
      $<HTMLInputElement>("evidence-input").focus();
    });
    div.append(head, body, button);
    host.appendChild(div);
  }
}

async function runQuery(): Promise<void> {
  const goal = $<HTMLInputElement>("goal-input").value.trim();
  if (!goal || !state.sessionId || state.queryInFlight) return;
  state.queryInFlight = true;
  $("query-status").textContent = "running...";
  try {
    const response = await state.client.runQuery(state.sessionId, goal);
    state.query = projectQuery(response);
    state.selected = 0;
    clearBanner();
    renderAnswers(state.query);
    renderHints(state.query);
    const first = state.query.answers[0];
    if (first) {
      renderGraph(graphForAnswer(first));
    } else {
      $("graph").textContent = "";
    }
    $("query-status").textContent =
      `${state.query.qid} at evidence ${state.query.watermark}`;
  } catch (error) {
    $("query-status").textContent = "";
    showBanner(error);
  } finally {
    state.queryInFlight = false;
  }
}

async function newSession(): Promise<void> {
  const pick = $<HTMLSelectElement>("scenario-select").value;
  try {
    state.sessionId = await state.client.createSession(pick || undefined);
    state.query = null;
    $("session-meta").textContent =
      `session ${state.sessionId}${pick ? ` from ${pick}` : ""}`;
    $("answers").textContent = "";
    $("hints").textContent = "";
    $("graph").textContent = "";
    clearBanner();
    await refreshEvidence();
  } catch (error) {
    showBanner(error);
  }
}

async function boot(): Promise<void> {
  const baseInput = $<HTMLInputElement>("base-url");
  baseInput.value = state.client.baseUrl;
  baseInput.addEventListener("change", () => {
    state.client = new ServiceClient(baseInput.value.trim());
  });

  $("new-session").addEventListener("click", () => void newSession());
  $<HTMLFormElement>("evidence-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void submitEvidence();
  });
  $<HTMLFormElement>("query-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runQuery();
  });

  try {
    state.scenarios = await state.client.scenarios();
    const select = $<HTMLSelectElement>("scenario-select");
    for (const scenario of state.scenarios.scenarios) {
      const option = document.createElement("option");
      option.value = scenario.name;
      option.textContent = scenario.name;
      option.title = scenario.notes;
      select.appendChild(option);
    }
  } catch (error) {
    showBanner(error);
  }
}

document.addEventListener("DOMContentLoaded", () => void boot());
