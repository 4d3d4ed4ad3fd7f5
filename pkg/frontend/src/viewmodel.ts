/**
 * Pure projections from service documents to what the panels render.
 *
 * Nothing in here infers anything: every field is a rearrangement of a
 * validated response. The DOM shell calls these and paints the result, so
 * all interesting display decisions live in testable functions.
 */

import { SchemaMismatchError } from "./schema.js";
import type {
  AnswerStatus,
  ExplanationDoc,
  Hint,
  QueryResponse,
  ScenarioList,
  SessionDoc,
} from "./schema.js";
import { type GraphModel, renderAnswerGraph } from "./graph.js";
import { prefillFromHint } from "./form.js";

export interface EvidenceRowView {
  seq: number;
  fact: string;
  provenance: "scenario" | "added";
  retracted: boolean;
}

export interface AnswerCard {
  index: number;
  bindingText: string;
  status: AnswerStatus;
  badge: string;
  hypotheses: string[];
  doc: ExplanationDoc;
}

export interface QueryView {
  qid: string;
  goal: string;
  watermark: number;
  answers: AnswerCard[];
  hints: Hint[];
  emptyState: string | null;
}

export interface Banner {
  kind: "serviceDown" | "schemaMismatch";
  message: string;
}

const STATUS_ORDER: Record<AnswerStatus, number> = {
  sceptical: 0,
  credulous: 1,
  notSupported: 2,
};

function bindingText(binding: Record<string, string>): string {
  const parts = Object.keys(binding)
    .sort()
    .map((name) => `${name} = ${binding[name]}`);
  return parts.length ? parts.join(", ") : "(ground)";
}

/**
 * Evidence table rows from the session log. Assert rows become table rows;
 * a retract row strikes out its target instead of appearing itself. Rows
 * preloaded from the base scenario (the first `preloadCount` asserts) get
 * the scenario badge, everything later was typed in by the analyst.
 */
export function projectEvidence(
  doc: SessionDoc,
  scenarios?: ScenarioList,
): EvidenceRowView[] {
  const base = scenarios?.scenarios.find((s) => s.name === doc.baseScenario);
  const preloadCount = base ? base.evidenceFacts.length : 0;
  const retractedSeqs = new Set<number>();
  for (const row of doc.evidenceLog) {
    if (row.op === "retract" && row.target !== undefined) {
      retractedSeqs.add(row.target);
    }
  }
  return doc.evidenceLog
    .filter((row) => row.op === "assert")
    .map((row) => ({
      seq: row.seq,
      fact: row.fact,
      provenance: row.seq <= preloadCount ? "scenario" : "added",
      retracted: retractedSeqs.has(row.seq),
    }));
}

/** Answers sorted sceptical first, then credulous, then notSupported. */
export function projectQuery(response: QueryResponse): QueryView {
  const answers = response.answers
    .map((doc, i) => ({ doc, i }))
    .sort(
      (a, b) =>
        STATUS_ORDER[a.doc.status] - STATUS_ORDER[b.doc.status] || a.i - b.i,
    )
    .map(({ doc }, index) => ({
      index,
      bindingText: bindingText(doc.binding),
      status: doc.status,
      badge: doc.status,
      hypotheses: doc.hypotheses,
      doc,
    }));
  return {
    qid: response.qid,
    goal: response.goal,
    watermark: response.watermark,
    answers,
    hints: response.hints,
    emptyState: answers.length
      ? null
      : "No answers. The goal is not derivable from the active evidence; see the hints panel for facts that would change that.",
  };
}

export function graphForAnswer(card: AnswerCard): GraphModel {
  return renderAnswerGraph(card.doc);
}

/** Hint card text plus the evidence-form prefill for its action button. */
export function projectHint(hint: Hint): {
  title: string;
  detail: string;
  prefill: string;
} {
  return {
    title: hint.kind === "hypothesis" ? "hypothesis" : "missing premise",
    detail: `${hint.missing.join(", ")} via ${hint.enablingRule} would conclude ${hint.wouldConclude}`,
    prefill: prefillFromHint(hint),
  };
}

/** Map a thrown error to the banner the shell shows; null means rethrow. */
export function bannerFor(error: unknown): Banner | null {
  if (error instanceof SchemaMismatchError) {
    return { kind: "schemaMismatch", message: error.message };
  }
  if (error instanceof TypeError) {
    // fetch() network failures surface as TypeError
    return {
      kind: "serviceDown",
      message: "The reasoning service is unreachable. Nothing shown below is current.",
    };
  }
  return null;
}
