/**
 * Evidence form helpers: inline error markers for rejected input and the
 * hint-to-form affordance.
 */

import { type Hint, type InputError, inputErrorSchema } from "./schema.js";

export interface ErrorMarker {
  line: number;
  col: number;
  message: string;
  kind: "parseError" | "badFact";
}

/** Read a 422 body ({"detail": {...}} or the bare detail) into a marker. */
export function markerFromDetail(body: unknown): ErrorMarker | null {
  const detail =
    typeof body === "object" && body !== null && "detail" in body
      ? (body as { detail: unknown }).detail
      : body;
  const parsed = inputErrorSchema.safeParse(detail);
  if (!parsed.success) return null;
  const { error, message, line, col } = parsed.data;
  return { kind: error, message, line, col };
}

/**
 * The offending source line followed by a caret line pointing at the
 * reported column (1-based). Out-of-range positions clamp to the text so a
 * marker is always drawn.
 */
export function caretSnippet(text: string, marker: ErrorMarker): string {
  const lines = text.split("\n");
  const index = Math.min(Math.max(marker.line - 1, 0), lines.length - 1);
  const source = lines[index] ?? "";
  const caretAt = Math.min(Math.max(marker.col - 1, 0), source.length);
  return `${source}\n${" ".repeat(caretAt)}^ ${marker.message}`;
}

/** What the evidence form should contain after clicking a hint. */
export function prefillFromHint(hint: Hint): string {
  return hint.missing[0];
}
