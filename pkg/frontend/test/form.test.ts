import { describe, expect, it } from "vitest";

import { caretSnippet, markerFromDetail, prefillFromHint } from "../src/form.js";
import { type Hint, hintSchema, parseWith } from "../src/schema.js";
import badFact from "./fixtures/bad_fact_422.json";
import emptyQuery from "./fixtures/empty_query.json";
import parseError from "./fixtures/parse_error_422.json";

describe("markerFromDetail", () => {
  it("reads the recorded 422 parse error", () => {
    const marker = markerFromDetail(parseError);
    expect(marker).not.toBeNull();
    expect(marker!.kind).toBe("parseError");
    expect(marker!.line).toBe(1);
    expect(marker!.col).toBe(13);
    expect(marker!.message).toContain("expected ')'");
  });

  it("reads the recorded ground-fact rejection", () => {
    const marker = markerFromDetail(badFact);
    expect(marker).toEqual({
      kind: "badFact",
      line: 1,
      col: 1,
      message: "fact must be ground: country(X)",
    });
  });

  it("accepts a bare detail object without the wrapper", () => {
    const marker = markerFromDetail(parseError.detail);
    expect(marker?.col).toBe(13);
  });

  it("returns null for anything else", () => {
    expect(markerFromDetail({ detail: "no active evidence" })).toBeNull();
    expect(markerFromDetail("oops")).toBeNull();
    expect(markerFromDetail(null)).toBeNull();
  });
});

describe("caretSnippet", () => {
  it("points the caret at the reported column", () => {
    const marker = markerFromDetail(parseError)!;
    const snippet = caretSnippet("country(iran", marker);
    const [source, caretLine] = snippet.split("\n");
    expect(source).toBe("country(iran");
    // col 13 is 1-based, so the caret sits at string index 12
    expect(caretLine!.indexOf("^")).toBe(12);
    expect(caretLine).toContain(marker.message);
  });

  it("marks column 1 at the start of the line", () => {
    const marker = markerFromDetail(badFact)!;
    const snippet = caretSnippet("country(X)", marker);
    expect(snippet.split("\n")[1]!.startsWith("^")).toBe(true);
  });

  it("clamps out-of-range positions instead of crashing", () => {
    const snippet = caretSnippet("ab", {
      line: 9,
      col: 40,
      message: "m",
      kind: "parseError",
    });
    expect(snippet).toBe("ab\n  ^ m");
  });
});

describe("prefillFromHint", () => {
  it("fills the form with the hint's missing literal", () => {
    const hint: Hint = parseWith(
      hintSchema,
      emptyQuery.hints[0],
      "recorded hint",
    );
    expect(prefillFromHint(hint)).toBe("claimResp(X, nothing)");
  });
});
