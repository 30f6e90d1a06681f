import { describe, expect, it } from "vitest";

import type { ClaimVerdictInfo } from "../src/api";
import { markupToHtml, splitByClaims } from "../src/spans";

function claim(
  span: [number, number],
  verdict: ClaimVerdictInfo["verdict"],
  feature = "f",
): ClaimVerdictInfo {
  return {
    feature,
    matched: true,
    values: [1],
    claim_kind: "mean-like",
    span,
    text: "",
    verdict,
    expected: "mean 1 vs 2",
  };
}

describe("splitByClaims", () => {
  const text = "mean **duration** 537 vs 223 in the rest";

  it("reassembles to the original text", () => {
    const segments = splitByClaims(text, [claim([18, 28], "verified")]);
    expect(segments.map((s) => s.text).join("")).toBe(text);
  });

  it("marks the claim segment with its verdict", () => {
    const segments = splitByClaims(text, [claim([18, 28], "contradicted")]);
    const marked = segments.filter((s) => s.verdict !== null);
    expect(marked).toHaveLength(1);
    expect(marked[0].text).toBe("537 vs 223");
    expect(marked[0].verdict).toBe("contradicted");
    expect(marked[0].expected).toContain("mean");
  });

  it("drops overlapping spans after the first", () => {
    const segments = splitByClaims(text, [
      claim([18, 28], "verified"),
      claim([20, 30], "contradicted"),
    ]);
    expect(segments.filter((s) => s.verdict !== null)).toHaveLength(1);
    expect(segments.map((s) => s.text).join("")).toBe(text);
  });

  it("clamps spans to the text bounds", () => {
    const segments = splitByClaims("abc", [claim([1, 99], "unverifiable")]);
    expect(segments.map((s) => s.text).join("")).toBe("abc");
    expect(segments[1].text).toBe("bc");
  });

  it("handles no claims", () => {
    expect(splitByClaims("abc", [])).toEqual([
      { text: "abc", verdict: null, expected: "", feature: "" },
    ]);
  });

  it("every claim from a clean mock validation renders verified", () => {
    const mock = [
      claim([5, 10], "verified", "a"),
      claim([15, 20], "verified", "b"),
    ];
    const segments = splitByClaims("0123456789012345678901234", mock);
    const verdicts = segments.filter((s) => s.verdict !== null);
    expect(verdicts).toHaveLength(2);
    expect(verdicts.every((s) => s.verdict === "verified")).toBe(true);
  });
});

describe("markupToHtml", () => {
  it("escapes html and keeps bold", () => {
    expect(markupToHtml("**x** < 3 & more")).toBe(
      "<strong>x</strong> &lt; 3 &amp; more",
    );
  });

  it("leaves unbalanced markers alone", () => {
    expect(markupToHtml("**dangling")).toBe("**dangling");
  });
});
