/**
 * Split explanation text into segments by claim spans so each claim can be
 * colored by its verdict, with the ground-truth statistic on hover.
 */

import type { ClaimVerdictInfo, Verdict } from "./api";

export interface Segment {
  text: string;
  verdict: Verdict | null;
  expected: string;
  feature: string;
}

export function splitByClaims(text: string, claims: ClaimVerdictInfo[]): Segment[] {
  const spans = claims
    .map((claim) => ({
      start: Math.max(0, Math.min(claim.span[0], text.length)),
      end: Math.max(0, Math.min(claim.span[1], text.length)),
      claim,
    }))
    .filter((s) => s.end > s.start)
    .sort((a, b) => a.start - b.start || b.end - a.end);

  const segments: Segment[] = [];
  let cursor = 0;
  for (const { start, end, claim } of spans) {
    if (start < cursor) continue; // overlapping claim, first one wins
    if (start > cursor) {
      segments.push({ text: text.slice(cursor, start), verdict: null, expected: "", feature: "" });
    }
    segments.push({
      text: text.slice(start, end),
      verdict: claim.verdict,
      expected: claim.expected,
      feature: claim.feature,
    });
    cursor = end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), verdict: null, expected: "", feature: "" });
  }
  return segments;
}

/** Bold **term** markup to <strong>, everything else HTML-escaped. */
export function markupToHtml(text: string): string {
  const escaped = text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
  return escaped.replace(/\*\*([^*\n]+)\*\*/g, "<strong>$1</strong>");
}
