/**
 * Explanation panel (claim spans colored by verdict) and distribution panel
 * (paired histograms / grouped bars). Pure DOM, no framework; every number
 * rendered comes from a service response.
 */

import type { BudgetReport, DistributionInfo, ExplanationRecord } from "./api";
import { chartLayout } from "./charts";
import { markupToHtml, splitByClaims } from "./spans";

const SIDE_COLORS = { selected: "#e8590c", rest: "#4c6ef5" } as const;

export function renderExplanation(
  container: HTMLElement,
  record: ExplanationRecord,
  requested: { strategy: string; trials: number },
): void {
  container.replaceChildren();

  const header = document.createElement("div");
  header.className = "panel-header";
  const badges = [
    `strategy ${record.strategy}`,
    `trial ${record.trial_index + 1} of ${requested.trials}`,
    `model ${record.model}`,
    record.validation.format_ok ? "format ok" : "format violated",
  ];
  for (const text of badges) {
    const badge = document.createElement("span");
    badge.className =
      "badge" + (text === "format violated" ? " badge-bad" : "");
    badge.textContent = text;
    header.appendChild(badge);
  }
  container.appendChild(header);

  const body = document.createElement("div");
  body.className = "explanation-text";
  for (const segment of splitByClaims(record.raw_text, record.validation.claims)) {
    const span = document.createElement("span");
    span.innerHTML = markupToHtml(segment.text);
    if (segment.verdict) {
      span.className = `claim claim-${segment.verdict}`;
      span.title = `${segment.feature}: ${segment.verdict}\n${segment.expected}`;
    }
    body.appendChild(span);
  }
  container.appendChild(body);

  const stats = document.createElement("div");
  stats.className = "panel-footer";
  const v = record.validation;
  stats.textContent =
    `claims: ${v.verified} verified / ${v.contradicted} contradicted / ` +
    `${v.unverifiable} unverifiable - mention precision ` +
    `${v.mention_precision.toFixed(2)}, recall ${v.mention_recall.toFixed(2)}`;
  container.appendChild(stats);

  if (v.hallucinated_features.length) {
    const warn = document.createElement("div");
    warn.className = "panel-warning";
    warn.textContent =
      "mentions nothing in the data: " + v.hallucinated_features.join(", ");
    container.appendChild(warn);
  }
}

export function renderBudgetNotice(
  container: HTMLElement,
  report: BudgetReport,
): void {
  container.replaceChildren();
  const notice = document.createElement("div");
  notice.className = "budget-notice";
  const title = document.createElement("strong");
  title.textContent = `${report.strategy} is infeasible for this selection`;
  const body = document.createElement("p");
  body.textContent =
    `The evidence is estimated at ${report.estimated_tokens.toLocaleString()} ` +
    `tokens, over the ${report.budget.toLocaleString()} token budget. ` +
    "Try the statistics strategy (S1) or a subsample (S2) instead.";
  notice.append(title, body);
  container.appendChild(notice);
}

export function renderDistribution(
  canvas: HTMLCanvasElement,
  legendEl: HTMLElement,
  dist: DistributionInfo,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const margin = { top: 8, right: 8, bottom: 34, left: 8 };
  const plotW = canvas.width - margin.left - margin.right;
  const plotH = canvas.height - margin.top - margin.bottom;

  const rects = chartLayout(dist);
  for (const rect of rects) {
    ctx.fillStyle = SIDE_COLORS[rect.side];
    ctx.globalAlpha = 0.85;
    ctx.fillRect(
      margin.left + rect.x * plotW,
      margin.top + rect.y * plotH,
      Math.max(1, rect.w * plotW),
      rect.h * plotH,
    );
  }
  ctx.globalAlpha = 1;

  ctx.fillStyle = "#495057";
  ctx.font = "10px sans-serif";
  const labels = [...new Set(rects.map((r) => r.label))];
  const step = Math.max(1, Math.ceil(labels.length / 8));
  labels.forEach((label, i) => {
    if (i % step !== 0) return;
    const x = margin.left + (i / labels.length) * plotW;
    ctx.fillText(label.slice(0, 12), x, canvas.height - 18);
  });

  legendEl.replaceChildren();
  for (const [side, color] of Object.entries(SIDE_COLORS)) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.background = color;
    item.append(swatch, document.createTextNode(side));
    legendEl.appendChild(item);
  }
  const missing = document.createElement("span");
  missing.className = "legend-item";
  missing.textContent =
    `missing: ${dist.selected_missing} selected / ${dist.rest_missing} rest`;
  legendEl.appendChild(missing);
}
