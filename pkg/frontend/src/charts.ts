/**
 * Layout for the paired selected-vs-rest charts: normalized rectangles in
 * [0,1] x [0,1] that the canvas renderer scales to pixels. Counts are used
 * exactly as the service reports them.
 */

import type { DistributionInfo } from "./api";

export interface BarRect {
  x: number;
  y: number;
  w: number;
  h: number;
  side: "selected" | "rest";
  label: string;
}

export function chartLayout(dist: DistributionInfo): BarRect[] {
  const maxCount = Math.max(1, ...dist.selected_counts, ...dist.rest_counts);
  const n = dist.selected_counts.length;
  if (n === 0) return [];
  const rects: BarRect[] = [];
  const slot = 1 / n;
  const barWidth = slot * 0.42;

  for (let i = 0; i < n; i++) {
    const label =
      dist.kind === "categorical" && dist.categories
        ? dist.categories[i]
        : dist.bin_edges
          ? `${formatEdge(dist.bin_edges[i])}..${formatEdge(dist.bin_edges[i + 1])}`
          : String(i);
    const pairs: ["selected" | "rest", number][] = [
      ["selected", dist.selected_counts[i]],
      ["rest", dist.rest_counts[i]],
    ];
    pairs.forEach(([side, count], j) => {
      const h = count / maxCount;
      rects.push({
        x: i * slot + slot * 0.06 + j * barWidth,
        y: 1 - h,
        w: barWidth,
        h,
        side,
        label,
      });
    });
  }
  return rects;
}

function formatEdge(value: number): string {
  if (!Number.isFinite(value)) return "?";
  if (Math.abs(value) >= 1000) return value.toFixed(0);
  return parseFloat(value.toPrecision(3)).toString();
}
