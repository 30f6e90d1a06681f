import { describe, expect, it } from "vitest";

import { appendVertex, fitViewport, polygonReady, toData, toScreen } from "../src/lasso";

const coords: [number, number][] = [
  [-2, -1],
  [4, 3],
  [1, 1],
];

describe("viewport", () => {
  it("round-trips data coordinates through the screen mapping", () => {
    const vp = fitViewport(coords, 800, 600);
    for (const [x, y] of coords) {
      const [px, py] = toScreen(vp, x, y);
      const [bx, by] = toData(vp, px, py);
      expect(bx).toBeCloseTo(x, 9);
      expect(by).toBeCloseTo(y, 9);
    }
  });

  it("keeps all points inside the padded canvas", () => {
    const vp = fitViewport(coords, 800, 600, 24);
    for (const [x, y] of coords) {
      const [px, py] = toScreen(vp, x, y);
      expect(px).toBeGreaterThanOrEqual(23);
      expect(px).toBeLessThanOrEqual(777);
      expect(py).toBeGreaterThanOrEqual(23);
      expect(py).toBeLessThanOrEqual(577);
    }
  });

  it("tolerates an empty point set", () => {
    const vp = fitViewport([], 800, 600);
    expect(vp.scale).toBe(1);
  });
});

describe("freehand accumulation", () => {
  it("skips vertices closer than the screen-space gap", () => {
    const vp = fitViewport(coords, 800, 600);
    let polygon: [number, number][] = [];
    polygon = appendVertex(polygon, [0, 0], vp);
    polygon = appendVertex(polygon, [0.0001, 0.0001], vp); // sub-pixel
    polygon = appendVertex(polygon, [1, 1], vp);
    expect(polygon).toHaveLength(2);
  });

  it("needs three vertices to close", () => {
    expect(polygonReady([[0, 0], [1, 0]])).toBe(false);
    expect(polygonReady([[0, 0], [1, 0], [1, 1]])).toBe(true);
  });
});
