/** Freehand lasso geometry and the data<->screen mapping for the scatter. */

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
  width: number;
  height: number;
}

export function fitViewport(
  coords: [number, number][],
  width: number,
  height: number,
  padding = 24,
): Viewport {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of coords) {
    if (x < minX) minX = x;
    if (x > maxX) maxX = x;
    if (y < minY) minY = y;
    if (y > maxY) maxY = y;
  }
  if (!coords.length || minX === Infinity) {
    return { scale: 1, offsetX: 0, offsetY: 0, width, height };
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min(
    (width - 2 * padding) / spanX,
    (height - 2 * padding) / spanY,
  );
  return {
    scale,
    offsetX: (width - scale * (minX + maxX)) / 2,
    offsetY: (height + scale * (minY + maxY)) / 2,
    width,
    height,
  };
}

export function toScreen(vp: Viewport, x: number, y: number): [number, number] {
  // y axis flips so larger data-y renders higher
  return [vp.scale * x + vp.offsetX, -vp.scale * y + vp.offsetY];
}

export function toData(vp: Viewport, px: number, py: number): [number, number] {
  return [(px - vp.offsetX) / vp.scale, (vp.offsetY - py) / vp.scale];
}

/**
 * Append a freehand vertex, skipping points closer than minGapPx on screen
 * so slow drags do not produce thousands of vertices.
 */
export function appendVertex(
  polygon: [number, number][],
  point: [number, number],
  vp: Viewport,
  minGapPx = 4,
): [number, number][] {
  if (polygon.length) {
    const [lx, ly] = toScreen(vp, ...polygon[polygon.length - 1]);
    const [px, py] = toScreen(vp, ...point);
    if (Math.hypot(px - lx, py - ly) < minGapPx) return polygon;
  }
  return [...polygon, point];
}

export function polygonReady(polygon: [number, number][]): boolean {
  return polygon.length >= 3;
}
