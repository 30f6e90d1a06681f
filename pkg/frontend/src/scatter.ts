/**
 * Canvas scatterplot with a freehand lasso. Points re-render as progressive
 * embedding snapshots arrive; releasing a lasso with at least three
 * vertices hands the polygon (in embedding coordinates) to the callback.
 */

import { appendVertex, fitViewport, polygonReady, toData, toScreen, type Viewport } from "./lasso";

const POINT_COLOR = "#7b8794";
const SELECTED_COLOR = "#e8590c";
const LASSO_COLOR = "#1c7ed6";

export interface ScatterCallbacks {
  onPolygon(polygon: [number, number][]): void;
  onHint(message: string): void;
}

export class ScatterView {
  private readonly ctx: CanvasRenderingContext2D;
  private coords: [number, number][] = [];
  private highlighted = new Set<number>();
  private polygon: [number, number][] = [];
  private drawing = false;
  private viewport: Viewport | null = null;
  private enabled = false;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly callbacks: ScatterCallbacks,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    canvas.addEventListener("pointerdown", (e) => this.start(e));
    canvas.addEventListener("pointermove", (e) => this.move(e));
    canvas.addEventListener("pointerup", () => this.finish());
    canvas.addEventListener("pointerleave", () => this.finish());
  }

  setCoords(coords: [number, number][], enabled: boolean): void {
    this.coords = coords;
    this.enabled = enabled;
    this.viewport = fitViewport(coords, this.canvas.width, this.canvas.height);
    this.render();
  }

  setHighlight(indices: Set<number>): void {
    this.highlighted = indices;
    this.render();
  }

  clearPolygon(): void {
    this.polygon = [];
    this.drawing = false;
    this.render();
  }

  private pointer(e: PointerEvent): [number, number] | null {
    if (!this.viewport) return null;
    const rect = this.canvas.getBoundingClientRect();
    const px = ((e.clientX - rect.left) / rect.width) * this.canvas.width;
    const py = ((e.clientY - rect.top) / rect.height) * this.canvas.height;
    return toData(this.viewport, px, py);
  }

  private start(e: PointerEvent): void {
    if (!this.enabled || !this.viewport) return;
    this.drawing = true;
    this.polygon = [];
    const p = this.pointer(e);
    if (p) this.polygon = [p];
    this.canvas.setPointerCapture(e.pointerId);
  }

  private move(e: PointerEvent): void {
    if (!this.drawing || !this.viewport) return;
    const p = this.pointer(e);
    if (p) {
      this.polygon = appendVertex(this.polygon, p, this.viewport);
      this.render();
    }
  }

  private finish(): void {
    if (!this.drawing) return;
    this.drawing = false;
    if (polygonReady(this.polygon)) {
      this.callbacks.onPolygon(this.polygon);
    } else if (this.polygon.length > 0) {
      this.callbacks.onHint("Draw a larger lasso: at least 3 points are needed.");
      this.polygon = [];
      this.render();
    }
  }

  render(): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (!this.viewport || !this.coords.length) return;

    for (let i = 0; i < this.coords.length; i++) {
      const [x, y] = toScreen(this.viewport, ...this.coords[i]);
      ctx.beginPath();
      ctx.arc(x, y, this.highlighted.has(i) ? 3.4 : 2.4, 0, Math.PI * 2);
      ctx.fillStyle = this.highlighted.has(i) ? SELECTED_COLOR : POINT_COLOR;
      ctx.globalAlpha = this.highlighted.has(i) ? 0.95 : 0.6;
      ctx.fill();
    }
    ctx.globalAlpha = 1;

    if (this.polygon.length >= 2) {
      ctx.beginPath();
      const [sx, sy] = toScreen(this.viewport, ...this.polygon[0]);
      ctx.moveTo(sx, sy);
      for (const vertex of this.polygon.slice(1)) {
        const [x, y] = toScreen(this.viewport, ...vertex);
        ctx.lineTo(x, y);
      }
      if (!this.drawing) ctx.closePath();
      ctx.strokeStyle = LASSO_COLOR;
      ctx.lineWidth = 1.5;
      ctx.setLineDash([5, 4]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}
