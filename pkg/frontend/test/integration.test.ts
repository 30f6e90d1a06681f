/**
 * Drives the real HTTP service end to end, exactly as the browser UI does:
 * upload -> embed -> lasso -> profile -> explanation -> claim rendering.
 * Requires the python package to be installed (it is started as a child
 * process on a scratch port).
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { splitByClaims } from "../src/spans";
import {
  highlightedIndices,
  initialState,
  withDataset,
  withSelection,
  withSnapshot,
  type ViewState,
} from "../src/state";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;
const api = new ApiClient(BASE);

function fileFrom(path: string, name: string, type: string): File {
  return new File([readFileSync(path)], name, { type });
}

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 200; attempt++) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service never became healthy");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "lassolens-ui-"));
  const generated = spawnSync(
    "python3",
    ["-m", "lassolens.cli", "fixtures", "--out", dataDir],
    { stdio: "pipe" },
  );
  expect(generated.status).toBe(0);

  server = spawn(
    "python3",
    [
      "-m", "lassolens.cli", "serve",
      "--host", "127.0.0.1",
      "--port", String(PORT),
      "--store", join(dataDir, "store"),
    ],
    { stdio: "pipe" },
  );
  await waitForHealth();
}, 120_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("UI loop against the live service", () => {
  let state: ViewState = initialState();

  it("uploads the penguins dataset", async () => {
    const info = await api.uploadDataset(
      fileFrom(join(dataDir, "penguins.csv"), "penguins.csv", "text/csv"),
      fileFrom(
        join(dataDir, "penguins.context.json"),
        "penguins.context.json",
        "application/json",
      ),
    );
    expect(info.row_count).toBe(333);
    state = withDataset(state, info);
  });

  it("polls embedding snapshots to completion", async () => {
    const { job_id } = await api.startEmbedding(state.dataset!.dataset_id, {
      n_neighbors: 25,
      n_epochs: 60,
      snapshot_interval: 20,
    });
    let epochsSeen: number[] = [];
    for (;;) {
      const status = await api.embeddingStatus(job_id);
      if (status.coords) {
        state = withSnapshot(state, {
          jobId: job_id,
          epoch: status.epoch,
          coords: status.coords,
          complete: status.complete,
        });
        if (!epochsSeen.includes(status.epoch)) epochsSeen.push(status.epoch);
      }
      if (status.status === "complete") break;
      expect(status.status).not.toBe("failed");
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
    expect(state.snapshot?.complete).toBe(true);
    expect(state.snapshot?.coords).toHaveLength(333);
    expect([...epochsSeen]).toEqual([...epochsSeen].sort((a, b) => a - b));
  });

  it("lasso produces a highlighted subset identical to the server mask", async () => {
    const coords = state.snapshot!.coords;
    const xs = coords.map((c) => c[0]).sort((a, b) => a - b);
    const ys = coords.map((c) => c[1]);
    const midX = xs[Math.floor(xs.length / 2)];
    const lo: [number, number] = [xs[0] - 1, Math.min(...ys) - 1];
    const polygon: [number, number][] = [
      lo,
      [midX, lo[1]],
      [midX, Math.max(...ys) + 1],
      [lo[0], Math.max(...ys) + 1],
    ];
    const selection = await api.selectPolygon(
      state.dataset!.dataset_id,
      polygon,
      state.snapshot!.jobId,
    );
    expect(selection.selected_count).toBeGreaterThan(0);
    expect(selection.selected_count).toBeLessThan(333);
    state = withSelection(state, selection);

    const highlighted = highlightedIndices(state);
    const fromServer = new Set(
      selection.selected.flatMap((flag, index) => (flag ? [index] : [])),
    );
    expect(highlighted).toEqual(fromServer);
    expect(highlighted.size).toBe(selection.selected_count);
  });

  it("mock S1 explanation renders every claim span as verified", async () => {
    const { explanation_ids } = await api.requestExplanations(
      state.selection!.mask_id,
      { strategy: "S1", trials: 1, use_mock: true },
    );
    const record = await api.explanation(explanation_ids[0]);
    expect(record.validation.contradicted).toBe(0);
    expect(record.validation.hallucinated_features).toEqual([]);

    const segments = splitByClaims(record.raw_text, record.validation.claims);
    const claimSegments = segments.filter((s) => s.verdict !== null);
    expect(claimSegments.length).toBeGreaterThan(0);
    expect(claimSegments.every((s) => s.verdict === "verified")).toBe(true);
    expect(segments.map((s) => s.text).join("")).toBe(record.raw_text);
  });

  it("feature list is ordered by KS rank and distributions load", async () => {
    const profile = await api.profile(state.selection!.mask_id);
    expect(profile.ranking.length).toBe(6);
    const dist = await api.distribution(
      state.selection!.mask_id,
      profile.ranking[0],
      12,
    );
    const total = dist.selected_counts.reduce((a, b) => a + b, 0);
    expect(total).toBe(state.selection!.selected_count - dist.selected_missing);
  });

  it("S3 on the bank dataset surfaces the infeasibility report", async () => {
    const info = await api.uploadDataset(
      fileFrom(join(dataDir, "bank_marketing.csv"), "bank_marketing.csv", "text/csv"),
      fileFrom(
        join(dataDir, "bank_marketing.context.json"),
        "bank_marketing.context.json",
        "application/json",
      ),
    );
    const selection = await api.selectPredicate(info.dataset_id, "deposit", "yes");
    let budget: ApiError | null = null;
    try {
      await api.requestExplanations(selection.mask_id, {
        strategy: "S3",
        trials: 1,
        use_mock: true,
      });
    } catch (error) {
      budget = error as ApiError;
    }
    expect(budget).not.toBeNull();
    expect(budget!.code).toBe("budget_exceeded");
    const report = budget!.budgetReport!;
    expect(report.estimated_tokens).toBeGreaterThan(128_000);
    expect(report.strategy).toBe("S3");
  }, 120_000);
});
