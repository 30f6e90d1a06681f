import { describe, expect, it } from "vitest";

import type { DatasetInfo, SelectionInfo } from "../src/api";
import {
  canExplain,
  canLasso,
  highlightedIndices,
  initialState,
  withDataset,
  withSelection,
  withSnapshot,
} from "../src/state";

const dataset: DatasetInfo = {
  dataset_id: "d1",
  name: "toy",
  row_count: 4,
  columns: [{ name: "x", kind: "numerical" }],
  label: null,
  domain_description: "",
};

function selection(selected: boolean[]): SelectionInfo {
  const count = selected.filter(Boolean).length;
  return {
    mask_id: "m1",
    dataset_id: "d1",
    selected_count: count,
    rest_count: selected.length - count,
    selected,
    source: { type: "lasso" },
  };
}

const snapshot = (jobId: string, epoch: number) => ({
  jobId,
  epoch,
  coords: [[0, 0]] as [number, number][],
  complete: false,
});

describe("view state", () => {
  it("lasso is disabled until a snapshot exists", () => {
    let state = withDataset(initialState(), dataset);
    expect(canLasso(state)).toBe(false);
    state = withSnapshot(state, snapshot("j1", 25));
    expect(canLasso(state)).toBe(true);
  });

  it("explanations need a non-empty, non-total mask", () => {
    let state = withDataset(initialState(), dataset);
    state = withSnapshot(state, snapshot("j1", 25));
    expect(canExplain(state)).toBe(false);
    expect(canExplain(withSelection(state, selection([true, false, true, false])))).toBe(true);
    expect(canExplain(withSelection(state, selection([false, false, false, false])))).toBe(false);
    expect(canExplain(withSelection(state, selection([true, true, true, true])))).toBe(false);
  });

  it("progressive snapshots of the same job keep the selection", () => {
    let state = withDataset(initialState(), dataset);
    state = withSnapshot(state, snapshot("j1", 25));
    state = withSelection(state, selection([true, false, false, false]));
    state = withSnapshot(state, snapshot("j1", 50));
    expect(state.selection).not.toBeNull();
  });

  it("a re-embed clears polygon, selection and explanation", () => {
    let state = withDataset(initialState(), dataset);
    state = withSnapshot(state, snapshot("j1", 25));
    state = { ...state, polygon: [[0, 0], [1, 0], [1, 1]] };
    state = withSelection(state, selection([true, false, false, false]));
    state = withSnapshot(state, snapshot("j2", 25));
    expect(state.polygon).toEqual([]);
    expect(state.selection).toBeNull();
    expect(state.explanation).toBeNull();
  });

  it("highlights exactly the server mask", () => {
    let state = withDataset(initialState(), dataset);
    state = withSnapshot(state, snapshot("j1", 25));
    state = withSelection(state, selection([true, false, true, false]));
    expect([...highlightedIndices(state)].sort()).toEqual([0, 2]);
  });
});
