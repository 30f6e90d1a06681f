/**
 * View state and its transitions, kept pure so the interaction rules are
 * testable without a DOM: the lasso is only editable once a snapshot
 * exists, explanations need a non-empty non-total selection, and a
 * re-embed clears the polygon and selection.
 */

import type { DatasetInfo, ExplanationRecord, SelectionInfo, Strategy } from "./api";

export interface Snapshot {
  jobId: string;
  epoch: number;
  coords: [number, number][];
  complete: boolean;
}

export interface ViewState {
  dataset: DatasetInfo | null;
  snapshot: Snapshot | null;
  polygon: [number, number][];
  selection: SelectionInfo | null;
  strategy: Strategy;
  trials: number;
  useMock: boolean;
  explanation: ExplanationRecord | null;
  distributionFeature: string | null;
  ranking: string[];
}

export function initialState(): ViewState {
  return {
    dataset: null,
    snapshot: null,
    polygon: [],
    selection: null,
    strategy: "S1",
    trials: 1,
    useMock: true,
    explanation: null,
    distributionFeature: null,
    ranking: [],
  };
}

export function withDataset(state: ViewState, dataset: DatasetInfo): ViewState {
  return { ...initialState(), dataset, strategy: state.strategy, trials: state.trials, useMock: state.useMock };
}

/** Progressive snapshots animate in place; a new job clears stale geometry. */
export function withSnapshot(state: ViewState, snapshot: Snapshot): ViewState {
  const isNewJob = state.snapshot?.jobId !== snapshot.jobId;
  return {
    ...state,
    snapshot,
    polygon: isNewJob ? [] : state.polygon,
    selection: isNewJob ? null : state.selection,
    explanation: isNewJob ? null : state.explanation,
    ranking: isNewJob ? [] : state.ranking,
    distributionFeature: isNewJob ? null : state.distributionFeature,
  };
}

export function withSelection(state: ViewState, selection: SelectionInfo): ViewState {
  return {
    ...state,
    selection,
    polygon: [],
    explanation: null,
    ranking: [],
    distributionFeature: null,
  };
}

export function canLasso(state: ViewState): boolean {
  return state.snapshot !== null;
}

export function canExplain(state: ViewState): boolean {
  const selection = state.selection;
  if (!selection) return false;
  return selection.selected_count > 0 && selection.rest_count > 0;
}

/** Indices the scatterplot should highlight; always the server's mask. */
export function highlightedIndices(state: ViewState): Set<number> {
  const out = new Set<number>();
  state.selection?.selected.forEach((flag, index) => {
    if (flag) out.add(index);
  });
  return out;
}
