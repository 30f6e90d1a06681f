import { ApiClient, ApiError, type Strategy } from "./api";
import { showNotice } from "./notices";
import { renderBudgetNotice, renderDistribution, renderExplanation } from "./panels";
import { ScatterView } from "./scatter";
import {
  canExplain,
  canLasso,
  highlightedIndices,
  initialState,
  withDataset,
  withSelection,
  withSnapshot,
  type ViewState,
} from "./state";
import "./style.css";

const api = new ApiClient("");
let state: ViewState = initialState();

// stale responses must not overwrite newer ones: every async panel update
// is keyed by a request id, last write wins
const requestIds = { explanation: 0, distribution: 0 };

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const noticeArea = $("notices");
const scatter = new ScatterView($<HTMLCanvasElement>("scatter"), {
  onPolygon: (polygon) => void submitPolygon(polygon),
  onHint: (message) => showNotice(noticeArea, "info", message),
});

function fail(error: unknown): void {
  if (error instanceof ApiError && error.budgetReport) {
    renderBudgetNotice($("explanation-panel"), error.budgetReport);
    return;
  }
  const message = error instanceof Error ? error.message : String(error);
  showNotice(noticeArea, "error", message);
}

function sync(): void {
  $<HTMLButtonElement>("embed-button").disabled = state.dataset === null;
  $<HTMLButtonElement>("explain-button").disabled = !canExplain(state);
  $("dataset-info").textContent = state.dataset
    ? `${state.dataset.name}: ${state.dataset.row_count} rows`
    : "no dataset loaded";
  $("selection-info").textContent = state.selection
    ? `${state.selection.selected_count} of ` +
      `${state.selection.selected_count + state.selection.rest_count} rows selected`
    : "no selection";
  $("epoch-info").textContent = state.snapshot
    ? `epoch ${state.snapshot.epoch}` + (state.snapshot.complete ? " (done)" : "")
    : "";
  scatter.setCoords(state.snapshot?.coords ?? [], canLasso(state));
  scatter.setHighlight(highlightedIndices(state));
}

async function uploadDataset(): Promise<void> {
  const dataFile = $<HTMLInputElement>("data-file").files?.[0];
  const contextFile = $<HTMLInputElement>("context-file").files?.[0];
  if (!dataFile || !contextFile) {
    showNotice(noticeArea, "info", "Pick both a data CSV and a context JSON file.");
    return;
  }
  const info = await api.uploadDataset(dataFile, contextFile);
  state = withDataset(state, info);
  sync();
}

async function startEmbedding(): Promise<void> {
  if (!state.dataset) return;
  const { job_id } = await api.startEmbedding(state.dataset.dataset_id, {
    n_neighbors: Number($<HTMLInputElement>("neighbors").value) || 50,
    n_epochs: Number($<HTMLInputElement>("epochs").value) || 500,
    seed: Number($<HTMLInputElement>("seed").value) || 42,
  });
  scatter.clearPolygon();
  await pollEmbedding(job_id);
}

async function pollEmbedding(jobId: string): Promise<void> {
  for (;;) {
    const status = await api.embeddingStatus(jobId);
    if (status.coords) {
      state = withSnapshot(state, {
        jobId,
        epoch: status.epoch,
        coords: status.coords,
        complete: status.complete,
      });
      sync();
    }
    if (status.status === "failed") {
      showNotice(noticeArea, "error", `embedding failed: ${status.error}`);
      return;
    }
    if (status.status === "complete") return;
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
}

async function submitPolygon(polygon: [number, number][]): Promise<void> {
  if (!state.dataset || !state.snapshot) return;
  try {
    const selection = await api.selectPolygon(
      state.dataset.dataset_id,
      polygon,
      state.snapshot.jobId,
    );
    if (selection.selected_count === 0) {
      showNotice(noticeArea, "info", "The lasso contains no points.");
      scatter.clearPolygon();
      return;
    }
    state = withSelection(state, selection);
    scatter.clearPolygon();
    sync();
    await loadProfile();
  } catch (error) {
    fail(error);
  }
}

async function loadProfile(): Promise<void> {
  if (!state.selection) return;
  const profile = await api.profile(state.selection.mask_id);
  state = { ...state, ranking: profile.ranking };
  const picker = $<HTMLSelectElement>("feature-picker");
  picker.replaceChildren();
  for (const feature of profile.ranking) {
    const option = document.createElement("option");
    option.value = feature;
    option.textContent = feature;
    picker.appendChild(option);
  }
  if (profile.ranking.length) {
    state = { ...state, distributionFeature: profile.ranking[0] };
    await loadDistribution(profile.ranking[0]);
  }
}

async function loadDistribution(feature: string): Promise<void> {
  if (!state.selection) return;
  const requestId = ++requestIds.distribution;
  try {
    const dist = await api.distribution(state.selection.mask_id, feature);
    if (requestId !== requestIds.distribution) return;
    renderDistribution(
      $<HTMLCanvasElement>("distribution-canvas"),
      $("distribution-legend"),
      dist,
    );
  } catch (error) {
    fail(error);
  }
}

async function requestExplanation(): Promise<void> {
  if (!state.selection) return;
  const strategy = $<HTMLSelectElement>("strategy").value as Strategy;
  const trials = Number($<HTMLInputElement>("trials").value) || 1;
  const useMock = $<HTMLInputElement>("use-mock").checked;
  const requestId = ++requestIds.explanation;
  const panel = $("explanation-panel");
  panel.textContent = "generating...";
  try {
    const { explanation_ids } = await api.requestExplanations(
      state.selection.mask_id,
      { strategy, trials, use_mock: useMock },
    );
    const record = await api.explanation(explanation_ids[0]);
    if (requestId !== requestIds.explanation) return;
    state = { ...state, explanation: record, strategy, trials, useMock };
    renderExplanation(panel, record, { strategy, trials });
  } catch (error) {
    if (requestId === requestIds.explanation) panel.textContent = "";
    fail(error);
  }
}

function wire(): void {
  $("upload-button").addEventListener("click", () => uploadDataset().catch(fail));
  $("embed-button").addEventListener("click", () => startEmbedding().catch(fail));
  $("explain-button").addEventListener("click", () => void requestExplanation());
  $<HTMLSelectElement>("feature-picker").addEventListener("change", (e) => {
    const feature = (e.target as HTMLSelectElement).value;
    state = { ...state, distributionFeature: feature };
    void loadDistribution(feature);
  });
  sync();
}

wire();
