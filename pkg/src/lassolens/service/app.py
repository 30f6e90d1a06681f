"""HTTP API: one endpoint per pipeline stage.

Upload a dataset, start an embedding job and poll its snapshots, turn a
polygon or predicate into a stored selection, read the selection's contrast
profile and per-feature distributions, request explanations (live endpoint
or deterministic mock), and fetch each explanation with its validation
report. Every error body carries a machine-readable code.
"""

from __future__ import annotations

import tempfile
import threading
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .. import validation
from ..embedding import EmbeddingParams, coords_to_csv
from ..errors import ArityError, LassoLensError, ParameterError, SelectionError
from ..evidence import (
    DEFAULT_TOKEN_BUDGET,
    Strategy,
    assemble_evidence,
    build_prompt,
    check_budget,
)
from ..ingestion import load_dataset
from ..llm import Explanation, LlmConfig, generate_explanation, template_explain
from ..selection import select_by_predicate, select_lasso
from ..stats import feature_distribution, profile_to_text, summarize
from ..store import SessionStore
from .jobs import EmbeddingJobManager
from .schemas import (
    ColumnInfo,
    DatasetOut,
    EmbeddingJobOut,
    EmbeddingRequest,
    ExplanationIdsOut,
    ExplanationRequest,
    SelectionOut,
    SelectionRequest,
)

_STATUS_BY_CODE = {
    "not_found": 404,
    "degenerate_polygon": 422,
    "predicate_error": 422,
    "parameter_error": 422,
    "selection_error": 422,
    "arity_error": 409,
    "structural_error": 422,
    "empty_dataset": 422,
    "context_mismatch": 422,
    "undecidable_kind": 422,
    "encoding_error": 422,
    "ordering_error": 422,
    "undefined_statistic": 422,
    "budget_exceeded": 422,
    "contract_violation": 500,
    "config_error": 502,
    "llm_unavailable": 503,
    "validation_mismatch": 409,
}


def create_app(
    store_dir: str | Path | None = None,
    llm_config: LlmConfig | None = None,
    default_budget: int = DEFAULT_TOKEN_BUDGET,
    frontend_dir: str | Path | None = None,
    llm_transport=None,
) -> FastAPI:
    store = SessionStore(store_dir or tempfile.mkdtemp(prefix="lassolens-"))
    jobs = EmbeddingJobManager(store)
    config = llm_config or LlmConfig()
    profile_cache: dict[str, object] = {}
    profile_lock = threading.Lock()

    app = FastAPI(title="lassolens", version="0.1.0")
    app.state.store = store
    app.state.jobs = jobs

    @app.exception_handler(LassoLensError)
    async def _domain_error(_: Request, exc: LassoLensError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def _dataset_out(dataset) -> DatasetOut:
        return DatasetOut(
            dataset_id=dataset.id,
            name=dataset.name,
            row_count=dataset.row_count,
            columns=[ColumnInfo(name=c.name, kind=c.kind) for c in dataset.columns],
            label=dataset.descriptions.label,
            domain_description=dataset.descriptions.domain_description,
        )

    def _profile_for(mask_id: str):
        with profile_lock:
            if mask_id in profile_cache:
                return profile_cache[mask_id]
        mask = store.get_mask(mask_id)
        dataset = store.get_dataset(mask.dataset_id)
        profile = summarize(dataset, mask)
        with profile_lock:
            profile_cache[mask_id] = profile
        return profile

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/datasets", response_model=DatasetOut)
    async def upload_dataset(data: UploadFile, context: UploadFile):
        with tempfile.TemporaryDirectory() as tmp:
            data_path = Path(tmp) / (data.filename or "data.csv")
            context_path = Path(tmp) / (context.filename or "context.json")
            data_path.write_bytes(await data.read())
            context_path.write_bytes(await context.read())
            dataset = load_dataset(data_path, context_path)
        store.add_dataset(dataset)
        return _dataset_out(dataset)

    @app.get("/datasets", response_model=list[DatasetOut])
    def list_datasets():
        return [_dataset_out(d) for d in store.list_datasets()]

    @app.get("/datasets/{dataset_id}", response_model=DatasetOut)
    def get_dataset(dataset_id: str):
        return _dataset_out(store.get_dataset(dataset_id))

    @app.post("/datasets/{dataset_id}/embedding")
    def start_embedding(dataset_id: str, request: EmbeddingRequest):
        dataset = store.get_dataset(dataset_id)
        params = EmbeddingParams(**request.model_dump())
        job = jobs.start(dataset, params)
        return {"job_id": job.job_id}

    @app.get("/embeddings/{job_id}", response_model=EmbeddingJobOut)
    def embedding_status(job_id: str):
        return EmbeddingJobOut(**jobs.get(job_id).snapshot())

    @app.get("/embeddings/{job_id}/coords.csv", response_class=PlainTextResponse)
    def embedding_csv(job_id: str):
        embedding = jobs.completed_embedding(job_id)
        return coords_to_csv(embedding)

    @app.post("/datasets/{dataset_id}/selections", response_model=SelectionOut)
    def create_selection(dataset_id: str, request: SelectionRequest):
        dataset = store.get_dataset(dataset_id)
        if request.predicate is not None:
            mask = select_by_predicate(
                dataset, request.predicate.column, request.predicate.value
            )
        elif request.polygon is not None:
            if not request.job_id:
                raise ParameterError(
                    "polygon selections need the job_id of a completed embedding"
                )
            embedding = jobs.completed_embedding(request.job_id)
            if embedding.dataset_id != dataset_id:
                raise SelectionError(
                    "embedding job belongs to a different dataset",
                    job_id=request.job_id,
                )
            mask = select_lasso(embedding, request.polygon)
        else:
            raise ParameterError("selection needs either a polygon or a predicate")
        store.add_mask(mask)
        return SelectionOut(
            mask_id=mask.id,
            dataset_id=mask.dataset_id,
            selected_count=mask.selected_count,
            rest_count=mask.rest_count,
            selected=mask.selected.tolist(),
            source=mask.source,
        )

    @app.get("/selections/{mask_id}", response_model=SelectionOut)
    def get_selection(mask_id: str):
        mask = store.get_mask(mask_id)
        return SelectionOut(
            mask_id=mask.id,
            dataset_id=mask.dataset_id,
            selected_count=mask.selected_count,
            rest_count=mask.rest_count,
            selected=mask.selected.tolist(),
            source=mask.source,
        )

    @app.get("/selections/{mask_id}/profile")
    def selection_profile(mask_id: str):
        profile = _profile_for(mask_id)
        doc = profile.to_dict()
        doc["text"] = profile_to_text(profile)
        return doc

    @app.get("/selections/{mask_id}/distribution/{feature}")
    def selection_distribution(mask_id: str, feature: str, bins: int = 20):
        mask = store.get_mask(mask_id)
        dataset = store.get_dataset(mask.dataset_id)
        return feature_distribution(dataset, mask, feature, bins=bins).to_dict()

    @app.post(
        "/selections/{mask_id}/explanations",
        response_model=ExplanationIdsOut,
        status_code=201,
    )
    def request_explanations(mask_id: str, request: ExplanationRequest):
        mask = store.get_mask(mask_id)
        dataset = store.get_dataset(mask.dataset_id)
        profile = _profile_for(mask_id)
        budget = request.budget or default_budget

        ids = []
        for trial in range(request.trials):
            strategy = Strategy(
                request.strategy,
                fraction=request.fraction,
                seed=request.seed + trial,
            )
            bundle = assemble_evidence(dataset, mask, strategy, profile=profile)
            prompt = build_prompt(bundle)
            decision = check_budget(prompt, budget)
            if not decision.ok:
                return JSONResponse(
                    status_code=422,
                    content={
                        "code": "budget_exceeded",
                        "message": (
                            f"{strategy.label()} evidence is estimated at "
                            f"{decision.estimated_tokens} tokens, over the "
                            f"budget of {decision.budget}"
                        ),
                        "detail": decision.to_dict(),
                    },
                )
            if request.use_mock:
                explanation = template_explain(bundle, profile, trial_index=trial)
            else:
                explanation = generate_explanation(
                    prompt, config, trial_index=trial,
                    budget_decision=decision, transport=llm_transport,
                )
            report = validation.validate(
                explanation,
                profile,
                k=request.top_k,
                tol_rel=request.tol_rel,
                context=dataset.descriptions,
            )
            record = explanation.to_dict()
            record.update(
                {
                    "dataset_id": dataset.id,
                    "prompt": {
                        "instruction": prompt.instruction,
                        "context": prompt.context,
                        "evidence": prompt.evidence,
                        "task_format": prompt.task_format,
                        "estimated_tokens": prompt.estimated_tokens,
                    },
                    "strategy_seed": strategy.seed,
                    "strategy_fraction": strategy.fraction,
                    "budget": decision.to_dict(),
                    "validation": report.to_dict(),
                }
            )
            ids.append(store.add_explanation(record))

        return ExplanationIdsOut(
            explanation_ids=ids, strategy=request.strategy, trials=request.trials
        )

    @app.get("/explanations/{explanation_id}")
    def get_explanation(explanation_id: str):
        return store.get_explanation(explanation_id)

    @app.get("/selections/{mask_id}/trials/{strategy}/consistency")
    def trials_consistency(mask_id: str, strategy: str):
        records = store.explanations_for(mask_id, strategy)
        if len(records) < 2:
            raise ArityError(
                f"need at least 2 stored {strategy} explanations for this "
                f"selection, found {len(records)}"
            )
        profile = _profile_for(mask_id)
        dataset = store.get_dataset(store.get_mask(mask_id).dataset_id)
        explanations = [
            Explanation(
                raw_text=r["raw_text"],
                model=r["model"],
                strategy=r["strategy"],
                trial_index=r["trial_index"],
                mask_id=r["mask_id"],
            )
            for r in records
        ]
        metrics = validation.trial_consistency(
            explanations, profile, context=dataset.descriptions
        )
        return metrics.to_dict()

    if frontend_dir and Path(frontend_dir).exists():
        app.mount(
            "/ui", StaticFiles(directory=frontend_dir, html=True), name="ui"
        )

    return app
