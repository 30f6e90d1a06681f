"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ColumnInfo(BaseModel):
    name: str
    kind: str


class DatasetOut(BaseModel):
    dataset_id: str
    name: str
    row_count: int
    columns: list[ColumnInfo]
    label: str | None = None
    domain_description: str = ""


class EmbeddingRequest(BaseModel):
    n_neighbors: int = 50
    min_dist: float = 0.6
    spread: float = 2.0
    seed: int = 42
    n_epochs: int = 500
    snapshot_interval: int = 25
    mode: str = "strict"


class EmbeddingJobOut(BaseModel):
    job_id: str
    status: str  # running | complete | failed
    epoch: int = 0
    n_epochs: int
    complete: bool = False
    coords: list[list[float]] | None = None
    error: str | None = None


class PredicateIn(BaseModel):
    column: str
    value: str


class SelectionRequest(BaseModel):
    polygon: list[list[float]] | None = None
    job_id: str | None = None  # embedding the polygon coordinates refer to
    predicate: PredicateIn | None = None


class SelectionOut(BaseModel):
    mask_id: str
    dataset_id: str
    selected_count: int
    rest_count: int
    selected: list[bool]
    source: dict


class ExplanationRequest(BaseModel):
    strategy: str = Field(pattern="^S[123]$")
    trials: int = Field(default=1, ge=1, le=25)
    use_mock: bool = False
    fraction: float = 0.20
    seed: int = 0
    budget: int | None = None
    top_k: int = 5
    tol_rel: float = 0.02


class ExplanationIdsOut(BaseModel):
    explanation_ids: list[str]
    strategy: str
    trials: int


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: dict = Field(default_factory=dict)
