"""Background embedding jobs: one worker per (dataset, params), snapshots
published to any number of pollers, results cached through the store."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from ..embedding import Embedding, EmbeddingParams, EmbeddingSnapshot, compute_embedding
from ..errors import NotFoundError
from ..ingestion import Dataset
from ..store import SessionStore

RUNNING = "running"
COMPLETE = "complete"
FAILED = "failed"


@dataclass
class EmbeddingJob:
    job_id: str
    dataset_id: str
    params: EmbeddingParams
    status: str = RUNNING
    epoch: int = 0
    coords: np.ndarray | None = None
    error: str | None = None
    embedding: Embedding | None = None
    cancel: threading.Event = field(default_factory=threading.Event)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> dict:
        with self.lock:
            return {
                "job_id": self.job_id,
                "status": self.status,
                "epoch": self.epoch,
                "n_epochs": self.params.n_epochs,
                "complete": self.status == COMPLETE,
                "coords": None if self.coords is None else self.coords.tolist(),
                "error": self.error,
            }


class EmbeddingJobManager:
    def __init__(self, store: SessionStore):
        self.store = store
        self._jobs: dict[str, EmbeddingJob] = {}
        self._lock = threading.Lock()

    @staticmethod
    def job_id(dataset_id: str, params: EmbeddingParams) -> str:
        return f"{dataset_id}-{params.cache_key()}"

    def start(self, dataset: Dataset, params: EmbeddingParams) -> EmbeddingJob:
        """Start (or attach to) the job for this (dataset, params) key."""
        params.validate(dataset.row_count)
        job_id = self.job_id(dataset.id, params)
        with self._lock:
            existing = self._jobs.get(job_id)
            if existing is not None and existing.status != FAILED:
                return existing

            job = EmbeddingJob(job_id=job_id, dataset_id=dataset.id, params=params)
            cached = self.store.load_embedding(dataset.id, params)
            if cached is not None:
                job.status = COMPLETE
                job.epoch = cached.epoch
                job.coords = cached.coords
                job.embedding = cached
                self._jobs[job_id] = job
                return job

            self._jobs[job_id] = job

        worker = threading.Thread(
            target=self._run, args=(dataset, job), daemon=True
        )
        worker.start()
        return job

    def _run(self, dataset: Dataset, job: EmbeddingJob) -> None:
        def sink(snapshot: EmbeddingSnapshot) -> None:
            with job.lock:
                job.epoch = snapshot.epoch
                job.coords = snapshot.coords

        try:
            embedding = compute_embedding(
                dataset, job.params, progress_sink=sink, cancel=job.cancel
            )
        except Exception as exc:  # surfaced to pollers, not raised in-thread
            with job.lock:
                job.status = FAILED
                job.error = f"{type(exc).__name__}: {exc}"
            return

        if embedding.complete:
            self.store.save_embedding(embedding)
        with job.lock:
            job.status = COMPLETE if embedding.complete else FAILED
            job.epoch = embedding.epoch
            job.coords = embedding.coords
            job.embedding = embedding
            if not embedding.complete:
                job.error = "cancelled before completion"

    def get(self, job_id: str) -> EmbeddingJob:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"unknown embedding job {job_id!r}")
            return self._jobs[job_id]

    def completed_embedding(self, job_id: str) -> Embedding:
        job = self.get(job_id)
        with job.lock:
            if job.status != COMPLETE or job.embedding is None:
                raise NotFoundError(
                    f"embedding job {job_id!r} is not complete (status {job.status})"
                )
            return job.embedding
