"""Deterministic 2D projection of a dataset with progressive snapshots.

Pipeline: encode features -> exact kNN graph -> fuzzy membership graph ->
curve parameters from (min_dist, spread) -> negative-sampling SGD layout.
Given the same dataset content and parameters the final coordinates are
bit-identical across runs; all randomness flows from one seeded generator.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..errors import ParameterError
from ..ingestion import Dataset
from .encode import EncodedFeatures, encode_features
from .fuzzy import find_curve_params, fuzzy_graph
from .knn import NeighborGraph, build_knn_graph
from .layout import optimize_layout, spectral_init

__all__ = [
    "EmbeddingParams",
    "Embedding",
    "EmbeddingSnapshot",
    "compute_embedding",
    "encode_features",
    "EncodedFeatures",
    "build_knn_graph",
    "NeighborGraph",
]

STRICT = "strict"
FAST = "fast"


@dataclass(frozen=True)
class EmbeddingParams:
    n_neighbors: int = 50
    min_dist: float = 0.6
    spread: float = 2.0
    seed: int = 42
    n_epochs: int = 500
    snapshot_interval: int = 25
    mode: str = STRICT  # "fast" relaxes the cross-run bit-exactness guarantee

    def validate(self, row_count: int) -> None:
        if self.n_neighbors < 1:
            raise ParameterError(f"n_neighbors must be >= 1, got {self.n_neighbors}")
        if self.n_neighbors >= row_count:
            raise ParameterError(
                f"n_neighbors={self.n_neighbors} must be smaller than "
                f"row count {row_count}"
            )
        if self.min_dist < 0:
            raise ParameterError(f"min_dist must be >= 0, got {self.min_dist}")
        if self.spread <= 0:
            raise ParameterError(f"spread must be > 0, got {self.spread}")
        if self.min_dist > self.spread:
            raise ParameterError(
                f"min_dist={self.min_dist} must not exceed spread={self.spread}"
            )
        if self.n_epochs < 1:
            raise ParameterError(f"n_epochs must be >= 1, got {self.n_epochs}")
        if self.snapshot_interval < 1:
            raise ParameterError(
                f"snapshot_interval must be >= 1, got {self.snapshot_interval}"
            )
        if self.mode not in (STRICT, FAST):
            raise ParameterError(f"mode must be 'strict' or 'fast', got {self.mode!r}")

    def cache_key(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class EmbeddingSnapshot:
    epoch: int
    coords: np.ndarray


@dataclass
class Embedding:
    dataset_id: str
    params: EmbeddingParams
    coords: np.ndarray  # (row_count, 2)
    epoch: int
    complete: bool
    encoded_labels: list[str] = field(default_factory=list)


def compute_embedding(
    dataset: Dataset,
    params: EmbeddingParams,
    progress_sink: Callable[[EmbeddingSnapshot], None] | None = None,
    cancel: threading.Event | None = None,
) -> Embedding:
    params.validate(dataset.row_count)
    rng = np.random.Generator(np.random.PCG64(params.seed))

    encoded = encode_features(dataset)
    neighbors = build_knn_graph(encoded.matrix, params.n_neighbors)
    graph = fuzzy_graph(neighbors.indices, neighbors.distances, params.n_neighbors)
    a, b = find_curve_params(params.spread, params.min_dist)

    init = spectral_init(graph, rng)

    def on_snapshot(epoch: int, coords: np.ndarray) -> None:
        if progress_sink is not None:
            progress_sink(EmbeddingSnapshot(epoch=epoch, coords=coords))

    coords, completed, finished = optimize_layout(
        init,
        graph,
        params.n_epochs,
        a,
        b,
        rng,
        snapshot_interval=params.snapshot_interval,
        on_snapshot=on_snapshot,
        cancel=cancel,
    )
    return Embedding(
        dataset_id=dataset.id,
        params=params,
        coords=coords,
        epoch=completed,
        complete=finished,
        encoded_labels=encoded.labels,
    )


def coords_to_csv(embedding: Embedding) -> str:
    """row_index,x,y export for offline inspection."""
    lines = ["row_index,x,y"]
    for i, (x, y) in enumerate(embedding.coords):
        lines.append(f"{i},{x!r},{y!r}")
    return "\n".join(lines) + "\n"
