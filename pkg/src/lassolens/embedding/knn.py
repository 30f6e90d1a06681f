"""Exact k-nearest-neighbour search.

The sort key is the squared Euclidean distance computed directly from
coordinate differences (sum over dimensions of (x_i - y_i)^2), with ties
broken by ascending row index so duplicate points resolve reproducibly.

Small inputs use blocked exact distance matrices. Large inputs prune with a
BLAS inner-product pass first, then rescore a generous candidate margin with
the exact difference formula, so the returned neighbours and distances are
the same as the exact path produces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

_EXACT_LIMIT = 2048  # rows; above this the candidate prefilter kicks in
_CANDIDATE_MARGIN = 256
_BLOCK_BUDGET = 16_000_000  # floats per difference block


@dataclass
class NeighborGraph:
    indices: np.ndarray  # (n, k) int64, sorted by (distance, index)
    distances: np.ndarray  # (n, k) float64 Euclidean distances


def _exact_block(block: np.ndarray, features: np.ndarray) -> np.ndarray:
    diff = block[:, None, :] - features[None, :, :]
    return (diff * diff).sum(axis=2)


def build_knn_graph(features: np.ndarray, n_neighbors: int) -> NeighborGraph:
    features = np.ascontiguousarray(features, dtype=np.float64)
    n, dim = features.shape
    if n_neighbors < 1:
        raise ParameterError(f"n_neighbors must be >= 1, got {n_neighbors}")
    if n_neighbors >= n:
        raise ParameterError(
            f"n_neighbors={n_neighbors} must be smaller than row count {n}"
        )

    indices = np.empty((n, n_neighbors), dtype=np.int64)
    distances = np.empty((n, n_neighbors), dtype=np.float64)

    if n <= _EXACT_LIMIT:
        block = max(1, _BLOCK_BUDGET // (n * dim))
        col_index = np.arange(n)
        for start in range(0, n, block):
            stop = min(start + block, n)
            d2 = _exact_block(features[start:stop], features)
            d2[np.arange(stop - start), np.arange(start, stop)] = np.inf
            keys_index = np.broadcast_to(col_index, d2.shape)
            order = np.lexsort((keys_index, d2), axis=-1)[:, :n_neighbors]
            indices[start:stop] = order
            distances[start:stop] = np.sqrt(np.take_along_axis(d2, order, axis=1))
        return NeighborGraph(indices=indices, distances=distances)

    n_candidates = min(n - 1, n_neighbors + _CANDIDATE_MARGIN)
    sq_norms = np.einsum("ij,ij->i", features, features)
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        rows = features[start:stop]
        approx = sq_norms[start:stop, None] + sq_norms[None, :] - 2.0 * rows @ features.T
        approx[np.arange(stop - start), np.arange(start, stop)] = np.inf
        candidates = np.argpartition(approx, n_candidates - 1, axis=1)[
            :, :n_candidates
        ]
        diff = rows[:, None, :] - features[candidates]
        d2 = (diff * diff).sum(axis=2)
        order = np.lexsort((candidates, d2), axis=-1)[:, :n_neighbors]
        indices[start:stop] = np.take_along_axis(candidates, order, axis=1)
        distances[start:stop] = np.sqrt(np.take_along_axis(d2, order, axis=1))

    return NeighborGraph(indices=indices, distances=distances)
