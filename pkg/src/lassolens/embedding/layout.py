"""2D layout of the fuzzy graph by negative-sampling SGD.

Initialization is a spectral layout of the graph when it is connected,
seeded-random otherwise. The optimizer replays the standard attractive /
repulsive gradient schedule, with one deviation chosen for speed and
bit-exact reproducibility: all edges due in an epoch are processed as one
vectorized batch against the epoch-start positions, and the accumulated
updates are applied together at the end of the epoch.
"""

from __future__ import annotations

import threading
from typing import Callable

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg

from ..errors import NumericalFailureError

_GRAD_CLIP = 4.0
_NEGATIVE_SAMPLE_RATE = 5
_REPULSION_STRENGTH = 1.0  # gamma
_INITIAL_ALPHA = 1.0


def spectral_init(graph: scipy.sparse.coo_matrix, rng: np.random.Generator) -> np.ndarray:
    """Two non-trivial eigenvectors of the normalized graph Laplacian.

    Computed as the top eigenvectors of I + D^-1/2 A D^-1/2 (same span,
    much faster ARPACK convergence than the smallest of the Laplacian).
    Falls back to seeded-random coordinates when the graph is disconnected
    or the eigensolver fails to converge.
    """
    n = graph.shape[0]
    if n <= 3:
        return random_init(n, rng)
    n_components, _ = scipy.sparse.csgraph.connected_components(graph, directed=False)
    if n_components > 1:
        return random_init(n, rng)

    adjacency = graph.tocsr()
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(np.maximum(degree, 1e-12))
    d_half = scipy.sparse.diags(inv_sqrt)
    normalized = d_half @ adjacency @ d_half
    operator = scipy.sparse.identity(n) + normalized
    try:
        eigenvalues, eigenvectors = scipy.sparse.linalg.eigsh(
            operator,
            k=3,
            which="LM",
            v0=np.ones(n),
            tol=1e-4,
            maxiter=n * 5,
        )
    except scipy.sparse.linalg.ArpackNoConvergence:
        return random_init(n, rng)
    order = np.argsort(eigenvalues)[::-1]
    coords = eigenvectors[:, order[1:3]].astype(np.float64)
    # Small seeded jitter breaks symmetry before scaling to the working box.
    span = np.abs(coords).max()
    if span == 0.0:
        return random_init(n, rng)
    coords = coords * (10.0 / span)
    coords = coords + rng.normal(scale=1e-4, size=coords.shape)
    return _rescale(coords)


def random_init(n: int, rng: np.random.Generator) -> np.ndarray:
    return _rescale(rng.uniform(low=-10.0, high=10.0, size=(n, 2)))


def _rescale(coords: np.ndarray) -> np.ndarray:
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    span[span == 0.0] = 1.0
    return 10.0 * (coords - lo) / span


def make_epochs_per_sample(weights: np.ndarray, n_epochs: int) -> np.ndarray:
    result = -1.0 * np.ones(weights.shape[0])
    n_samples = n_epochs * (weights / weights.max())
    result[n_samples > 0] = float(n_epochs) / n_samples[n_samples > 0]
    return result


def optimize_layout(
    coords: np.ndarray,
    graph: scipy.sparse.coo_matrix,
    n_epochs: int,
    a: float,
    b: float,
    rng: np.random.Generator,
    snapshot_interval: int,
    on_snapshot: Callable[[int, np.ndarray], None] | None = None,
    cancel: threading.Event | None = None,
) -> tuple[np.ndarray, int, bool]:
    """Run the SGD schedule; returns (coords, completed_epochs, finished)."""
    graph = graph.tocoo()
    weights = graph.data.copy()
    # Edges too weak to be sampled even once do not participate.
    cutoff = weights.max() / max(float(n_epochs), 10.0)
    keep = weights >= cutoff
    head = graph.row[keep].astype(np.int64)
    tail = graph.col[keep].astype(np.int64)
    weights = weights[keep]

    n_vertices = coords.shape[0]
    epochs_per_sample = make_epochs_per_sample(weights, n_epochs)
    epochs_per_negative = epochs_per_sample / _NEGATIVE_SAMPLE_RATE
    epoch_of_next_sample = epochs_per_sample.copy()
    epoch_of_next_negative = epochs_per_negative.copy()

    coords = coords.copy()
    completed = 0
    for epoch in range(n_epochs):
        if cancel is not None and cancel.is_set():
            return coords, completed, False
        alpha = _INITIAL_ALPHA * (1.0 - epoch / float(n_epochs))

        due = epoch_of_next_sample <= epoch
        delta = np.zeros_like(coords)
        if due.any():
            h = head[due]
            t = tail[due]
            current = coords[h]
            other = coords[t]
            diff = current - other
            d2 = np.einsum("ij,ij->i", diff, diff)
            with np.errstate(divide="ignore", invalid="ignore"):
                attract = (-2.0 * a * b * d2 ** (b - 1.0)) / (a * d2**b + 1.0)
            attract = np.where(d2 > 0.0, attract, 0.0)
            grad = np.clip(attract[:, None] * diff, -_GRAD_CLIP, _GRAD_CLIP)
            np.add.at(delta, h, grad * alpha)
            np.add.at(delta, t, -grad * alpha)
            epoch_of_next_sample[due] += epochs_per_sample[due]

            n_negative = (
                (epoch - epoch_of_next_negative[due]) / epochs_per_negative[due]
            ).astype(np.int64)
            n_negative = np.maximum(n_negative, 0)
            repeat = np.repeat(np.arange(h.size), n_negative)
            if repeat.size:
                anchors = h[repeat]
                targets = rng.integers(0, n_vertices, size=repeat.size)
                diff_n = coords[anchors] - coords[targets]
                d2n = np.einsum("ij,ij->i", diff_n, diff_n)
                with np.errstate(divide="ignore", invalid="ignore"):
                    repel = (2.0 * _REPULSION_STRENGTH * b) / (
                        (0.001 + d2n) * (a * d2n**b + 1.0)
                    )
                grad_n = np.where(
                    d2n[:, None] > 0.0,
                    np.clip(repel[:, None] * diff_n, -_GRAD_CLIP, _GRAD_CLIP),
                    np.where(anchors[:, None] == targets[:, None], 0.0, _GRAD_CLIP),
                )
                np.add.at(delta, anchors, grad_n * alpha)
            epoch_of_next_negative[due] += n_negative * epochs_per_negative[due]

        coords += delta
        completed = epoch + 1
        if not np.isfinite(coords).all():
            raise NumericalFailureError(
                f"non-finite coordinates at epoch {completed}", epoch=completed
            )
        if on_snapshot is not None and (
            completed % snapshot_interval == 0 or completed == n_epochs
        ):
            on_snapshot(completed, coords.copy())

    return coords, completed, True
