"""Fuzzy neighbourhood graph construction and the low-dimensional curve fit.

Follows the standard UMAP construction: per-point bandwidths are found by
binary search so each fuzzy neighbourhood has effective size log2(k), local
membership strengths are exponential in the distance beyond the nearest
neighbour, and the directed graph is symmetrized with the probabilistic
t-conorm A + A' - A o A'. Neighbour lists here exclude the point itself.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse
from scipy.optimize import curve_fit

SMOOTH_K_TOLERANCE = 1e-5
MIN_K_DIST_SCALE = 1e-3
_N_SEARCH_ITER = 64


def smooth_knn_dist(
    distances: np.ndarray, k: float, local_connectivity: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (sigma, rho): bandwidth and nearest-neighbour offset.

    distances must be sorted ascending per row. The binary search runs
    vectorized over all rows at once.
    """
    n, _ = distances.shape
    target = np.log2(k)

    rho = np.zeros(n)
    index = int(np.floor(local_connectivity))
    interpolation = local_connectivity - index
    for i in range(n):
        non_zero = distances[i][distances[i] > 0.0]
        if non_zero.size >= local_connectivity:
            if index > 0:
                rho[i] = non_zero[index - 1]
                if interpolation > SMOOTH_K_TOLERANCE and non_zero.size > index:
                    rho[i] += interpolation * (non_zero[index] - non_zero[index - 1])
            else:
                rho[i] = interpolation * non_zero[0]
        elif non_zero.size > 0:
            rho[i] = non_zero.max()

    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    done = np.zeros(n, dtype=bool)

    gaps = distances - rho[:, None]
    for _ in range(_N_SEARCH_ITER):
        scaled = np.where(gaps > 0, gaps, 0.0) / mid[:, None]
        psum = np.where(gaps > 0, np.exp(-scaled), 1.0).sum(axis=1)
        done |= np.abs(psum - target) < SMOOTH_K_TOLERANCE
        if done.all():
            break
        above = (psum > target) & ~done
        hi = np.where(above, mid, hi)
        lo = np.where(~above & ~done, mid, lo)
        bisect = (lo + hi) / 2.0
        grow = np.isinf(hi)
        mid = np.where(done, mid, np.where(~above & grow, mid * 2.0, bisect))

    sigma = mid
    mean_all = distances.mean()
    mean_rows = distances.mean(axis=1)
    floor = np.where(rho > 0.0, MIN_K_DIST_SCALE * mean_rows, MIN_K_DIST_SCALE * mean_all)
    return np.maximum(sigma, floor), rho


def membership_strengths(
    knn_indices: np.ndarray,
    knn_dists: np.ndarray,
    sigmas: np.ndarray,
    rhos: np.ndarray,
) -> scipy.sparse.coo_matrix:
    n, k = knn_indices.shape
    gaps = knn_dists - rhos[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.exp(-gaps / sigmas[:, None])
    vals = np.where((gaps <= 0.0) | (sigmas[:, None] == 0.0), 1.0, vals)
    rows = np.repeat(np.arange(n), k)
    graph = scipy.sparse.coo_matrix(
        (vals.ravel(), (rows, knn_indices.ravel())), shape=(n, n)
    )
    graph.eliminate_zeros()
    return graph


def fuzzy_graph(
    knn_indices: np.ndarray, knn_dists: np.ndarray, n_neighbors: int
) -> scipy.sparse.coo_matrix:
    """Symmetrized fuzzy membership graph from a kNN structure."""
    sigmas, rhos = smooth_knn_dist(knn_dists, float(n_neighbors))
    directed = membership_strengths(knn_indices, knn_dists, sigmas, rhos).tocsr()
    transpose = directed.T
    product = directed.multiply(transpose)
    combined = directed + transpose - product
    combined = combined.tocoo()
    combined.eliminate_zeros()
    return combined


def find_curve_params(spread: float, min_dist: float) -> tuple[float, float]:
    """Fit (a, b) of 1/(1 + a d^(2b)) to the offset exponential decay shape."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0, spread * 3, 300)
    yv = np.zeros(xv.shape)
    yv[xv < min_dist] = 1.0
    yv[xv >= min_dist] = np.exp(-(xv[xv >= min_dist] - min_dist) / spread)
    params, _ = curve_fit(curve, xv, yv)
    return float(params[0]), float(params[1])
