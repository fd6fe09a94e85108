"""Local and global spatial autocorrelation over rasters and point sets.

Local statistic per site i (mean-centered y, per-i denominator excluding
site i itself):

    L_i = (n-1) * (y_i - ybar) / sum_{j != i} (y_j - ybar)^2
                * sum_{j != i} w_ij (y_j - ybar)

The global statistic is exposed both as the literal sum over sites and as
the mean (standard Moran's I under row-standardized weights); the mean is
the headline number since the sum grows with n.
"""

from dataclasses import dataclass

import numpy as np


class SpatialStatsError(ValueError):
    pass


@dataclass
class SpatialWeights:
    neighbors: list        # list of int arrays
    weights: list          # list of float arrays, aligned
    row_standardized: bool = True

    @property
    def n(self):
        return len(self.neighbors)


def _row_standardize(neighbors, raw):
    weights = []
    for w in raw:
        s = w.sum()
        weights.append(w / s if s > 0 else w)
    return weights


def raster_weights(height, width, scheme="queen"):
    """Pixel-adjacency weights, 4-connected (rook) or 8-connected (queen),
    row-standardized."""
    if height < 2 or width < 2:
        raise SpatialStatsError("raster must be at least 2x2")
    if scheme not in ("rook", "queen"):
        raise SpatialStatsError(f"scheme must be rook or queen, got {scheme!r}")
    offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if scheme == "queen":
        offsets += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    neighbors, weights = [], []
    for r in range(height):
        for c in range(width):
            nb = [nr * width + nc
                  for dr, dc in offsets
                  for nr, nc in [(r + dr, c + dc)]
                  if 0 <= nr < height and 0 <= nc < width]
            nb = np.array(sorted(nb), dtype=int)
            neighbors.append(nb)
            weights.append(np.ones(nb.size))
    return SpatialWeights(neighbors, _row_standardize(neighbors, weights))


def knn_weights(points, k=8):
    """k-nearest-neighbour weights (Euclidean), row-standardized.
    Distance ties break by ascending point index."""
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n <= k:
        raise SpatialStatsError(f"need more than k={k} points, got {n}")
    neighbors, weights = [], []
    for i in range(n):
        d = np.hypot(*(pts - pts[i]).T)
        d[i] = np.inf
        order = np.lexsort((np.arange(n), d))  # ties -> lower index first
        nb = np.sort(order[:k])
        neighbors.append(nb.astype(int))
        weights.append(np.ones(k))
    return SpatialWeights(neighbors, _row_standardize(neighbors, weights))


def local_autocorr(field, weights):
    """Per-site local autocorrelation L_i."""
    y = np.asarray(field, dtype=np.float64).ravel()
    if y.size != weights.n:
        raise SpatialStatsError(f"field size {y.size} != weights n {weights.n}")
    n = y.size
    dev = y - y.mean()
    ss = float(dev @ dev)
    if ss <= 0:
        raise SpatialStatsError("zero variance field")
    out = np.empty(n)
    for i in range(n):
        denom = ss - dev[i] * dev[i]
        if denom <= 0:
            raise SpatialStatsError("zero variance field (excluding site)")
        lag = float(weights.weights[i] @ dev[weights.neighbors[i]])
        out[i] = (n - 1) * dev[i] / denom * lag
    return out


def global_autocorr(field, weights):
    """Returns (L_mean, L_sum): mean is the headline Moran's-I-style value,
    sum is the literal aggregate of the local statistics."""
    li = local_autocorr(field, weights)
    return float(li.mean()), float(li.sum())
