"""Data preprocessing and exact k-nearest-neighbour search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError, DataError

# Spare KD-tree candidates per row beyond k+1; rows whose k-th neighbour is
# still not certified (boundary ties) are redone with a radius query.
_EXTRA_CANDIDATES = 8
# Below this size an all-pairs scan is cheaper than building a tree.
_BRUTE_FORCE_MAX_N = 2048


@dataclass(frozen=True)
class KnnGraph:
    """Exact kNN lists, self excluded.

    ``neighbors[i]`` holds the ids of the k nearest points to ``i`` ordered by
    ascending (distance, id); ``distances[i]`` the matching Euclidean distances.
    """

    k: int
    neighbors: np.ndarray
    distances: np.ndarray
    d_max: float

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]


def check_finite(data) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError(f"expected a nonempty 2-d data matrix, got shape {x.shape}")
    bad = np.argwhere(~np.isfinite(x))
    if len(bad):
        r, c = bad[0]
        raise DataError(f"non-finite value {x[r, c]!r} at row {r}, column {c}")
    return x


def normalize_minmax(data) -> np.ndarray:
    """Rescale every column to [0, 1]; zero-range columns become all zeros."""
    x = check_finite(data)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = np.zeros_like(x)
    ok = span > 0
    out[:, ok] = (x[:, ok] - lo[ok]) / span[ok]
    return out


def _pair_distances(x, i, cand):
    # canonical formula shared by every code path so ties compare bit-exactly
    diff = x[cand] - x[i]
    return np.sqrt((diff * diff).sum(axis=-1))


def _select(ids, dists, k):
    order = np.lexsort((ids, dists))[:k]
    return ids[order], dists[order]


def _brute_row(x, i, k):
    n = x.shape[0]
    ids = np.delete(np.arange(n), i)
    return _select(ids, _pair_distances(x, i, ids), k)


def _brute_force(x, k):
    n = x.shape[0]
    nbrs = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        nbrs[i], dists[i] = _brute_row(x, i, k)
    return nbrs, dists


def _kdtree(x, k, workers):
    n = x.shape[0]
    m = min(n, k + 1 + _EXTRA_CANDIDATES)
    tree = cKDTree(x)
    tree_d, tree_ids = tree.query(x, k=m, workers=workers)
    tree_d = tree_d.reshape(n, m)
    tree_ids = tree_ids.reshape(n, m)
    diff = x[tree_ids] - x[:, None, :]
    d = np.sqrt((diff * diff).sum(axis=-1))
    is_self = tree_ids == np.arange(n)[:, None]
    d[is_self] = np.inf
    order = np.lexsort((tree_ids, d), axis=-1)[:, :k]
    nbrs = np.take_along_axis(tree_ids, order, axis=1).astype(np.int64)
    dists = np.take_along_axis(d, order, axis=1)
    # Unretrieved points lie at tree distance >= the last retrieved one; keep
    # a row only when its k-th distance is strictly below that bound.
    if m < n:
        redo = np.flatnonzero(~(dists[:, -1] < tree_d[:, -1] * (1.0 - 1e-9)))
        if len(redo):
            radii = dists[redo, -1] * (1.0 + 1e-9) + 1e-300
            balls = tree.query_ball_point(x[redo], radii, workers=workers)
            for i, ball in zip(redo, balls):
                cand = np.asarray(ball, dtype=np.int64)
                cand = cand[cand != i]
                nbrs[i], dists[i] = _select(cand, _pair_distances(x, i, cand), k)
    return nbrs, dists


def build_knn(data, k: int, workers: int = 1) -> KnnGraph:
    """Exact Euclidean kNN, self excluded, ties broken by ascending id."""
    x = check_finite(data)
    n = x.shape[0]
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= n - 1):
        raise ConfigError(f"k must satisfy 1 <= k <= n-1 = {n - 1}, got {k}")
    if n <= _BRUTE_FORCE_MAX_N:
        nbrs, dists = _brute_force(x, int(k))
    else:
        nbrs, dists = _kdtree(x, int(k), workers)
    return KnnGraph(k=int(k), neighbors=nbrs, distances=dists, d_max=float(dists[:, -1].max()))


def read_csv(path, header: bool = False, label_col: int | None = None, delimiter: str | None = None):
    """Load a comma- or whitespace-delimited numeric table.

    Returns ``(features, labels)``; ``labels`` is None unless ``label_col`` is
    given (negative indices count from the end).
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 1 if header else 0
    width = None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        sep = delimiter if delimiter is not None else ("," if "," in line else None)
        fields = [f.strip() for f in line.split(sep)]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise DataError(f"{path}:{lineno}: expected {width} fields, found {len(fields)}")
        rows.append((lineno, fields))
    if not rows:
        raise DataError(f"{path}: no data rows")

    if label_col is not None:
        col = label_col if label_col >= 0 else width + label_col
        if not 0 <= col < width:
            raise ConfigError(f"label column {label_col} out of range for {width} columns")
    else:
        col = None

    feats = np.empty((len(rows), width - (col is not None)), dtype=np.float64)
    labels = [] if col is not None else None
    for r, (lineno, fields) in enumerate(rows):
        vals = []
        for c, f in enumerate(fields):
            if c == col:
                labels.append(f)
                continue
            try:
                vals.append(float(f))
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {c + 1}: cannot parse {f!r} as a number") from None
        feats[r] = vals
    bad = np.argwhere(~np.isfinite(feats))
    if len(bad):
        r, c = bad[0]
        raise DataError(f"{path}:{rows[r][0]}: non-finite feature value in feature column {c}")
    if labels is not None:
        labels = encode_labels(labels)
    return feats, labels


def encode_labels(raw) -> np.ndarray:
    """Map arbitrary label tokens to 0..m-1 in order of first appearance."""
    codes = {}
    return np.array([codes.setdefault(v, len(codes)) for v in raw], dtype=np.int64)
