"""Normalized-cut spectral clustering of the mode graph."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ConfigError, InsufficientModesError
from .typicality import SubClustering

N_INIT = 10
MAX_ITER = 300
TOL = 1e-6


def _kmeans_pp(x, c, rng):
    m = len(x)
    centers = np.empty((c, x.shape[1]))
    centers[0] = x[rng.integers(m)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for t in range(1, c):
        total = d2.sum()
        idx = rng.choice(m, p=d2 / total) if total > 0 else rng.integers(m)
        centers[t] = x[idx]
        d2 = np.minimum(d2, ((x - centers[t]) ** 2).sum(axis=1))
    return centers


def _lloyd(x, centers, max_iter, tol):
    prev = np.inf
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        best = d2[np.arange(len(x)), labels]
        inertia = best.sum()
        counts = np.bincount(labels, minlength=len(centers))
        for j in np.flatnonzero(counts == 0):
            # reseed an empty cluster at the worst-served point
            far = int(best.argmax())
            labels[far] = j
            best[far] = 0.0
        for j in range(len(centers)):
            centers[j] = x[labels == j].mean(axis=0)
        if prev - inertia <= tol * prev:
            break
        prev = inertia
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    return labels, d2[np.arange(len(x)), labels].sum()


def kmeans(x, c, seed, n_init=N_INIT, max_iter=MAX_ITER, tol=TOL):
    """k-means++ with ``n_init`` restarts; returns the lowest-inertia labels.

    Restart r draws from the r-th child of ``SeedSequence(seed)``, so the
    result is reproducible and independent of restart scheduling.
    """
    x = np.asarray(x, dtype=np.float64)
    best_labels, best_inertia = None, np.inf
    for child in np.random.SeedSequence(seed).spawn(n_init):
        rng = np.random.default_rng(child)
        labels, inertia = _lloyd(x, _kmeans_pp(x, c, rng), max_iter, tol)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def _first_appearance(labels):
    _, first = np.unique(labels, return_index=True)
    remap = np.empty(labels.max() + 1, dtype=np.int64)
    remap[labels[np.sort(first)]] = np.arange(len(first))
    return remap[labels]


def normalized_laplacian(w) -> np.ndarray:
    deg = w.sum(axis=1)
    inv = 1.0 / np.sqrt(deg)
    return np.eye(len(w)) - inv[:, None] * w * inv[None, :]


def spectral_embedding(w, c) -> tuple[np.ndarray, np.ndarray]:
    """Row-normalised eigenvectors of the c smallest Laplacian eigenvalues."""
    lap = normalized_laplacian(w)
    vals, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, c - 1])
    norms = np.linalg.norm(vecs, axis=1)
    nz = norms > 0
    vecs[nz] /= norms[nz, None]
    return vals, vecs


def spectral_modes(pbsim, c: int, seed: int = 0) -> np.ndarray:
    """Partition q modes into c groups; returns labels in [0, c).

    Modes with zero similarity to every other mode become singleton clusters
    up front; the rest is embedded with the symmetric normalised Laplacian and
    split by k-means. Labels are numbered in order of first appearance.
    """
    w = np.asarray(pbsim, dtype=np.float64)
    q = w.shape[0]
    if c < 1:
        raise ConfigError(f"cluster count must be >= 1, got {c}")
    if c > q:
        raise InsufficientModesError(q, c)
    if q == c:
        return np.arange(q)
    w = w.copy()
    np.fill_diagonal(w, 0.0)
    isolated = w.sum(axis=1) <= 0
    n_iso = int(isolated.sum())
    rest = np.flatnonzero(~isolated)
    c_rest = c - n_iso
    if c_rest < 1:
        raise InsufficientModesError.too_many_isolated(n_iso, c)
    labels = np.empty(q, dtype=np.int64)
    labels[isolated] = np.arange(n_iso)
    if len(rest) == c_rest:
        labels[rest] = n_iso + np.arange(c_rest)
    else:
        _, emb = spectral_embedding(w[np.ix_(rest, rest)], c_rest)
        labels[rest] = n_iso + kmeans(emb, c_rest, seed)
    return _first_appearance(labels)


def propagate_labels(sc: SubClustering, mode_labels) -> np.ndarray:
    """Give each point the label of its mode (``mode_labels`` aligned with ``sc.modes``)."""
    return np.asarray(mode_labels, dtype=np.int64)[sc.mode_index()]
