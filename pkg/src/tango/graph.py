"""Shared-nearest-neighbour similarity graph, density and the leader forest."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from .errors import DataError
from .knn import KnnGraph

# the bundled TBB is often too old for numba and warns on every import
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@dataclass(frozen=True)
class SimilarityGraph:
    """Symmetric sparse similarity matrix in CSR layout.

    Each row lists the nonzero similarities of one point, sorted by descending
    value with ties by ascending column id. Zero similarities are never stored
    and the diagonal is absent.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.data)

    def row(self, i):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.degree())

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def pairs(self):
        """Upper-triangle entries ``(i, j, value)`` with i < j, in row-major storage order."""
        rows = self.row_ids()
        keep = rows < self.indices
        return rows[keep], self.indices[keep], self.data[keep]

    def dump(self, path) -> None:
        i, j, v = self.pairs()
        order = np.lexsort((j, i))
        i, j, v = i[order], j[order], v[order]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "value"])
            for a, b, c in zip(i.tolist(), j.tolist(), v.tolist()):
                w.writerow([a, b, repr(c)])

    @classmethod
    def from_pairs(cls, n, i, j, v) -> "SimilarityGraph":
        """Build from unordered pairs; zero values and self pairs are dropped."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        v = np.asarray(v, dtype=np.float64)
        keep = (v != 0) & (i != j)
        lo = np.minimum(i[keep], j[keep])
        hi = np.maximum(i[keep], j[keep])
        v = v[keep]
        key = lo * n + hi
        if np.any(key[1:] < key[:-1]):
            order = np.argsort(key, kind="stable")
            lo, hi, v = lo[order], hi[order], v[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n), out=indptr[1:])
        indices, data = _fill_rows(indptr, lo, hi, v)
        return cls(n=n, indptr=indptr, indices=indices, data=data)


@numba.njit(cache=True)
def _scatter(indptr, lo, hi, v, indices, data):
    # pairs arrive sorted by (lo, hi), so every row is filled in ascending column order
    fill = indptr[:-1].copy()
    for t in range(len(lo)):
        a = lo[t]
        b = hi[t]
        indices[fill[a]] = b
        data[fill[a]] = v[t]
        fill[a] += 1
        indices[fill[b]] = a
        data[fill[b]] = v[t]
        fill[b] += 1


@numba.njit(parallel=True, cache=True)
def _sort_rows(indptr, indices, data):
    for r in numba.prange(len(indptr) - 1):
        s = indptr[r]
        e = indptr[r + 1]
        # stable on the column-ascending fill: descending value, ties by id
        perm = np.argsort(-data[s:e], kind="mergesort")
        indices[s:e] = indices[s:e][perm]
        data[s:e] = data[s:e][perm]


def _fill_rows(indptr, lo, hi, v):
    indices = np.empty(indptr[-1], dtype=np.int64)
    data = np.empty(indptr[-1], dtype=np.float64)
    _scatter(indptr, lo, hi, v, indices, data)
    _sort_rows(indptr, indices, data)
    return indices, data


@numba.njit(parallel=True, cache=True)
def _shared_neighbor_sums(lo, hi, ids, dists, scale):
    out = np.zeros(len(lo))
    k = ids.shape[1]
    for t in numba.prange(len(lo)):
        a = lo[t]
        b = hi[t]
        s = 0.0
        x = 0
        y = 0
        # merge of the two id-sorted neighbour lists
        while x < k and y < k:
            pa = ids[a, x]
            pb = ids[b, y]
            if pa == pb:
                z = (dists[a, x] + dists[b, y]) / scale
                s += np.exp(-z * z)
                x += 1
                y += 1
            elif pa < pb:
                x += 1
            else:
                y += 1
        out[t] = s
    return out


def candidate_pairs(knn: KnnGraph):
    """Unordered pairs (i < j) with i in N_k(j) or j in N_k(i), sorted."""
    n, k = knn.neighbors.shape
    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = knn.neighbors.ravel()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    keys = np.unique(lo * n + hi)
    return keys // n, keys % n


def snn_similarity(knn: KnnGraph, workers: int | None = None) -> SimilarityGraph:
    """Kernel-weighted shared-nearest-neighbour similarity.

    For every pair joined by a kNN edge, each shared neighbour p adds
    ``exp(-((d(p, i) + d(p, j)) / (2 d_max))**2)``. The result does not depend
    on ``workers``: every pair is summed independently in ascending p order.
    """
    if not knn.d_max > 0:
        raise DataError("all k-neighbourhoods are degenerate (d_max = 0); data has too many duplicate points")
    order = np.argsort(knn.neighbors, axis=1, kind="stable")
    ids = np.ascontiguousarray(np.take_along_axis(knn.neighbors, order, axis=1))
    dists = np.ascontiguousarray(np.take_along_axis(knn.distances, order, axis=1))
    lo, hi = candidate_pairs(knn)
    prev = numba.get_num_threads()
    if workers is not None:
        numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))
    try:
        vals = _shared_neighbor_sums(lo, hi, ids, dists, 2.0 * knn.d_max)
    finally:
        numba.set_num_threads(prev)
    return SimilarityGraph.from_pairs(knn.n, lo, hi, vals)


def density(sim: SimilarityGraph, k: int) -> np.ndarray:
    """Normalised sum of each point's k largest similarities.

    Points with fewer than k nonzero similarities sum what they have. The
    maximum is exactly 1 unless every sum is zero, in which case all are 0.
    """
    if sim.n == 0:
        raise DataError("empty similarity graph")
    pos = np.arange(sim.nnz) - np.repeat(sim.indptr[:-1], sim.degree())
    top = pos < k
    raw = np.bincount(sim.row_ids()[top], weights=sim.data[top], minlength=sim.n)
    peak = raw.max()
    if peak <= 0:
        return np.zeros(sim.n)
    return raw / peak


def density_order(rho) -> np.ndarray:
    """Position of every point in the strict ascending (rho, id) order."""
    rho = np.asarray(rho)
    perm = np.lexsort((np.arange(len(rho)), rho))
    pos = np.empty(len(rho), dtype=np.int64)
    pos[perm] = np.arange(len(rho))
    return pos


@dataclass(frozen=True)
class DependencyForest:
    """Leader pointers with rank and dependency weight.

    Roots carry ``leader == -1``, ``rank == 0`` and ``weight == 0.0``.
    ``max_rank`` is 0 only when the forest has no edges.
    """

    leader: np.ndarray
    rank: np.ndarray
    weight: np.ndarray
    max_rank: int

    @property
    def n(self) -> int:
        return len(self.leader)

    @property
    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.leader < 0)

    @classmethod
    def from_leaders(cls, leader, rank) -> "DependencyForest":
        leader = np.asarray(leader, dtype=np.int64)
        rank = np.where(leader >= 0, np.asarray(rank, dtype=np.int64), 0)
        max_rank = int(rank.max()) if len(rank) and (leader >= 0).any() else 0
        weight = np.zeros(len(leader))
        has = leader >= 0
        weight[has] = np.exp(-((rank[has] / max_rank) ** 2))
        return cls(leader=leader, rank=rank, weight=weight, max_rank=max_rank)

    def dump(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["point", "leader", "rank", "weight"])
            for i in range(self.n):
                if self.leader[i] < 0:
                    w.writerow([i, "", "", ""])
                else:
                    w.writerow([i, int(self.leader[i]), int(self.rank[i]), repr(float(self.weight[i]))])


def build_forest(sim: SimilarityGraph, rho) -> DependencyForest:
    """Link every point to its most similar strictly-higher-density neighbour.

    Density ties are resolved by the (rho, id) total order. The rank is the
    1-based position of the leader in the point's similarity-sorted row, which
    is exactly the first row entry that outranks the point.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if len(rho) != sim.n:
        raise DataError(f"density has {len(rho)} entries for {sim.n} points")
    pos = density_order(rho)
    rows = sim.row_ids()
    higher = np.flatnonzero(pos[sim.indices] > pos[rows])
    has_leader, first = np.unique(rows[higher], return_index=True)
    entry = higher[first]
    leader = np.full(sim.n, -1, dtype=np.int64)
    rank = np.zeros(sim.n, dtype=np.int64)
    leader[has_leader] = sim.indices[entry]
    rank[has_leader] = entry - sim.indptr[has_leader] + 1
    return DependencyForest.from_leaders(leader, rank)
