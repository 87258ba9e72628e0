"""Path-based (minimax) similarity between sub-clusters.

Points of one sub-cluster are contracted into a single vertex, so only edges
that cross sub-cluster boundaries take part. Edges are added in descending
connectivity; the edge that first joins two components sets the similarity of
every mode pair it connects.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph import SimilarityGraph
from .typicality import SubClustering


class CrossEdge(NamedTuple):
    c: float
    point_i: int
    point_j: int
    mode_i: int
    mode_j: int


@dataclass(frozen=True)
class CrossEdges:
    """Column-wise store of the edges between distinct sub-clusters."""

    c: np.ndarray
    point_i: np.ndarray
    point_j: np.ndarray
    mode_i: np.ndarray
    mode_j: np.ndarray

    def __len__(self):
        return len(self.c)

    def __iter__(self):
        for row in zip(self.c.tolist(), self.point_i.tolist(), self.point_j.tolist(),
                       self.mode_i.tolist(), self.mode_j.tolist()):
            yield CrossEdge(*row)

    @classmethod
    def from_list(cls, edges) -> "CrossEdges":
        edges = list(edges)
        cols = list(zip(*edges)) if edges else [(), (), (), (), ()]
        return cls(
            c=np.asarray(cols[0], dtype=np.float64),
            point_i=np.asarray(cols[1], dtype=np.int64),
            point_j=np.asarray(cols[2], dtype=np.int64),
            mode_i=np.asarray(cols[3], dtype=np.int64),
            mode_j=np.asarray(cols[4], dtype=np.int64),
        )


def cross_edges(sim: SimilarityGraph, rho, sc: SubClustering) -> CrossEdges:
    """One edge per stored similarity pair whose endpoints sit in different sub-clusters.

    Connectivity is ``A_ij * rho_i * rho_j``. Same-sub-cluster pairs are
    excluded by membership, never by comparing a weight against 1.
    """
    rho = np.asarray(rho, dtype=np.float64)
    i = sim.row_ids()
    j = sim.indices
    mi = sc.assignment[i]
    mj = sc.assignment[j]
    keep = (i < j) & (mi != mj)
    i, j, a, mi, mj = i[keep], j[keep], sim.data[keep], mi[keep], mj[keep]
    return CrossEdges(c=a * rho[i] * rho[j], point_i=i, point_j=j, mode_i=mi, mode_j=mj)


def _mode_positions(modes, ids):
    if len(ids) == 0:
        return np.zeros(0, dtype=np.int64)
    lo, hi = int(ids.min()), int(ids.max())
    if lo < 0 or hi > modes[-1]:
        raise ValueError("edge refers to a mode outside the mode set")
    # dense lookup over ids; cheaper than a binary search for millions of edges
    lut = np.full(hi + 1, -1, dtype=np.int64)
    inside = modes[modes <= hi]
    lut[inside] = np.arange(len(inside))
    pos = lut[ids]
    if np.any(pos < 0):
        raise ValueError("edge refers to a mode outside the mode set")
    return pos


def pbsim(edges, modes) -> np.ndarray:
    """Max-min path similarity among ``modes`` (sorted ascending in the output).

    Returns a symmetric q x q matrix with zero diagonal; mode pairs that never
    become connected stay 0.
    """
    if not isinstance(edges, CrossEdges):
        edges = CrossEdges.from_list(edges)
    modes = np.unique(np.asarray(modes, dtype=np.int64))
    q = len(modes)
    out = np.zeros((q, q))
    if q < 2 or len(edges) == 0:
        return out
    a = _mode_positions(modes, edges.mode_i)
    b = _mode_positions(modes, edges.mode_j)
    pi = np.minimum(edges.point_i, edges.point_j)
    pj = np.maximum(edges.point_i, edges.point_j)
    c = edges.c
    # Only the strongest edge between two modes can be the first to join
    # them, so reduce to one edge per mode pair before the sequential sweep.
    key = np.minimum(a, b) * q + np.maximum(a, b)
    by_key = np.argsort(key, kind="stable")
    starts = np.flatnonzero(np.r_[True, key[by_key][1:] != key[by_key][:-1]])
    best = np.maximum.reduceat(c[by_key], starts)
    group_best = np.repeat(best, np.diff(np.r_[starts, len(by_key)]))
    top = by_key[c[by_key] == group_best]
    order = top[np.lexsort((pj[top], pi[top], -c[top], key[top]))]
    _, first = np.unique(key[order], return_index=True)
    keep = order[first]
    keep = keep[np.lexsort((pj[keep], pi[keep], -c[keep]))]

    parent = list(range(q))
    members = [[m] for m in range(q)]

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    merges = 0
    for e in keep.tolist():
        ra, rb = find(int(a[e])), find(int(b[e]))
        if ra == rb:
            continue
        left, right = members[ra], members[rb]
        out[np.ix_(left, right)] = c[e]
        out[np.ix_(right, left)] = c[e]
        if len(left) < len(right):
            ra, rb = rb, ra
        parent[rb] = ra
        members[ra].extend(members[rb])
        members[rb] = []
        merges += 1
        if merges == q - 1:
            break
    return out


def dump_pbsim(path, matrix, modes) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode"] + [int(m) for m in modes])
        for m, row in zip(modes, matrix):
            w.writerow([int(m)] + [repr(float(v)) for v in row])
