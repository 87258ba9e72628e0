"""Typicality of points over the leader forest and typicality-aware mode-seeking."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg

from .errors import InvariantError
from .graph import DependencyForest, density_order


@numba.njit(cache=True)
def _accumulate(order, leader, weight, t):
    # leaves first: when i passes its mass upward, t[i] is already final
    for i in order:
        j = leader[i]
        if j >= 0:
            t[j] += t[i] * weight[i]


def _check_forest(forest: DependencyForest, pos) -> None:
    has = forest.leader >= 0
    if np.any(pos[forest.leader[has]] <= pos[has]):
        bad = np.flatnonzero(has)[pos[forest.leader[has]] <= pos[has]][0]
        raise InvariantError(
            f"leader of point {bad} does not outrank it in density order; dependency graph is not a forest"
        )


def solve_typicality(forest: DependencyForest, rho) -> np.ndarray:
    """Solve ``T = B^T T + rho`` in linear time after one sort.

    Points are visited in ascending (rho, id) order and each one adds
    ``T_i * B_i,leader`` to its leader.
    """
    rho = np.asarray(rho, dtype=np.float64)
    pos = density_order(rho)
    _check_forest(forest, pos)
    order = np.empty_like(pos)
    order[pos] = np.arange(len(pos))
    t = rho.copy()
    _accumulate(order, forest.leader, forest.weight, t)
    return t


def dependency_matrix(forest: DependencyForest) -> np.ndarray:
    """Dense B with ``B[i, leader(i)] = weight(i)``."""
    b = np.zeros((forest.n, forest.n))
    has = np.flatnonzero(forest.leader >= 0)
    b[has, forest.leader[has]] = forest.weight[has]
    return b


def solve_typicality_oracle(forest: DependencyForest, rho) -> np.ndarray:
    """Dense reference solve of ``(I - B^T) T = rho``; small n only."""
    n = forest.n
    if n > 500:
        raise ValueError("dense typicality solve is limited to n <= 500")
    system = np.eye(n) - dependency_matrix(forest).T
    lu, piv = scipy.linalg.lu_factor(system)
    if np.any(np.diag(lu) == 0):
        raise InvariantError("I - B^T is singular")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(rho, dtype=np.float64))


@dataclass(frozen=True)
class SubClustering:
    """Modes and the mode every point drains into."""

    modes: np.ndarray
    assignment: np.ndarray
    is_mode: np.ndarray

    @property
    def q(self) -> int:
        return len(self.modes)

    def mode_index(self) -> np.ndarray:
        """Per-point index of its mode within ``modes`` (0..q-1)."""
        lookup = np.full(len(self.assignment), -1, dtype=np.int64)
        lookup[self.modes] = np.arange(self.q)
        return lookup[self.assignment]


def assign_to_modes(leader, is_mode) -> np.ndarray:
    """Follow kept leader edges up to the mode heading each tree.

    Iterative walk with path memoisation: every point is resolved once, so
    deep chains cost O(n) total and never recurse.
    """
    leader = np.asarray(leader).tolist()
    is_mode = np.asarray(is_mode, dtype=bool).tolist()
    n = len(leader)
    out = [-1] * n
    for start in range(n):
        path = []
        i = start
        while out[i] < 0 and not is_mode[i]:
            path.append(i)
            i = leader[i]
            if i < 0 or len(path) > n:
                raise InvariantError(f"leader chain from point {start} never reaches a mode")
        root = i if is_mode[i] else out[i]
        out[root] = root
        for p in path:
            out[p] = root
    return np.asarray(out, dtype=np.int64)


def find_modes(forest: DependencyForest, t) -> SubClustering:
    """Break ``i -> leader(i)`` whenever ``T_i >= T_leader``; roots are modes.

    The comparison is exact (no tolerance); equality breaks the edge.
    """
    t = np.asarray(t, dtype=np.float64)
    has = forest.leader >= 0
    is_mode = ~has
    is_mode[has] = t[has] >= t[forest.leader[has]]
    assignment = assign_to_modes(forest.leader, is_mode)
    return SubClustering(modes=np.flatnonzero(is_mode), assignment=assignment, is_mode=is_mode)


def dump_modes(path, t, sc: SubClustering) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point", "T", "is_mode", "assigned_mode"])
        for i in range(len(t)):
            w.writerow([i, repr(float(t[i])), int(sc.is_mode[i]), int(sc.assignment[i])])
