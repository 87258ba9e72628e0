import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import stack
from tango.errors import DataError
from tango.graph import (
    DependencyForest,
    SimilarityGraph,
    build_forest,
    candidate_pairs,
    density,
    density_order,
    snn_similarity,
)
from tango.knn import build_knn


def snn_oracle(x, k):
    """Double loop over all pairs, straight from the definition."""
    n = len(x)
    d = [[math.dist(x[i], x[j]) for j in range(n)] for i in range(n)]
    nbrs = [sorted((j for j in range(n) if j != i), key=lambda j: (d[i][j], j))[:k] for i in range(n)]
    d_max = max(d[i][nbrs[i][-1]] for i in range(n))
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if i not in nbrs[j] and j not in nbrs[i]:
                continue
            s = 0.0
            for p in set(nbrs[i]) & set(nbrs[j]):
                s += math.exp(-(((d[p][i] + d[p][j]) / (2 * d_max)) ** 2))
            a[i, j] = a[j, i] = s
    return a


def density_oracle(a, k):
    raw = np.array([sum(sorted(row, reverse=True)[:k]) for row in a])
    return raw / raw.max()


def forest_oracle(a, rho):
    """Scan every neighbour of every point."""
    n = len(rho)
    leader = [-1] * n
    rank = [0] * n
    for i in range(n):
        row = sorted((j for j in range(n) if a[i, j] > 0), key=lambda j: (-a[i, j], j))
        for pos, j in enumerate(row):
            if (rho[j], j) > (rho[i], i):
                leader[i], rank[i] = j, pos + 1
                break
    return np.array(leader), np.array(rank)


@pytest.mark.parametrize("seed", range(4))
def test_similarity_matches_oracle(seed):
    x = np.random.default_rng(seed).normal(size=(20, 2))
    sim = snn_similarity(build_knn(x, 4))
    np.testing.assert_allclose(sim.to_dense(), snn_oracle(x, 4), rtol=1e-12, atol=1e-15)


def test_no_shared_neighbours_means_no_edge():
    # two mutual pairs: each point's only neighbour is its partner, so nothing is shared
    sim = snn_similarity(build_knn(np.array([[0.0], [1.0], [10.0], [11.0]]), 1))
    assert sim.nnz == 0


def test_coincident_shared_neighbour_contributes_one():
    x = np.array([[0.0], [0.0], [0.0], [5.0]])
    a = snn_similarity(build_knn(x, 2)).to_dense()
    assert a[0, 1] == 1.0 and a[0, 2] == 1.0 and a[1, 2] == 1.0


def test_degenerate_neighbourhoods_rejected():
    with pytest.raises(DataError, match="d_max"):
        snn_similarity(build_knn(np.zeros((3, 2)), 1))


def test_candidate_pairs_are_the_knn_union():
    x = np.random.default_rng(7).normal(size=(30, 2))
    knn = build_knn(x, 3)
    lo, hi = candidate_pairs(knn)
    want = {tuple(sorted((i, int(j)))) for i in range(30) for j in knn.neighbors[i]}
    assert set(zip(lo.tolist(), hi.tolist())) == want


def test_density_matches_oracle():
    x = np.random.default_rng(8).normal(size=(30, 2))
    k = 5
    sim = snn_similarity(build_knn(x, k))
    np.testing.assert_allclose(density(sim, k), density_oracle(sim.to_dense(), k), rtol=1e-12)


def test_density_isolated_point_and_peak():
    g = SimilarityGraph.from_pairs(4, [0, 1], [1, 2], [0.5, 0.25])
    assert density(g, 1).tolist() == [1.0, 1.0, 0.5, 0.0]
    assert density(g, 2).tolist() == [2 / 3, 1.0, 1 / 3, 0.0]


def test_density_order_breaks_ties_by_id():
    pos = density_order([0.5, 0.2, 0.5, 0.9])
    assert pos.tolist() == [1, 0, 2, 3]


@pytest.mark.parametrize("seed", range(3))
def test_forest_matches_exhaustive_oracle(seed):
    x = np.random.default_rng(seed).normal(size=(40, 2))
    _, sim, rho, forest = stack(x, 6)
    leader, rank = forest_oracle(sim.to_dense(), rho)
    np.testing.assert_array_equal(forest.leader, leader)
    np.testing.assert_array_equal(forest.rank, rank)
    has = leader >= 0
    assert forest.max_rank == rank[has].max()
    np.testing.assert_allclose(forest.weight[has], np.exp(-((rank[has] / forest.max_rank) ** 2)), rtol=1e-15)


def test_global_peak_is_root_and_rank_one_weight():
    x = np.random.default_rng(11).normal(size=(60, 2))
    _, sim, rho, forest = stack(x, 6)
    assert forest.leader[int(np.argmax(rho))] == -1
    ones = np.flatnonzero(forest.rank == 1)
    assert len(ones)
    np.testing.assert_allclose(forest.weight[ones], math.exp(-((1 / forest.max_rank) ** 2)))


def test_forest_without_edges():
    f = DependencyForest.from_leaders([-1, -1, -1], [0, 0, 0])
    assert f.max_rank == 0 and f.weight.tolist() == [0.0, 0.0, 0.0]
    assert f.roots.tolist() == [0, 1, 2]


def test_rows_sorted_descending_with_id_ties():
    g = SimilarityGraph.from_pairs(4, [0, 0, 0, 1], [1, 2, 3, 2], [0.5, 0.7, 0.5, 0.0])
    cols, vals = g.row(0)
    assert cols.tolist() == [2, 1, 3]
    assert vals.tolist() == [0.7, 0.5, 0.5]
    assert g.degree().tolist() == [3, 1, 1, 1]  # the zero pair is not stored


def test_dump_formats(tmp_path):
    x = np.random.default_rng(2).normal(size=(15, 2))
    _, sim, rho, forest = stack(x, 4)
    sim.dump(tmp_path / "s.csv")
    forest.dump(tmp_path / "f.csv")
    with open(tmp_path / "s.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["i", "j", "value"]
    a = sim.to_dense()
    keys = [(int(i), int(j)) for i, j, _ in rows[1:]]
    assert keys == sorted(keys) and all(i < j for i, j in keys)
    assert all(a[int(i), int(j)] == float(v) for i, j, v in rows[1:])
    with open(tmp_path / "f.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["point", "leader", "rank", "weight"]
    for r in rows[1:]:
        i = int(r[0])
        if forest.leader[i] < 0:
            assert r[1:] == ["", "", ""]
        else:
            assert int(r[1]) == forest.leader[i] and float(r[3]) == forest.weight[i]


# ---- invariants -----------------------------------------------------------

points = st.integers(8, 40).flatmap(
    lambda n: arrays(np.float64, (n, 2), elements=st.floats(-100, 100, allow_nan=False, width=32), unique=True)
)


def _usable(x, k):
    knn = build_knn(x, k)
    return knn if knn.d_max > 0 else None


@settings(max_examples=60, deadline=None)
@given(points, st.integers(1, 6))
def test_similarity_symmetric_supported_bounded(x, k):
    knn = _usable(x, k)
    if knn is None:
        return
    a = snn_similarity(knn).to_dense()
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert np.all(a >= 0) and np.all(a <= k)
    linked = np.zeros_like(a, dtype=bool)
    rows = np.repeat(np.arange(len(x)), k)
    linked[rows, knn.neighbors.ravel()] = True
    linked |= linked.T
    assert not np.any((a > 0) & ~linked)


@settings(max_examples=60, deadline=None)
@given(points, st.integers(1, 6))
def test_forest_acyclic_and_weights_in_range(x, k):
    knn = _usable(x, k)
    if knn is None:
        return
    sim = snn_similarity(knn)
    rho = density(sim, k)
    f = build_forest(sim, rho)
    pos = density_order(rho)
    has = f.leader >= 0
    # every edge climbs the strict (rho, id) order, so no cycle can close
    assert np.all(pos[f.leader[has]] > pos[has])
    assert len(f.roots) >= 1
    if has.any():
        w = f.weight[has]
        assert np.all(w >= math.exp(-1) - 1e-15)
        assert np.all(w <= math.exp(-((1 / f.max_rank) ** 2)) + 1e-15)


@pytest.mark.parametrize("scale", [4.0, 0.25])
def test_power_of_two_rescaling_is_exact(scale):
    x = np.random.default_rng(21).normal(size=(200, 3))
    _, sim, rho, f = stack(x, 8)
    _, sim2, rho2, f2 = stack(x * scale, 8)
    np.testing.assert_array_equal(sim.data, sim2.data)
    np.testing.assert_array_equal(rho, rho2)
    np.testing.assert_array_equal(f.leader, f2.leader)


@pytest.mark.parametrize("scale", [3.7, 0.013])
def test_rescaling_keeps_forest(scale):
    x = np.random.default_rng(22).normal(size=(200, 3))
    _, sim, rho, f = stack(x, 8)
    _, sim2, rho2, f2 = stack(x * scale, 8)
    np.testing.assert_allclose(sim2.data, sim.data, rtol=1e-12)
    np.testing.assert_allclose(rho2, rho, rtol=1e-12)
    np.testing.assert_array_equal(f.leader, f2.leader)
    np.testing.assert_array_equal(f.rank, f2.rank)


def test_thread_count_does_not_change_similarity():
    x = np.random.default_rng(23).normal(size=(3000, 2))
    knn = build_knn(x, 12)
    a = snn_similarity(knn, workers=1)
    b = snn_similarity(knn, workers=4)
    np.testing.assert_array_equal(a.indptr, b.indptr)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.data, b.data)
