import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import stack
from tango import datasets
from tango.baselines import BaselineConfig, dpc_break, leader_similarity, quick_shift
from tango.errors import ConfigError
from tango.metrics import ari


@pytest.fixture(scope="module")
def blob_stack():
    x, y = datasets.generate("blobs", 300, seed=0)
    return (y,) + stack(x, 50)


def test_tau_zero_keeps_only_roots(blob_stack):
    _, _, sim, rho, f = blob_stack
    modes, labels = quick_shift(sim, rho, 0.0)
    np.testing.assert_array_equal(modes, f.roots)
    assert labels.max() == len(modes) - 1


def test_tau_above_every_similarity_makes_all_modes(blob_stack):
    _, _, sim, rho, _ = blob_stack
    modes, labels = quick_shift(sim, rho, sim.data.max() + 1.0)
    assert len(modes) == sim.n
    assert labels.tolist() == list(range(sim.n))


def test_leader_similarity_reads_the_leader_entry(blob_stack):
    _, _, sim, rho, f = blob_stack
    a = sim.to_dense()
    ls = leader_similarity(sim, f)
    for i in range(sim.n):
        assert ls[i] == (a[i, f.leader[i]] if f.leader[i] >= 0 else 0.0)


def test_blobs_recovered_at_a_tuned_tau(blob_stack):
    y, _, sim, rho, f = blob_stack
    ls = leader_similarity(sim, f)
    grid = np.quantile(ls[f.leader >= 0], np.linspace(0, 1, 20))
    best = max(ari(quick_shift(sim, rho, t)[1], y) for t in grid)
    assert best >= 0.95


def test_dpc_threshold_one_never_breaks(blob_stack):
    _, _, sim, rho, _ = blob_stack
    for tau in (0.5, 5.0, 50.0):
        m, lab = dpc_break(sim, rho, tau, 1.0)
        m0, lab0 = quick_shift(sim, rho, 0.0)
        np.testing.assert_array_equal(m, m0)
        np.testing.assert_array_equal(lab, lab0)


def test_dpc_threshold_zero_is_quick_shift(blob_stack):
    _, _, sim, rho, _ = blob_stack
    for tau in (5.0, 15.0, 30.0):
        m, lab = dpc_break(sim, rho, tau, 0.0)
        mq, labq = quick_shift(sim, rho, tau)
        np.testing.assert_array_equal(m, mq)
        np.testing.assert_array_equal(lab, labq)


def test_outlier_stays_attached_under_dpc():
    rng = np.random.default_rng(2)
    x = np.vstack([rng.normal(0.0, 1.0, (150, 2)), [[3.2, 0.0]]])
    _, sim, rho, f = stack(x, 10)
    out = 150
    assert f.leader[out] >= 0
    ls = leader_similarity(sim, f)
    tau = np.nextafter(ls[out], np.inf)  # just enough to cut the outlier loose
    qs_modes, _ = quick_shift(sim, rho, tau)
    dpc_modes, dpc_labels = dpc_break(sim, rho, tau, rho_threshold=float(np.median(rho)))
    assert rho[out] < np.median(rho)
    assert out in qs_modes
    assert out not in dpc_modes
    assert dpc_labels[out] == dpc_labels[f.leader[out]]


def test_config_validation():
    with pytest.raises(ConfigError):
        BaselineConfig(tau=-1.0)
    with pytest.raises(ConfigError):
        BaselineConfig(tau=float("inf"))
    with pytest.raises(ConfigError):
        BaselineConfig(rho_threshold=1.5)


@functools.lru_cache(maxsize=1)
def small_blobs():
    x, _ = datasets.generate("blobs", 120, seed=1)
    _, sim, rho, _ = stack(x, 15)
    return sim, rho


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 40), st.floats(0, 40), st.floats(0, 1))
def test_modes_grow_with_tau_and_dpc_is_a_subset(t1, t2, r):
    sim, rho = small_blobs()
    lo, hi = sorted((t1, t2))
    m_lo = set(quick_shift(sim, rho, lo)[0].tolist())
    m_hi = set(quick_shift(sim, rho, hi)[0].tolist())
    assert m_lo <= m_hi
    assert set(dpc_break(sim, rho, hi, r)[0].tolist()) <= m_hi
