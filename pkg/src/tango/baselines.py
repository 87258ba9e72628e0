"""Quick Shift and the DPC break rule on the shared similarity/density stack."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import SimilarityGraph, build_forest
from .typicality import SubClustering, assign_to_modes


@dataclass(frozen=True)
class BaselineConfig:
    tau: float = 0.0
    rho_threshold: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ConfigError(f"tau must be finite and >= 0, got {self.tau}")
        if not 0.0 <= self.rho_threshold <= 1.0:
            raise ConfigError(f"rho_threshold must lie in [0, 1], got {self.rho_threshold}")


def leader_similarity(sim: SimilarityGraph, forest) -> np.ndarray:
    """A(i, leader(i)) per point, 0 for roots."""
    out = np.zeros(sim.n)
    has = np.flatnonzero(forest.leader >= 0)
    out[has] = sim.data[sim.indptr[has] + forest.rank[has] - 1]
    return out


def _cluster(forest, is_mode):
    assignment = assign_to_modes(forest.leader, is_mode)
    sc = SubClustering(modes=np.flatnonzero(is_mode), assignment=assignment, is_mode=is_mode)
    return sc.modes, sc.mode_index()


def quick_shift(sim: SimilarityGraph, rho, tau: float):
    """Break the link to the leader when its similarity falls below ``tau``.

    Returns ``(modes, labels)``; labels index into the sorted mode array.
    """
    cfg = BaselineConfig(tau=tau)
    forest = build_forest(sim, rho)
    is_mode = (forest.leader < 0) | (leader_similarity(sim, forest) < cfg.tau)
    return _cluster(forest, is_mode)


def dpc_break(sim: SimilarityGraph, rho, tau: float, rho_threshold: float):
    """Like :func:`quick_shift`, but only points denser than ``rho_threshold`` may break."""
    cfg = BaselineConfig(tau=tau, rho_threshold=rho_threshold)
    rho = np.asarray(rho, dtype=np.float64)
    forest = build_forest(sim, rho)
    weak = leader_similarity(sim, forest) < cfg.tau
    is_mode = (forest.leader < 0) | (weak & (rho > cfg.rho_threshold))
    return _cluster(forest, is_mode)
