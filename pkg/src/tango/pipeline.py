"""End-to-end clustering runs, parameter sweeps and their file outputs."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines
from .errors import ConfigError, InsufficientModesError
from .graph import DependencyForest, SimilarityGraph, build_forest, density, snn_similarity
from .knn import KnnGraph, build_knn, normalize_minmax, read_csv
from .metrics import report
from .pathsim import cross_edges, pbsim
from .spectral import propagate_labels, spectral_modes
from .typicality import SubClustering, find_modes, solve_typicality

log = logging.getLogger(__name__)

ALGORITHMS = ("tango", "quickshift", "dpc")


class StageTimer:
    """Accumulates wall time per named stage."""

    def __init__(self):
        self.stages: dict[str, float] = {}
        self._start = time.perf_counter()
        self._last = self._start

    def lap(self, name):
        now = time.perf_counter()
        self.stages[name] = self.stages.get(name, 0.0) + (now - self._last)
        self._last = now

    @property
    def total(self) -> float:
        return self._last - self._start


@dataclass
class TangoResult:
    labels: np.ndarray
    knn: KnnGraph
    sim: SimilarityGraph
    rho: np.ndarray
    forest: DependencyForest
    typicality: np.ndarray
    subclusters: SubClustering
    pbsim: np.ndarray
    mode_labels: np.ndarray
    timings: dict = field(default_factory=dict)

    @property
    def similarity_seconds(self) -> float:
        return self.timings.get("similarity", 0.0)

    @property
    def remaining_seconds(self) -> float:
        return sum(v for k, v in self.timings.items() if k not in ("similarity", "total"))


def similarity_stage(x, k, workers=None):
    knn = build_knn(x, k, workers=workers or 1)
    return knn, snn_similarity(knn, workers=workers)


def tango(x, k: int, n_clusters: int, seed: int = 0, workers: int | None = None) -> TangoResult:
    """Cluster the rows of ``x`` into ``n_clusters`` groups.

    ``x`` is used as given; callers normalise beforehand if wanted.
    """
    if n_clusters < 1:
        raise ConfigError(f"cluster count must be >= 1, got {n_clusters}")
    timer = StageTimer()
    knn, sim = similarity_stage(x, k, workers)
    timer.lap("similarity")
    rho = density(sim, k)
    forest = build_forest(sim, rho)
    timer.lap("density_forest")
    t = solve_typicality(forest, rho)
    sc = find_modes(forest, t)
    timer.lap("modes")
    if sc.q < n_clusters:
        raise InsufficientModesError(sc.q, n_clusters)
    edges = cross_edges(sim, rho, sc)
    matrix = pbsim(edges, sc.modes)
    timer.lap("pathsim")
    if n_clusters == 1:
        mode_labels = np.zeros(sc.q, dtype=np.int64)
    else:
        mode_labels = spectral_modes(matrix, n_clusters, seed)
    labels = propagate_labels(sc, mode_labels)
    timer.lap("spectral")
    timings = dict(timer.stages, total=timer.total)
    log.debug("tango k=%d q=%d timings=%s", k, sc.q, timings)
    return TangoResult(labels, knn, sim, rho, forest, t, sc, matrix, mode_labels, timings)


class Tango:
    """Estimator-style wrapper around :func:`tango`."""

    def __init__(self, k=20, n_clusters=2, seed=0, normalize=True, workers=None):
        self.k = k
        self.n_clusters = n_clusters
        self.seed = seed
        self.normalize = normalize
        self.workers = workers

    def fit(self, x, y=None):
        if self.normalize:
            x = normalize_minmax(x)
        self.result_ = tango(x, self.k, self.n_clusters, self.seed, self.workers)
        self.labels_ = self.result_.labels
        return self

    def fit_predict(self, x, y=None):
        return self.fit(x).labels_


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = os.environ.get("TANGO_WORKERS", 1)
    try:
        workers = int(workers)
    except ValueError:
        raise ConfigError(f"worker count must be an integer, got {workers!r}") from None
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


@dataclass
class RunConfig:
    input: str
    algorithm: str = "tango"
    k: int = 20
    clusters: int = 2
    seed: int = 0
    tau: float = 0.0
    rho_threshold: float = 0.0
    label_col: int | None = None
    header: bool = False
    normalize: bool = True
    workers: int | None = None
    out: str | None = None

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.clusters < 1:
            raise ConfigError(f"clusters must be >= 1, got {self.clusters}")
        if not Path(self.input).is_file():
            raise ConfigError(f"input file not found: {self.input}")
        self.workers = resolve_workers(self.workers)
        return self


def load(config: RunConfig):
    x, y = read_csv(config.input, header=config.header, label_col=config.label_col)
    if config.normalize:
        x = normalize_minmax(x)
    return x, y


def cluster_data(x, config: RunConfig, k=None) -> np.ndarray:
    k = config.k if k is None else k
    if config.algorithm == "tango":
        return tango(x, k, config.clusters, config.seed, config.workers).labels
    knn, sim = similarity_stage(x, k, config.workers)
    rho = density(sim, k)
    if config.algorithm == "quickshift":
        _, labels = baselines.quick_shift(sim, rho, config.tau)
    else:
        _, labels = baselines.dpc_break(sim, rho, config.tau, config.rho_threshold)
    return labels


def write_labels(path, labels) -> None:
    with open(path, "w") as fh:
        fh.write("".join(f"{int(v)}\n" for v in labels))


def metrics_path(out) -> Path:
    return Path(str(out) + ".metrics.json")


def run_cluster(config: RunConfig) -> dict:
    """Execute one configured run and write its outputs.

    Returns the metrics report when a truth column was given, else ``{}``.
    """
    config.validate()
    x, y = load(config)
    labels = cluster_data(x, config)
    if config.out:
        write_labels(config.out, labels)
    result = {}
    if y is not None:
        result = report(labels, y)
        if config.out:
            with open(metrics_path(config.out), "w") as fh:
                json.dump(result, fh, indent=2)
                fh.write("\n")
    return result


def sweep(config: RunConfig, k_min: int, k_max: int, step: int = 1, out=None) -> list[dict]:
    """Evaluate every k in [k_min, k_max]; failed k values get NaN metrics."""
    if k_min < 1 or k_max < k_min or step < 1:
        raise ConfigError(f"invalid k range [{k_min}, {k_max}] step {step}")
    if config.label_col is None:
        raise ConfigError("a sweep needs a truth column (--label-col)")
    config.validate()
    x, y = load(config)
    rows = []
    for k in range(k_min, k_max + 1, step):
        try:
            m = report(cluster_data(x, config, k=k), y)
            row = {"k": k, "ari": m["ari"], "nmi": m["nmi"], "acc": m["acc"]}
        except (InsufficientModesError, ConfigError) as exc:
            log.info("k=%d skipped: %s", k, exc)
            row = {"k": k, "ari": math.nan, "nmi": math.nan, "acc": math.nan}
        rows.append(row)
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["k", "ari", "nmi", "acc"])
            w.writeheader()
            for row in rows:
                w.writerow({key: ("" if isinstance(v, float) and math.isnan(v) else v) for key, v in row.items()})
    return rows
