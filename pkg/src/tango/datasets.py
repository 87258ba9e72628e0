"""Synthetic benchmark shapes and CSV export with a trailing truth column."""

from __future__ import annotations

import numpy as np
from sklearn import datasets as skd

from .errors import ConfigError

KINDS = ("blobs", "moons", "circles")


def generate(kind: str, n: int, noise: float | None = None, seed: int = 0, centers: int = 3):
    """Return ``(x, y)`` for a seeded synthetic dataset.

    blobs: ``centers`` isotropic Gaussians with std ``noise`` (default 1.0)
    evenly spaced on a circle of radius 10, sizes differing by at most one.
    moons / circles: the usual two-class shapes with Gaussian jitter ``noise``
    (defaults 0.08 and 0.05).
    """
    if n < 4:
        raise ConfigError(f"need n >= 4 points, got {n}")
    if kind == "blobs":
        angles = 2 * np.pi * np.arange(centers) / centers
        where = 10.0 * np.column_stack([np.cos(angles), np.sin(angles)])
        std = 1.0 if noise is None else noise
        x, y = skd.make_blobs(n_samples=n, centers=where, cluster_std=std, random_state=seed)
    elif kind == "moons":
        x, y = skd.make_moons(n_samples=n, noise=0.08 if noise is None else noise, random_state=seed)
    elif kind == "circles":
        x, y = skd.make_circles(
            n_samples=n, noise=0.05 if noise is None else noise, factor=0.5, random_state=seed
        )
    else:
        raise ConfigError(f"unknown dataset kind {kind!r}; choose from {', '.join(KINDS)}")
    return x, y.astype(np.int64)


def write_csv(path, x, y=None) -> None:
    with open(path, "w") as fh:
        for i, row in enumerate(np.asarray(x, dtype=np.float64)):
            fields = [repr(float(v)) for v in row]
            if y is not None:
                fields.append(str(int(y[i])))
            fh.write(",".join(fields) + "\n")
