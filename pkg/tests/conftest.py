import math
from pathlib import Path

import numpy as np
import pytest

from tango.graph import build_forest, density, snn_similarity
from tango.knn import build_knn
from tango.typicality import find_modes, solve_typicality

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"

# filled by the acceptance module, echoed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def stack(x, k):
    """kNN, similarity, density and forest for ``x``."""
    knn = build_knn(x, k)
    sim = snn_similarity(knn)
    rho = density(sim, k)
    return knn, sim, rho, build_forest(sim, rho)


def crossover_fixture(m):
    """A Gaussian cluster plus a point P to its right, with ``m`` satellites spiralling around P."""
    big = np.random.default_rng(1).normal(0.0, 0.5, (300, 2))
    p = np.array([0.9, 0.0])
    i = np.arange(1, m + 1)
    r = 0.1 * i**0.8
    a = i * np.pi * (3 - math.sqrt(5))
    sats = p + np.column_stack([r * np.cos(a), r * np.sin(a)])
    return np.vstack([big, p[None], sats]), 300


CROSSOVER_K = 20


def crossover_state(m):
    x, p = crossover_fixture(m)
    _, _, rho, f = stack(x, CROSSOVER_K)
    t = solve_typicality(f, rho)
    return p, rho, f, t, find_modes(f, t)
