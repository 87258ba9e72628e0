"""External clustering metrics: ARI, NMI and best-matching accuracy."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def _check(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"label arrays differ in length: {len(pred)} vs {len(truth)}")
    if len(pred) < 2:
        raise ValueError("need at least two labelled points")
    return pred, truth


def contingency(pred, truth) -> np.ndarray:
    """Counts table with predicted clusters as rows and true classes as columns."""
    pred, truth = _check(pred, truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def _comb2(values):
    return sum(int(v) * (int(v) - 1) // 2 for v in np.ravel(values))


def ari(pred, truth) -> float:
    """Adjusted Rand index (Hubert & Arabie)."""
    table = contingency(pred, truth)
    n = int(table.sum())
    index = _comb2(table)
    rows = _comb2(table.sum(axis=1))
    cols = _comb2(table.sum(axis=0))
    total = n * (n - 1) // 2
    # (index - expected) / (max - expected) with everything scaled by 2*total
    num = 2 * (index * total - rows * cols)
    den = (rows + cols) * total - 2 * rows * cols
    if den == 0:
        return 1.0
    return num / den


def _entropy(counts, n):
    # sorted so the sum does not depend on how clusters are numbered
    p = np.sort(counts[counts > 0]) / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Mutual information normalised by the arithmetic mean of the two entropies.

    MI is taken as ``H(pred) + H(truth) - H(joint)``, so identical partitions
    score exactly 1 and relabelling never changes the result.
    """
    table = contingency(pred, truth)
    n = table.sum()
    h_pred = _entropy(table.sum(axis=1), n)
    h_true = _entropy(table.sum(axis=0), n)
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    mi = h_pred + h_true - _entropy(table.ravel(), n)
    return float(np.clip(mi / ((h_pred + h_true) / 2.0), 0.0, 1.0))


def acc(pred, truth) -> float:
    """Fraction of points matched under the best one-to-one cluster-to-class map."""
    table = contingency(pred, truth)
    r, c = linear_sum_assignment(-table)
    return float(table[r, c].sum() / table.sum())


def report(pred, truth) -> dict:
    pred, truth = _check(pred, truth)
    return {
        "ari": ari(pred, truth),
        "nmi": nmi(pred, truth),
        "acc": acc(pred, truth),
        "n": int(len(pred)),
        "clusters_pred": int(len(np.unique(pred))),
        "clusters_true": int(len(np.unique(truth))),
    }

