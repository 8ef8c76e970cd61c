"""Lloyd k-means with k-means++ seeding, plus the four clustering metrics.

ACC and macro-F1 are computed after an optimal cluster-to-class matching
(Hungarian assignment on the contingency table), NMI uses arithmetic-mean
normalization, and ARI follows the adjusted-for-chance pair-counting formula
(negative values are legitimate).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graphs import one_hot

__all__ = [
    "ClusterAssignment",
    "kmeans",
    "pseudo_labels",
    "class_means",
    "accuracy",
    "match_clusters",
    "nmi",
    "ari",
    "macro_f1",
]


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    inertia_history: tuple = ()


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (points * points).sum(axis=1)[:, None]
        - 2.0 * points @ centers.T
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp_init(points: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: several D^2-sampled candidates per center, keep the one
    that lowers the total potential the most."""
    n = points.shape[0]
    n_trials = 2 + int(np.log(c)) if c > 1 else 1
    centers = np.empty((c, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = _sq_dists(points, centers[:1]).ravel()
    for j in range(1, c):
        total = d2.sum()
        if total > 0:
            candidates = rng.choice(n, size=n_trials, p=d2 / total)
        else:
            candidates = rng.integers(n, size=n_trials)
        best_idx, best_d2, best_potential = None, None, np.inf
        for idx in candidates:
            trial = np.minimum(d2, _sq_dists(points, points[idx : idx + 1]).ravel())
            potential = trial.sum()
            if potential < best_potential:
                best_idx, best_d2, best_potential = int(idx), trial, potential
        centers[j] = points[best_idx]
        d2 = best_d2
    return centers


def kmeans(
    points: np.ndarray,
    c: int,
    seed=0,
    warm_centers: np.ndarray | None = None,
    max_iter: int = 300,
) -> ClusterAssignment:
    """Lloyd iterations until the assignment stops changing.

    Seeding is k-means++ unless ``warm_centers`` is given. An empty cluster is
    re-seeded at the point farthest from its closest center, which keeps the
    recorded inertia history non-increasing.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be 2-d")
    if not np.isfinite(points).all():
        raise ValueError("points contain non-finite values")
    n = points.shape[0]
    if not 1 <= c <= n:
        raise ValueError(f"need n >= c >= 1, got n={n}, c={c}")
    if warm_centers is not None:
        centers = np.array(warm_centers, dtype=np.float64)
        if centers.shape != (c, points.shape[1]):
            raise ValueError(f"warm_centers shape {centers.shape} != ({c}, {points.shape[1]})")
    else:
        centers = _kmeanspp_init(points, c, np.random.default_rng(seed))

    labels = np.full(n, -1)
    history = []
    for _ in range(max_iter):
        d2 = _sq_dists(points, centers)
        new_labels = d2.argmin(axis=1)
        closest = d2[np.arange(n), new_labels]
        for j in range(c):
            if (new_labels == j).any():
                continue
            farthest = int(closest.argmax())
            centers[j] = points[farthest]
            d2[:, j] = _sq_dists(points, centers[j : j + 1]).ravel()
            new_labels = d2.argmin(axis=1)
            closest = d2[np.arange(n), new_labels]
        history.append(float(closest.sum()))
        if (new_labels == labels).all():
            break
        labels = new_labels
        for j in range(c):
            centers[j] = points[labels == j].mean(axis=0)

    inertia = float(((points - centers[labels]) ** 2).sum())
    return ClusterAssignment(
        labels=labels, centers=centers, inertia=inertia, inertia_history=tuple(history)
    )


def pseudo_labels(
    h_bar: np.ndarray, c: int, seed=0, warm_centers: np.ndarray | None = None
) -> np.ndarray:
    """One-hot k-means assignment of the consensus embedding."""
    return one_hot(kmeans(h_bar, c, seed=seed, warm_centers=warm_centers).labels, c)


def class_means(points: np.ndarray, labels: np.ndarray, c: int) -> np.ndarray:
    """Per-class mean rows; empty classes fall back to the global mean."""
    points = np.asarray(points, dtype=np.float64)
    out = np.empty((c, points.shape[1]))
    overall = points.mean(axis=0)
    for j in range(c):
        mask = labels == j
        out[j] = points[mask].mean(axis=0) if mask.any() else overall
    return out


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def _contingency(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError("pred and truth must be 1-d arrays of equal length")
    k = int(max(pred.max(), truth.max())) + 1
    table = np.zeros((k, k), dtype=np.int64)
    np.add.at(table, (pred, truth), 1)
    return table


def match_clusters(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Relabel predicted clusters by the agreement-maximizing bijection.

    Ties between equally good bijections are broken toward the one with the
    larger macro-F1 (the per-pair F1 is separable, so one assignment solves
    the lexicographic objective); this keeps downstream scores invariant
    under relabeling of the predicted clusters.
    """
    table = _contingency(pred, truth)
    k = table.shape[0]
    sums = table.sum(axis=1, keepdims=True) + table.sum(axis=0, keepdims=True)
    pair_f1 = np.divide(2.0 * table, sums, out=np.zeros(table.shape), where=sums > 0)
    rows, cols = linear_sum_assignment(-(table.astype(np.float64) * (k + 1) + pair_f1))
    mapping = np.empty(k, dtype=np.int64)
    mapping[rows] = cols
    return mapping[np.asarray(pred, dtype=np.int64)]


def accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Best agreement over all cluster-to-class bijections."""
    table = _contingency(pred, truth)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum() / len(pred))


def nmi(pred: np.ndarray, truth: np.ndarray) -> float:
    """Normalized mutual information with arithmetic-mean normalization.

    Degenerate single-cluster labelings have zero entropy; the score is then
    defined as 0 (with a warning).
    """
    table = _contingency(pred, truth).astype(np.float64)
    n = table.sum()
    p_joint = table / n
    p_pred = p_joint.sum(axis=1)
    p_truth = p_joint.sum(axis=0)
    h_pred = -np.sum(p_pred[p_pred > 0] * np.log(p_pred[p_pred > 0]))
    h_truth = -np.sum(p_truth[p_truth > 0] * np.log(p_truth[p_truth > 0]))
    if h_pred == 0.0 or h_truth == 0.0:
        warnings.warn("degenerate single-cluster labeling; NMI defined as 0", UserWarning)
        return 0.0
    outer = np.outer(p_pred, p_truth)
    nz = p_joint > 0
    mutual = np.sum(p_joint[nz] * np.log(p_joint[nz] / outer[nz]))
    return float(mutual / (0.5 * (h_pred + h_truth)))


def ari(pred: np.ndarray, truth: np.ndarray) -> float:
    """Adjusted Rand index (can be negative for worse-than-chance labelings)."""
    table = _contingency(pred, truth)
    n = table.sum()
    if n < 2:
        return 1.0

    def comb2(x):
        return x * (x - 1) / 2.0

    index = comb2(table).sum()
    sum_rows = comb2(table.sum(axis=1)).sum()
    sum_cols = comb2(table.sum(axis=0)).sum()
    expected = sum_rows * sum_cols / comb2(n)
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        return 1.0  # both partitions degenerate in the same direction
    return float((index - expected) / (max_index - expected))


def macro_f1(pred: np.ndarray, truth: np.ndarray) -> float:
    """Macro-averaged F1 after Hungarian matching of clusters to classes.

    Averaged over the full label universe of the two inputs; classes absent
    from the truth contribute an F1 of 0 unless also absent from the matched
    predictions.
    """
    matched = match_clusters(pred, truth)
    truth = np.asarray(truth, dtype=np.int64)
    k = int(max(np.asarray(pred, dtype=np.int64).max(), truth.max())) + 1
    scores = []
    for cls in range(k):
        tp = np.sum((matched == cls) & (truth == cls))
        fp = np.sum((matched == cls) & (truth != cls))
        fn = np.sum((matched != cls) & (truth == cls))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom > 0 else 0.0)
    return float(np.mean(scores))
