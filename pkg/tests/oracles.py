"""Brute-force metric oracles, deliberately written as plain loops."""

from itertools import permutations

import numpy as np


def pairs(n):
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def oracle_ari(pred, truth):
    """Adjusted Rand index by exhaustive pair counting."""
    n = len(pred)
    if n < 2:
        return 1.0
    together_both = together_pred = together_truth = total = 0
    for i, j in pairs(n):
        total += 1
        same_p = pred[i] == pred[j]
        same_t = truth[i] == truth[j]
        together_pred += same_p
        together_truth += same_t
        together_both += same_p and same_t
    expected = together_pred * together_truth / total
    max_index = 0.5 * (together_pred + together_truth)
    if max_index == expected:
        return 1.0
    return (together_both - expected) / (max_index - expected)


def oracle_nmi(pred, truth):
    """NMI (arithmetic-mean normalization) from a hand-counted contingency table."""
    n = len(pred)
    counts = {}
    for p, t in zip(pred, truth):
        counts[(p, t)] = counts.get((p, t), 0) + 1
    row = {}
    col = {}
    for (p, t), c in counts.items():
        row[p] = row.get(p, 0) + c
        col[t] = col.get(t, 0) + c

    def entropy(marginal):
        return -sum((c / n) * np.log(c / n) for c in marginal.values() if c > 0)

    h_pred, h_truth = entropy(row), entropy(col)
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0
    mutual = 0.0
    for (p, t), c in counts.items():
        mutual += (c / n) * np.log((c / n) / ((row[p] / n) * (col[t] / n)))
    return mutual / (0.5 * (h_pred + h_truth))


def _optimal_bijections(pred, truth):
    """All label bijections maximizing agreement, by exhaustive enumeration."""
    k = int(max(max(pred), max(truth))) + 1
    best, best_maps = -1, []
    for perm in permutations(range(k)):
        agree = sum(perm[p] == t for p, t in zip(pred, truth))
        if agree > best:
            best, best_maps = agree, [perm]
        elif agree == best:
            best_maps.append(perm)
    return best, best_maps


def oracle_accuracy(pred, truth):
    best, _ = _optimal_bijections(pred, truth)
    return best / len(pred)


def oracle_f1_candidates(pred, truth):
    """Macro-F1 values under every agreement-maximizing bijection.

    The Hungarian step may break ties between equally good matchings either
    way, so the implementation is correct if it hits any candidate.
    """
    _, maps = _optimal_bijections(pred, truth)
    k = int(max(max(pred), max(truth))) + 1
    out = set()
    for perm in maps:
        mapped = [perm[p] for p in pred]
        scores = []
        for cls in range(k):
            tp = sum(m == cls and t == cls for m, t in zip(mapped, truth))
            fp = sum(m == cls and t != cls for m, t in zip(mapped, truth))
            fn = sum(m != cls and t == cls for m, t in zip(mapped, truth))
            denom = 2 * tp + fp + fn
            scores.append(2 * tp / denom if denom > 0 else 0.0)
        out.add(sum(scores) / len(scores))
    return out
