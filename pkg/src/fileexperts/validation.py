"""Shared evaluation plumbing: stratified folds and binary metrics."""

from __future__ import annotations

import numpy as np

from .errors import TooFewSamples


def stratified_folds(labels, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Split sample indices into seeded, label-stratified folds.

    Indices of each class are shuffled and dealt round-robin, so per-fold
    class counts differ from a proportional split by at most one sample.
    Returns one sorted index array per fold.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if n < folds:
        raise TooFewSamples(f"{n} samples cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    assignment: list[list[int]] = [[] for _ in range(folds)]
    for value in np.unique(labels):
        idx = np.flatnonzero(labels == value)
        rng.shuffle(idx)
        for position, sample in enumerate(idx):
            assignment[position % folds].append(int(sample))
    return [np.array(sorted(fold), dtype=int) for fold in assignment]


def binary_prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall and F-measure with the 0-denominator convention:
    a metric with an empty denominator is 0."""
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2.0 * precision * recall / (precision + recall)
