"""Impurity functions, the split gain they induce, and top-k feature ranking."""
from __future__ import annotations

import enum

import numpy as np

from .dataset import DatasetView

# Scores closer than this are ranked as ties (then by feature index).
SCORE_TOL = 1e-12


class ImpurityKind(str, enum.Enum):
    ENTROPY = "entropy"
    GINI = "gini"
    SQRT_KM = "sqrt_km"

    @classmethod
    def parse(cls, value) -> "ImpurityKind":
        if isinstance(value, cls):
            return value
        value = str(value).lower().replace("-", "_")
        if value == "sqrt":
            value = "sqrt_km"
        return cls(value)


_XLOG2X = np.zeros(1)


def _xlog2x(counts: np.ndarray) -> np.ndarray:
    """``c * log2(c)`` for non-negative integer counts, via a shared lookup table."""
    global _XLOG2X
    top = int(counts.max()) if counts.size else 0
    if top >= len(_XLOG2X):
        size = max(top + 1, 2 * len(_XLOG2X))
        c = np.arange(size, dtype=np.float64)
        c[0] = 1.0
        table = np.arange(size, dtype=np.float64) * np.log2(c)
        _XLOG2X = table
    return _XLOG2X[counts]


def weighted_impurity(kind: ImpurityKind, counts) -> np.ndarray:
    """``n * G(counts / n)`` along the last axis; 0 for empty distributions.

    Two-class inputs use the normalized binary formulas (G(1/2) = 1), written
    with commutative operations only so that mirror-image counts give
    bit-identical results; with more classes the counts are sorted first.
    """
    counts = np.asarray(counts, dtype=np.int64)
    C = counts.shape[-1]
    if C == 1:
        return np.zeros(counts.shape[:-1])
    if C == 2:
        a, b = counts[..., 0], counts[..., 1]
        n = a + b
        if kind is ImpurityKind.ENTROPY:
            return _xlog2x(n) - (_xlog2x(a) + _xlog2x(b))
        if kind is ImpurityKind.GINI:
            return 4.0 * (a * b) / np.maximum(n, 1)
        if kind is ImpurityKind.SQRT_KM:
            return 2.0 * np.sqrt((a * b).astype(np.float64))
        raise ValueError(kind)
    counts = np.sort(counts, axis=-1)
    n = counts.sum(axis=-1)
    if kind is ImpurityKind.ENTROPY:
        return _xlog2x(n) - _xlog2x(counts).sum(axis=-1)
    if kind is ImpurityKind.GINI:
        return n - (counts**2).sum(axis=-1) / np.maximum(n, 1)
    if kind is ImpurityKind.SQRT_KM:
        return np.sqrt((counts * (n[..., None] - counts)).astype(np.float64)).sum(axis=-1)
    raise ValueError(kind)


def impurity_value(kind, counts) -> float:
    """Impurity ``G`` of a class-count distribution (binary: ``G(p)``, p = share of class 1)."""
    kind = ImpurityKind.parse(kind)
    counts = np.asarray(counts)
    if np.any(counts < 0) or counts.sum() <= 0:
        raise ValueError("impurity of an empty distribution")
    if not np.issubdtype(counts.dtype, np.integer):
        if not np.all(counts == np.round(counts)):
            raise ValueError("class counts must be integers")
        counts = counts.astype(np.int64)
    if kind is ImpurityKind.ENTROPY:
        # direct sum keeps G(1/2) == 1 exact
        c = np.sort(counts[counts > 0]).astype(np.float64)
        n = c.sum()
        return float(np.sum((c / n) * np.log2(n / c)))
    return float(weighted_impurity(kind, counts) / counts.sum())


def binary_impurity(kind, p: float) -> float:
    """Closed-form ``G(p)`` for the binary case."""
    kind = ImpurityKind.parse(kind)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    if kind is ImpurityKind.ENTROPY:
        return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
    if kind is ImpurityKind.GINI:
        return 4.0 * p * (1 - p)
    return 2.0 * float(np.sqrt(p * (1 - p)))


def gains_from_counts(kind: ImpurityKind, parent, ones) -> np.ndarray:
    """Split gains from class counts.

    ``parent`` has shape ``(..., C)``; ``ones`` has shape ``(..., d, C)`` and
    counts, per feature, the rows of each class where the feature is 1.
    """
    parent = np.asarray(parent)
    zeros = parent[..., None, :] - ones
    children = weighted_impurity(kind, zeros) + weighted_impurity(kind, ones)
    n = parent.sum(axis=-1)
    gain = (weighted_impurity(kind, parent)[..., None] - children) / np.maximum(n, 1)[..., None]
    return np.maximum(gain, 0.0)


def split_scores(view: DatasetView, kind) -> np.ndarray:
    """Gain of every feature on ``view``; queried features get ``-inf``."""
    kind = ImpurityKind.parse(kind)
    if view.size == 0:
        raise ValueError("cannot score features on an empty view")
    gain = gains_from_counts(kind, view.class_counts, view.feature_class_counts.T)
    gain[~view.free_features] = -np.inf
    return gain


def feature_score(view: DatasetView, feature: int, kind) -> float:
    if feature in view.queried:
        raise ValueError(f"feature {feature} already queried")
    return float(split_scores(view, kind)[feature])


def rank_features(scores: np.ndarray) -> np.ndarray:
    """Finite-scored indices by descending score, ties by ascending index."""
    idx = np.flatnonzero(np.isfinite(scores))
    if idx.size == 0:
        return idx
    key = np.rint(scores[idx] / SCORE_TOL)
    return idx[np.lexsort((idx, -key))]


def top_k_features(view: DatasetView, k: int, kind) -> list[int]:
    """The ``k`` best unqueried features of ``view`` (fewer if not enough remain)."""
    if k < 1:
        raise ValueError("k must be positive")
    return rank_features(split_scores(view, kind))[:k].tolist()
