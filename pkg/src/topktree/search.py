"""Pieces shared by the plain and the optimized learners."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .impurity import ImpurityKind


class TimeLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    k: int = 1
    depth: int = 5
    impurity: ImpurityKind = ImpurityKind.ENTROPY

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValueError("k must be >= 1")
        if int(self.depth) < 0:
            raise ValueError("depth must be >= 0")
        object.__setattr__(self, "impurity", ImpurityKind.parse(self.impurity))


@dataclass
class SearchStats:
    """Recursion counters; ``calls[h]`` counts calls made with remaining depth ``h``."""

    calls: Counter = field(default_factory=Counter)
    cache_hits: int = 0

    @property
    def total_calls(self) -> int:
        return sum(self.calls.values())


class Deadline:
    def __init__(self, seconds=None):
        self.seconds = seconds
        self.stop = None if seconds is None else time.monotonic() + seconds

    def check(self):
        if self.stop is not None and time.monotonic() > self.stop:
            raise TimeLimitExceeded(f"time limit of {self.seconds}s exceeded")


def majority(counts) -> int:
    """Most frequent class; ties go to the smallest class index."""
    return int(np.argmax(counts))


def depth_one_children(view, candidates, parent_label):
    """Leaf labels and error counts of every depth-1 split in ``candidates``.

    Returns ``(errors, left_labels, right_labels, nonempty_children)`` arrays
    aligned with ``candidates``. An empty side is labeled ``parent_label``.
    """
    cands = np.asarray(candidates, dtype=np.int64)
    parent = view.class_counts
    right = view.feature_class_counts[:, cands]  # (C, m)
    left = parent[:, None] - right
    n_left = left.sum(axis=0)
    n_right = right.sum(axis=0)
    err = (n_left - left.max(axis=0)) + (n_right - right.max(axis=0))
    left_lab = np.where(n_left > 0, left.argmax(axis=0), parent_label)
    right_lab = np.where(n_right > 0, right.argmax(axis=0), parent_label)
    nonempty = (n_left > 0).astype(np.int64) + (n_right > 0)
    return err, left_lab, right_lab, nonempty


def rank_rows(scores: np.ndarray, k: int, tol: float) -> np.ndarray:
    """Row-wise top-``k`` column indices of ``scores`` (descending, ties by index).

    ``-inf`` entries are never selected; rows with fewer finite entries are
    padded with ``-1``.
    """
    m, d = scores.shape
    finite = np.isfinite(scores)
    q = np.where(finite, np.rint(np.where(finite, scores, 0.0) / tol), 0).astype(np.int64)
    shift = int(d).bit_length()
    key = np.where(finite, (-q << shift) + np.arange(d), np.iinfo(np.int64).max)
    k = min(k, d)
    part = np.argpartition(key, k - 1, axis=1)[:, :k] if k < d else np.tile(np.arange(d), (m, 1))
    order = np.take_along_axis(part, np.argsort(np.take_along_axis(key, part, axis=1), axis=1), axis=1)
    return np.where(np.take_along_axis(finite, order, axis=1), order, -1)


def child_tables(view, candidates):
    """Class counts and per-feature class counts of the 2k children of ``view``.

    Children are ordered ``(f0, 0), (f0, 1), (f1, 0), ...``. Returns
    ``(sizes (2k,), class_counts (2k, C), ones (2k, C, d))`` where ``ones``
    counts rows with feature value 1.
    """
    base = view.base
    cands = np.asarray(candidates, dtype=np.int64)
    rows = view.row_indices()
    Xv = base.X[rows].astype(np.float32)
    Yc = (base.y[rows][:, None] == np.arange(base.n_classes)).astype(np.float32)
    m, k, C = len(rows), len(cands), base.n_classes
    A = (Xv[:, cands, None] * Yc[:, None, :]).reshape(m, k * C)
    right = np.rint(A.T @ Xv).astype(np.int64).reshape(k, C, base.d)
    left = view.feature_class_counts[None, :, :] - right
    ones = np.empty((2 * k, C, base.d), dtype=np.int64)
    ones[0::2], ones[1::2] = left, right
    right_cc = view.feature_class_counts[:, cands].T  # (k, C)
    cc = np.empty((2 * k, C), dtype=np.int64)
    cc[0::2], cc[1::2] = view.class_counts[None, :] - right_cc, right_cc
    return cc.sum(axis=1), cc, ones
