"""Brute-force ground truth for small instances.

Two independent enumerations of the Top-k search space are provided: a
recursive walk that tries every candidate root and every leaf label, and a
generate-and-filter pass that lists all non-redundant trees and keeps those
the Top-k recursion could have produced. ``optimal_tree`` ignores scores
entirely and searches every non-redundant tree.

Everything here works on plain index arrays rather than the packed bit
columns used by the learners.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .dataset import BinaryDataset, DatasetView, view_from_indices
from .impurity import top_k_features
from .tree import DecisionTree, Leaf, Node, encode


class OracleTooLarge(ValueError):
    pass


SPACE_MAX_D, SPACE_MAX_H = 12, 4
OPT_MAX_D, OPT_MAX_H = 8, 3
FILTER_MAX_TREES = 200_000


def _as_view(data) -> DatasetView:
    return data.view() if isinstance(data, BinaryDataset) else data


def _correct(y: np.ndarray, label: int) -> int:
    return int(np.count_nonzero(y == label))


def _better(cand, best):
    """Higher correct count wins; ties go to the lexicographically smaller encoding."""
    if best is None:
        return True
    if cand[0] != best[0]:
        return cand[0] > best[0]
    return encode(cand[1]) < encode(best[1])


def _best_constant(y, n_classes, fallback=0):
    best = None
    for c in range(n_classes):
        cand = (_correct(y, c), Leaf(c))
        if _better(cand, best):
            best = cand
    return best if y.size else (0, Leaf(fallback))


def best_in_space(data, k: int, h: int, kind) -> tuple[float, DecisionTree]:
    """Exact maximum training accuracy over the Top-k search space, with a witness."""
    view = _as_view(data)
    base = view.base
    if base.d > SPACE_MAX_D or h > SPACE_MAX_H:
        raise OracleTooLarge(f"best_in_space limited to d<={SPACE_MAX_D}, h<={SPACE_MAX_H}")
    rows = view.row_indices()
    if rows.size == 0:
        raise ValueError("empty view")

    def walk(rows, queried, depth):
        y = base.y[rows]
        if rows.size == 0:
            return (0, Leaf(0))
        free = [f for f in range(base.d) if f not in queried]
        if depth == 0 or not free:
            return _best_constant(y, base.n_classes)
        sub = DatasetView(base, view_from_indices(base, rows).rows, (), frozenset(queried))
        best = None
        for f in top_k_features(sub, k, kind):
            bit = base.X[rows, f].astype(bool)
            left = walk(rows[~bit], queried | {f}, depth - 1)
            right = walk(rows[bit], queried | {f}, depth - 1)
            cand = (left[0] + right[0], Node(f, left[1], right[1]))
            if _better(cand, best):
                best = cand
        return best

    correct, tree = walk(rows, frozenset(view.queried), h)
    return correct / rows.size, tree


def optimal_tree(data, h: int) -> tuple[float, DecisionTree]:
    """Exact optimum over every non-redundant tree of depth at most ``h``."""
    view = _as_view(data)
    base = view.base
    if base.d > OPT_MAX_D or h > OPT_MAX_H:
        raise OracleTooLarge(f"optimal_tree limited to d<={OPT_MAX_D}, h<={OPT_MAX_H}")
    rows = view.row_indices()
    if rows.size == 0:
        raise ValueError("empty view")

    def walk(rows, queried, depth):
        y = base.y[rows]
        best = _best_constant(y, base.n_classes)
        if depth == 0 or rows.size == 0:
            return best
        for f in range(base.d):
            if f in queried:
                continue
            bit = base.X[rows, f].astype(bool)
            left = walk(rows[~bit], queried | {f}, depth - 1)
            right = walk(rows[bit], queried | {f}, depth - 1)
            cand = (left[0] + right[0], Node(f, left[1], right[1]))
            if _better(cand, best):
                best = cand
        return best

    correct, tree = walk(rows, frozenset(view.queried), h)
    return correct / rows.size, tree


# --------------------------------------------------------------------------
# generate-and-filter cross-check
# --------------------------------------------------------------------------


def _shapes(features: frozenset, depth: int):
    """All non-redundant unlabeled trees (``None`` marks a leaf) of depth <= ``depth``."""
    yield None
    if depth == 0:
        return
    for f in sorted(features):
        rest = features - {f}
        subs = list(_shapes(rest, depth - 1))
        for left, right in product(subs, subs):
            yield (f, left, right)


def count_shapes(d: int, h: int) -> int:
    if h == 0 or d == 0:
        return 1
    s = count_shapes(d - 1, h - 1)
    return 1 + d * s * s


def _in_space(shape, base, rows, queried, depth, k, kind, memo) -> bool:
    if rows.size == 0:
        return shape is None
    free = base.d - len(queried)
    if depth == 0 or free == 0:
        return shape is None
    if shape is None:
        return False
    f, left, right = shape
    key = (rows.tobytes(), queried)
    if key not in memo:
        sub = DatasetView(base, view_from_indices(base, rows).rows, (), frozenset(queried))
        memo[key] = set(top_k_features(sub, k, kind))
    if f not in memo[key]:
        return False
    bit = base.X[rows, f].astype(bool)
    q = queried | {f}
    return _in_space(left, base, rows[~bit], q, depth - 1, k, kind, memo) and _in_space(
        right, base, rows[bit], q, depth - 1, k, kind, memo
    )


def _label_leaves(shape, base, rows):
    if shape is None:
        return _best_constant(base.y[rows], base.n_classes)
    f, left, right = shape
    bit = base.X[rows, f].astype(bool)
    lc, lt = _label_leaves(left, base, rows[~bit])
    rc, rt = _label_leaves(right, base, rows[bit])
    return lc + rc, Node(f, lt, rt)


def best_in_space_by_filter(data, k: int, h: int, kind) -> tuple[float, DecisionTree]:
    """Same quantity as :func:`best_in_space`, computed by listing every tree first."""
    view = _as_view(data)
    base = view.base
    free = frozenset(range(base.d)) - view.queried
    if count_shapes(len(free), h) > FILTER_MAX_TREES:
        raise OracleTooLarge("too many trees to enumerate")
    rows = view.row_indices()
    if rows.size == 0:
        raise ValueError("empty view")
    best = None
    memo: dict = {}
    for shape in _shapes(free, h):
        if not _in_space(shape, base, rows, frozenset(view.queried), h, k, kind, memo):
            continue
        cand = _label_leaves(shape, base, rows)
        if _better(cand, best):
            best = cand
    return best[0] / rows.size, best[1]


def best_error_in_space(data, k: int, h: int, kind) -> int:
    """Minimum number of training errors achievable in the Top-k space."""
    view = _as_view(data)
    acc, _ = best_in_space(view, k, h, kind)
    return int(round(view.size * (1 - acc)))
