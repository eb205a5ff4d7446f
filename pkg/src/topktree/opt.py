"""Opt-Top-k: Top-k with misclassification budgets and an itemset cache.

Returns a tree with the same training accuracy as :func:`topk.train_topk`,
but prunes candidates whose left subtree already uses up the best error
seen so far, and shares work between split orders that reach the same
itemset.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import BinaryDataset, DatasetView
from .impurity import SCORE_TOL, gains_from_counts, top_k_features
from .search import (
    Deadline,
    SearchStats,
    TrainConfig,
    child_tables,
    depth_one_children,
    majority,
    rank_rows,
)
from .tree import DecisionTree, Leaf, Node


class _NoTree:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_TREE"

    def __bool__(self):
        return False


NO_TREE = _NoTree()


@dataclass(frozen=True)
class CacheEntry:
    tree: object  # DecisionTree or NO_TREE
    ub: int
    errors: int | None = None


class Cache:
    """Map from ``(itemset, remaining depth)`` to :class:`CacheEntry`."""

    def __init__(self):
        self._entries: dict = {}

    def lookup(self, key):
        return self._entries.get(key)

    def store(self, key, entry: CacheEntry):
        self._entries[key] = entry

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries


def cache_lookup(cache: Cache, key):
    return cache.lookup(key)


def train_opt_topk(
    data,
    cfg: TrainConfig,
    ub: int | None = None,
    cache: Cache | None = None,
    *,
    stats: SearchStats | None = None,
    time_limit: float | None = None,
    batched: bool = True,
):
    """Best tree of the Top-k space with at most ``ub`` training errors, else ``NO_TREE``.

    ``ub`` defaults to the number of rows, which always admits a tree.
    ``batched`` solves nodes with one or two levels of depth left by vectorized
    counting over their top-k candidates; ``batched=False`` runs the plain
    budgeted loop everywhere. Both return trees with equal error.
    """
    view = data.view() if isinstance(data, BinaryDataset) else data
    if view.size == 0:
        raise ValueError("cannot train on an empty view")
    if ub is None:
        ub = view.size
    if ub < 0:
        raise ValueError("ub must be non-negative")
    solver = _Solver(cfg, cache if cache is not None else Cache(), stats, Deadline(time_limit),
                     batched)
    tree, _ = solver.solve(view, cfg.depth, int(ub))
    return tree


class _Solver:
    def __init__(self, cfg, cache, stats, deadline, batched=True):
        self.batched = batched
        self.k = cfg.k
        self.kind = cfg.impurity
        self.cache = cache
        self.stats = stats
        self.deadline = deadline

    def solve(self, view: DatasetView, depth: int, ub: int):
        self.deadline.check()
        if self.stats is not None:
            self.stats.calls[depth] += 1
        counts = view.class_counts
        label = majority(counts)
        leaf_err = int(view.size - counts[label])
        if depth == 0 or leaf_err == 0 or len(view.queried) == view.base.d:
            if leaf_err > ub:
                return NO_TREE, None
            return Leaf(label), leaf_err
        if ub < 0:
            return NO_TREE, None

        key = (view.path, depth)
        entry = self.cache.lookup(key)
        if entry is not None:
            if self.stats is not None:
                self.stats.cache_hits += 1
            if entry.tree is not NO_TREE:
                # cached trees are optimal for their key, so a miss here is final
                if entry.errors > ub:
                    return NO_TREE, None
                return entry.tree, entry.errors
            if ub <= entry.ub:
                return NO_TREE, None

        candidates = top_k_features(view, self.k, self.kind)
        if self.batched and depth == 1:
            best, best_err = self._stumps(view, candidates, label, ub)
        elif self.batched and depth == 2:
            best, best_err = self._depth_two(view, candidates, label, ub)
        else:
            best, best_err = self._search(view, depth, ub, candidates, label)
        self.cache.store(key, CacheEntry(best, ub, best_err))
        return best, best_err

    def _search(self, view, depth, ub, candidates, label):
        best, b_star = NO_TREE, ub + 1
        for f in candidates:
            left_tree, b_left = self._child(view.restrict(f, 0), depth - 1, b_star - 1, label)
            if left_tree is NO_TREE:
                continue
            if b_left > b_star:
                continue
            right_tree, b_right = self._child(
                view.restrict(f, 1), depth - 1, b_star - 1 - b_left, label
            )
            if right_tree is NO_TREE:
                continue
            if b_left + b_right < b_star:
                best, b_star = Node(f, left_tree, right_tree), b_left + b_right
            if b_left + b_right == 0:
                break
        return best, (b_star if best is not NO_TREE else None)

    def _child(self, view, depth, ub, parent_label):
        if view.size == 0:
            return (Leaf(parent_label), 0) if ub >= 0 else (NO_TREE, None)
        return self.solve(view, depth, ub)

    def _stumps(self, view, candidates, label, ub):
        # depth-1 nodes: both children are leaves, so the candidate loop
        # reduces to the first candidate (in score order) of minimum error
        err, left_lab, right_lab, nonempty = depth_one_children(view, candidates, label)
        if self.stats is not None:
            self.stats.calls[0] += int(nonempty.sum())
        i = int(np.argmin(err))
        if err[i] > ub:
            return NO_TREE, None
        f = candidates[i]
        return Node(int(f), Leaf(int(left_lab[i])), Leaf(int(right_lab[i]))), int(err[i])

    def _depth_two(self, view, candidates, label, ub):
        """All 2k depth-1 children of a depth-2 node, solved in one batch.

        Equivalent to running :meth:`_search` with depth 2: each child keeps
        the first of its own top-k stumps with minimum error, and the node
        keeps the first candidate with minimum total error within ``ub``.
        """
        base = view.base
        k = len(candidates)
        sizes, cc, ones = child_tables(view, candidates)
        child_labels = np.where(sizes > 0, cc.argmax(axis=1), label)
        leaf_err = sizes - cc.max(axis=1)
        free = np.broadcast_to(view.free_features, (2 * k, base.d)).copy()
        free[np.arange(2 * k), np.repeat(candidates, 2)] = False
        # children that stop at a leaf: empty, pure, or out of features
        stop = (sizes == 0) | (leaf_err == 0) | ~free.any(axis=1)
        if self.stats is not None:
            self.stats.calls[1] += int(np.count_nonzero(sizes))

        best_err = leaf_err.copy()
        stump = np.full((2 * k, 3), -1, dtype=np.int64)  # feature, left label, right label
        grow = np.flatnonzero(~stop)
        if grow.size:
            self.deadline.check()
            gains = gains_from_counts(self.kind, cc[grow], ones[grow].transpose(0, 2, 1))
            gains[~free[grow]] = -np.inf
            top = rank_rows(gains, self.k, SCORE_TOL)  # (g, k), -1 padded
            valid = top >= 0
            safe = np.where(valid, top, 0)
            right = np.take_along_axis(ones[grow], safe[:, None, :], axis=2)  # (g, C, k)
            left = cc[grow][:, :, None] - right
            n_left, n_right = left.sum(axis=1), right.sum(axis=1)
            err = (n_left - left.max(axis=1)) + (n_right - right.max(axis=1))
            err = np.where(valid, err, np.iinfo(np.int64).max)
            pick = err.argmin(axis=1)
            rows = np.arange(grow.size)
            best_err[grow] = err[rows, pick]
            parent_lab = child_labels[grow]
            stump[grow, 0] = safe[rows, pick]
            stump[grow, 1] = np.where(n_left[rows, pick] > 0, left.argmax(axis=1)[rows, pick], parent_lab)
            stump[grow, 2] = np.where(n_right[rows, pick] > 0, right.argmax(axis=1)[rows, pick], parent_lab)

        totals = best_err[0::2] + best_err[1::2]
        i = int(np.argmin(totals))
        if totals[i] > ub:
            return NO_TREE, None

        def subtree(j):
            if stump[j, 0] < 0:
                return Leaf(int(child_labels[j]))
            return Node(int(stump[j, 0]), Leaf(int(stump[j, 1])), Leaf(int(stump[j, 2])))

        tree = Node(int(candidates[i]), subtree(2 * i), subtree(2 * i + 1))
        return tree, int(totals[i])
