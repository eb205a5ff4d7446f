"""Reference Top-k learner.

At every node the ``k`` best-scoring features are tried as the root, both
subtrees are grown recursively with one less unit of depth, and the most
accurate candidate on the node's rows is kept.
"""
from __future__ import annotations

import numpy as np

from .dataset import BinaryDataset, DatasetView
from .impurity import top_k_features
from .search import Deadline, SearchStats, TrainConfig, depth_one_children, majority
from .tree import DecisionTree, Leaf, Node, accuracy, predict  # noqa: F401  (re-exported)


def leaf_label(view: DatasetView) -> int:
    if view.size == 0:
        raise ValueError("leaf label of an empty view")
    return majority(view.class_counts)


def train_topk(
    data,
    cfg: TrainConfig,
    *,
    early_exit: bool = True,
    stats: SearchStats | None = None,
    time_limit: float | None = None,
) -> DecisionTree:
    """Grow the most accurate tree in the Top-k search space of ``data``.

    ``early_exit=False`` keeps splitting pure nodes (only depth and feature
    exhaustion stop the recursion), which makes the call count exactly
    ``(2k)^h`` on instances with no empty branches.
    """
    view = data.view() if isinstance(data, BinaryDataset) else data
    if view.size == 0:
        raise ValueError("cannot train on an empty view")
    tree, _ = _Grower(cfg, early_exit, stats, Deadline(time_limit)).grow(view, cfg.depth)
    return tree


class _Grower:
    def __init__(self, cfg, early_exit, stats, deadline):
        self.k = cfg.k
        self.kind = cfg.impurity
        self.early_exit = early_exit
        self.stats = stats
        self.deadline = deadline

    def grow(self, view: DatasetView, depth: int) -> tuple[DecisionTree, int]:
        self.deadline.check()
        if self.stats is not None:
            self.stats.calls[depth] += 1
        counts = view.class_counts
        label = majority(counts)
        leaf_err = int(view.size - counts[label])
        if depth == 0 or (self.early_exit and leaf_err == 0) or len(view.queried) == view.base.d:
            return Leaf(label), leaf_err

        candidates = top_k_features(view, self.k, self.kind)
        if depth == 1:
            return self._best_stump(view, candidates, label)

        best, best_err, best_f = None, None, None
        for f in candidates:
            left_tree, left_err = self._child(view.restrict(f, 0), depth - 1, label)
            right_tree, right_err = self._child(view.restrict(f, 1), depth - 1, label)
            err = left_err + right_err
            if best is None or err < best_err or (err == best_err and f < best_f):
                best, best_err, best_f = Node(f, left_tree, right_tree), err, f
        return best, best_err

    def _child(self, view, depth, parent_label):
        if view.size == 0:
            return Leaf(parent_label), 0
        return self.grow(view, depth)

    def _best_stump(self, view, candidates, label):
        err, left_lab, right_lab, nonempty = depth_one_children(view, candidates, label)
        if self.stats is not None:
            self.stats.calls[0] += int(nonempty.sum())
        cands = np.asarray(candidates)
        # min error, then smallest feature index
        i = int(np.lexsort((cands, err))[0])
        tree = Node(int(cands[i]), Leaf(int(left_lab[i])), Leaf(int(right_lab[i])))
        return tree, int(err[i])
