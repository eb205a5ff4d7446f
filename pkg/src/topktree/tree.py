"""Binary decision trees: prediction, validation and JSON (de)serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Leaf:
    label: int

    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class Node:
    """Split on ``feature``; ``left`` handles x[feature] == 0."""

    feature: int
    left: "DecisionTree"
    right: "DecisionTree"

    def depth(self) -> int:
        return 1 + max(self.left.depth(), self.right.depth())


DecisionTree = Union[Leaf, Node]


def predict(tree: DecisionTree, x) -> int:
    while isinstance(tree, Node):
        if not 0 <= tree.feature < len(x):
            raise IndexError(f"feature {tree.feature} out of range for input of length {len(x)}")
        tree = tree.right if x[tree.feature] else tree.left
    return tree.label


def predict_batch(tree: DecisionTree, X) -> np.ndarray:
    X = np.asarray(X)
    out = np.empty(X.shape[0], dtype=np.int64)

    def walk(t, rows):
        if rows.size == 0:
            return
        if isinstance(t, Leaf):
            out[rows] = t.label
            return
        if not 0 <= t.feature < X.shape[1]:
            raise IndexError(f"feature {t.feature} out of range for {X.shape[1]} features")
        bit = X[rows, t.feature].astype(bool)
        walk(t.left, rows[~bit])
        walk(t.right, rows[bit])

    walk(tree, np.arange(X.shape[0]))
    return out


def accuracy(tree: DecisionTree, data) -> float:
    """Fraction of rows of a ``BinaryDataset`` or ``DatasetView`` predicted correctly."""
    X, y = _rows_of(data)
    if len(y) == 0:
        raise ValueError("accuracy of an empty dataset")
    return float(np.mean(predict_batch(tree, X) == y))


def errors(tree: DecisionTree, data) -> int:
    X, y = _rows_of(data)
    return int(np.sum(predict_batch(tree, X) != y))


def _rows_of(data):
    if hasattr(data, "row_indices"):
        idx = data.row_indices()
        return data.base.X[idx], data.base.y[idx]
    return data.X, data.y


def is_non_redundant(tree: DecisionTree, seen=frozenset()) -> bool:
    if isinstance(tree, Leaf):
        return True
    if tree.feature in seen:
        return False
    seen = seen | {tree.feature}
    return is_non_redundant(tree.left, seen) and is_non_redundant(tree.right, seen)


def count_leaves(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return count_leaves(tree.left) + count_leaves(tree.right)


def to_obj(tree: DecisionTree):
    if isinstance(tree, Leaf):
        return {"leaf": int(tree.label)}
    return {"split": int(tree.feature), "left": to_obj(tree.left), "right": to_obj(tree.right)}


def from_obj(obj) -> DecisionTree:
    if "leaf" in obj:
        return Leaf(int(obj["leaf"]))
    return Node(int(obj["split"]), from_obj(obj["left"]), from_obj(obj["right"]))


def dumps(tree: DecisionTree, **kw) -> str:
    return json.dumps(to_obj(tree), **kw)


def loads(text: str) -> DecisionTree:
    return from_obj(json.loads(text))


def encode(tree: DecisionTree) -> str:
    """Compact canonical string, used to order witness trees deterministically."""
    if isinstance(tree, Leaf):
        return f"L{tree.label}"
    return f"({tree.feature} {encode(tree.left)} {encode(tree.right)})"
