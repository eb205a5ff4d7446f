"""Top-k decision tree learning: from greedy (k=1) to optimal (k=d)."""
from .dataset import (
    BinarizationMap,
    BinaryDataset,
    DatasetView,
    RawDataset,
    binarize,
    load_csv,
    read_binary_csv,
    restrict,
    train_test_split,
    write_binary_csv,
)
from .impurity import ImpurityKind, feature_score, impurity_value, top_k_features
from .opt import NO_TREE, Cache, train_opt_topk
from .search import SearchStats, TimeLimitExceeded, TrainConfig
from .topk import leaf_label, train_topk
from .tree import Leaf, Node, accuracy, predict

__all__ = [
    "BinarizationMap", "BinaryDataset", "DatasetView", "RawDataset", "binarize", "load_csv",
    "read_binary_csv", "restrict", "train_test_split", "write_binary_csv", "ImpurityKind",
    "feature_score", "impurity_value", "top_k_features", "NO_TREE", "Cache", "train_opt_topk",
    "SearchStats", "TimeLimitExceeded", "TrainConfig", "leaf_label", "train_topk", "Leaf",
    "Node", "accuracy", "predict",
]
