import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topktree.dataset import BinaryDataset
from topktree.impurity import ImpurityKind
from topktree.oracle import optimal_tree
from topktree.search import SearchStats, TimeLimitExceeded, TrainConfig
from topktree.synth import cube
from topktree.topk import leaf_label, train_topk
from topktree.tree import (
    Leaf,
    Node,
    accuracy,
    count_leaves,
    dumps,
    errors,
    is_non_redundant,
    loads,
    predict,
    predict_batch,
)

from conftest import datasets

XOR = BinaryDataset([[0, 0], [0, 1], [1, 0], [1, 1]], [0, 1, 1, 0])
XOR_TREE = Node(0, Node(1, Leaf(0), Leaf(1)), Node(1, Leaf(1), Leaf(0)))


@pytest.mark.parametrize("labels, expected", [([1, 1, 0], 1), ([0, 1], 0), ([2, 2, 2], 2)])
def test_leaf_label(labels, expected):
    ds = BinaryDataset(np.zeros((len(labels), 1)), labels)
    assert leaf_label(ds.view()) == expected


def test_leaf_label_of_empty_view():
    ds = BinaryDataset([[0], [0]], [0, 1])
    with pytest.raises(ValueError):
        leaf_label(ds.view().restrict(0, 1))


def test_xor_depth_two_is_exact():
    assert accuracy(train_topk(XOR, TrainConfig(1, 2)), XOR) == 1.0


def test_xor_depth_one_is_half():
    # both single-split trees misclassify one row per branch
    for f in (0, 1):
        assert accuracy(Node(f, Leaf(0), Leaf(0)), XOR) == 0.5
    assert accuracy(train_topk(XOR, TrainConfig(1, 1)), XOR) == 0.5


@given(ds=datasets(d_max=4, n_max=4, min_n=4))
def test_k_equal_d_matches_optimum_on_four_rows(ds):
    acc, _ = optimal_tree(ds, 2)
    assert accuracy(train_topk(ds, TrainConfig(ds.d, 2)), ds) == acc


def test_predict_examples():
    assert predict(Leaf(1), [0, 1, 0]) == 1
    assert predict(Node(0, Leaf(0), Leaf(1)), [1, 0]) == 1
    assert predict(XOR_TREE, [1, 0]) == 1
    with pytest.raises(IndexError):
        predict(Node(3, Leaf(0), Leaf(1)), [0, 1])


def test_accuracy_examples():
    two = BinaryDataset([[0], [1]], [1, 0])
    assert accuracy(Node(0, Leaf(1), Leaf(0)), two) == 1.0
    labels = BinaryDataset(np.zeros((4, 1)), [0, 0, 1, 1])
    assert accuracy(Leaf(0), labels) == 0.5
    skew = BinaryDataset(np.zeros((4, 1)), [0, 0, 0, 1])
    assert accuracy(Leaf(leaf_label(skew.view())), skew) == 0.75


def test_predict_batch_matches_predict():
    X = cube(4)
    tree = Node(2, Node(0, Leaf(1), Leaf(0)), Node(3, Leaf(0), Node(1, Leaf(1), Leaf(2))))
    assert predict_batch(tree, X).tolist() == [predict(tree, x) for x in X]


def test_json_round_trip():
    text = dumps(XOR_TREE)
    assert loads(text) == XOR_TREE
    assert dumps(loads(text)) == text
    assert '"split": 0' in text and '"leaf": 1' in text


def test_empty_child_gets_parent_majority():
    # feature 1 is constant; a split on it leaves its x=1 branch empty
    ds = BinaryDataset([[0, 0], [1, 0], [1, 0]], [1, 1, 0])
    tree = train_topk(ds, TrainConfig(2, 1, "gini"))
    assert isinstance(tree, Node)
    if tree.feature == 1:
        assert tree.right == Leaf(1)


def test_time_limit():
    rng = np.random.default_rng(0)
    ds = BinaryDataset(rng.integers(0, 2, (400, 30)), rng.integers(0, 2, 400))
    with pytest.raises(TimeLimitExceeded):
        train_topk(ds, TrainConfig(8, 6), time_limit=0.01)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(0, 2)
    with pytest.raises(ValueError):
        TrainConfig(1, -1)
    assert TrainConfig(1, 1, "sqrt").impurity is ImpurityKind.SQRT_KM


def test_recursion_count_two_two():
    X = cube(5)
    ds = BinaryDataset(X, X.sum(axis=1) % 2)
    stats = SearchStats()
    train_topk(ds, TrainConfig(2, 2), early_exit=False, stats=stats)
    assert stats.calls[0] == 16


kinds = st.sampled_from(list(ImpurityKind))


@given(ds=datasets(d_max=6, n_max=40), k=st.integers(1, 6), h=st.integers(0, 3), kind=kinds)
def test_trees_are_valid(ds, k, h, kind):
    tree = train_topk(ds, TrainConfig(k, h, kind))
    assert is_non_redundant(tree)
    assert tree.depth() <= h
    assert count_leaves(tree) <= 2**h
    assert train_topk(ds, TrainConfig(k, h, kind)) == tree


@given(ds=datasets(d_max=6, n_max=40), h=st.integers(0, 3), kind=kinds)
def test_training_error_non_increasing_in_k(ds, h, kind):
    errs = [errors(train_topk(ds, TrainConfig(k, h, kind)), ds) for k in range(1, ds.d + 2)]
    assert errs == sorted(errs, reverse=True)


@given(ds=datasets(d_max=6, n_max=40), k=st.integers(1, 4), kind=kinds)
def test_training_error_non_increasing_in_depth(ds, k, kind):
    errs = [errors(train_topk(ds, TrainConfig(k, h, kind)), ds) for h in range(0, 4)]
    assert errs == sorted(errs, reverse=True)


@given(ds=datasets(d_max=5, n_max=30), k=st.integers(1, 5), h=st.integers(0, 3), kind=kinds)
def test_early_exit_does_not_change_accuracy(ds, k, h, kind):
    a = errors(train_topk(ds, TrainConfig(k, h, kind)), ds)
    b = errors(train_topk(ds, TrainConfig(k, h, kind), early_exit=False), ds)
    assert a == b
