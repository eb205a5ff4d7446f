import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topktree.dataset import BinaryDataset
from topktree.impurity import ImpurityKind
from topktree.oracle import (
    OracleTooLarge,
    best_in_space,
    best_in_space_by_filter,
    count_shapes,
    optimal_tree,
)
from topktree.search import TrainConfig
from topktree.topk import train_topk
from topktree.tree import accuracy, is_non_redundant

from conftest import datasets

kinds = st.sampled_from(list(ImpurityKind))


def test_depth_zero_is_best_constant():
    ds = BinaryDataset(np.zeros((5, 2)), [1, 1, 0, 1, 0])
    acc, tree = best_in_space(ds, 2, 0, "entropy")
    assert acc == 0.6 and tree.label == 1


def test_xor_optimum():
    ds = BinaryDataset([[0, 0], [0, 1], [1, 0], [1, 1]], [0, 1, 1, 0])
    assert optimal_tree(ds, 2)[0] == 1.0


def test_pure_at_depth_zero():
    ds = BinaryDataset([[0], [1], [1]], [2, 2, 2])
    assert optimal_tree(ds, 0)[0] == 1.0


def test_size_guards():
    big = BinaryDataset(np.zeros((2, 13)), [0, 1])
    with pytest.raises(OracleTooLarge):
        best_in_space(big, 1, 2, "gini")
    with pytest.raises(OracleTooLarge):
        optimal_tree(BinaryDataset(np.zeros((2, 9)), [0, 1]), 2)
    with pytest.raises(OracleTooLarge):
        optimal_tree(BinaryDataset(np.zeros((2, 3)), [0, 1]), 4)


def test_shape_count():
    # d=2, h=2: a leaf, or a root over (leaf | split on the other feature) twice
    assert count_shapes(2, 2) == 1 + 2 * 2 * 2
    assert count_shapes(3, 0) == 1


@given(ds=datasets(d_max=6, n_max=40), h=st.integers(0, 3), kind=kinds)
def test_greedy_is_the_k1_space(ds, h, kind):
    acc, _ = best_in_space(ds, 1, h, kind)
    assert accuracy(train_topk(ds, TrainConfig(1, h, kind)), ds) == acc


@given(ds=datasets(d_max=5, n_max=32), k=st.integers(1, 5), h=st.integers(0, 3), kind=kinds)
def test_two_enumerations_agree(ds, k, h, kind):
    a, ta = best_in_space(ds, k, h, kind)
    b, tb = best_in_space_by_filter(ds, k, h, kind)
    assert a == b
    assert accuracy(ta, ds) == a and accuracy(tb, ds) == b


@given(ds=datasets(d_max=5, n_max=32), h=st.integers(0, 3), kind=kinds)
def test_full_space_is_optimal(ds, h, kind):
    assert best_in_space(ds, ds.d, h, kind)[0] == optimal_tree(ds, h)[0]


@given(ds=datasets(d_max=5, n_max=32), kind=kinds)
def test_monotone_in_k_and_h(ds, kind):
    grid = [[best_in_space(ds, k, h, kind)[0] for h in range(4)] for k in range(1, ds.d + 1)]
    g = np.array(grid)
    assert np.all(np.diff(g, axis=0) >= 0)
    assert np.all(np.diff(g, axis=1) >= 0)


@given(ds=datasets(d_max=5, n_max=32), k=st.integers(1, 5), h=st.integers(0, 3), kind=kinds)
def test_witnesses_are_valid(ds, k, h, kind):
    for acc, tree in (best_in_space(ds, k, h, kind), optimal_tree(ds, h)):
        assert is_non_redundant(tree)
        assert tree.depth() <= h
        assert accuracy(tree, ds) == acc
