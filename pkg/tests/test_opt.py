import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topktree.dataset import BinaryDataset
from topktree.impurity import ImpurityKind
from topktree.opt import NO_TREE, Cache, CacheEntry, cache_lookup, train_opt_topk
from topktree.oracle import best_error_in_space
from topktree.search import SearchStats, TimeLimitExceeded, TrainConfig
from topktree.topk import train_topk
from topktree.tree import Leaf, errors, is_non_redundant

from conftest import datasets

kinds = st.sampled_from(list(ImpurityKind))


def test_pure_view_is_a_leaf():
    ds = BinaryDataset([[0, 1], [1, 1], [1, 0]], [1, 1, 1])
    for ub in (0, 1, 3):
        assert train_opt_topk(ds, TrainConfig(2, 3), ub) == Leaf(1)


def test_zero_budget_without_a_perfect_tree():
    # duplicated rows with opposite labels: every tree errs at least once
    ds = BinaryDataset([[0, 1], [0, 1], [1, 0]], [0, 1, 1])
    assert best_error_in_space(ds, 2, 2, "entropy") == 1
    assert train_opt_topk(ds, TrainConfig(2, 2), ub=0) is NO_TREE
    assert errors(train_opt_topk(ds, TrainConfig(2, 2), ub=1), ds) == 1


def test_negative_budget_rejected():
    ds = BinaryDataset([[0], [1]], [0, 1])
    with pytest.raises(ValueError):
        train_opt_topk(ds, TrainConfig(1, 1), ub=-1)


def test_no_tree_is_falsy_singleton():
    assert not NO_TREE
    assert type(NO_TREE)() is NO_TREE


def test_cache_store_and_lookup():
    cache = Cache()
    key = (((0, 1),), 2)
    entry = CacheEntry(Leaf(0), 3, 1)
    cache.store(key, entry)
    assert cache_lookup(cache, key) is entry
    assert cache_lookup(cache, (((0, 1),), 1)) is None


def test_split_orders_share_one_entry():
    rng = np.random.default_rng(3)
    ds = BinaryDataset(rng.integers(0, 2, (80, 4)), rng.integers(0, 2, 80))
    cache, stats = Cache(), SearchStats()
    train_opt_topk(ds, TrainConfig(4, 3), cache=cache, stats=stats, batched=False)
    assert stats.cache_hits > 0
    (f, a), (g, b) = next(key[0] for key in cache._entries if len(key[0]) == 2)
    one = ds.view().restrict(f, a).restrict(g, b)
    two = ds.view().restrict(g, b).restrict(f, a)
    assert one.path == two.path
    assert (one.path, 1) in cache and len([k for k in cache._entries if k[0] == one.path]) == 1


def test_time_limit():
    rng = np.random.default_rng(0)
    ds = BinaryDataset(rng.integers(0, 2, (400, 30)), rng.integers(0, 2, 400))
    with pytest.raises(TimeLimitExceeded):
        train_opt_topk(ds, TrainConfig(8, 6), time_limit=0.01)


@given(ds=datasets(d_max=6, n_max=48), k=st.integers(1, 6), h=st.integers(0, 3), kind=kinds,
       batched=st.booleans())
def test_matches_plain_engine(ds, k, h, kind, batched):
    cfg = TrainConfig(k, h, kind)
    tree = train_opt_topk(ds, cfg, batched=batched)
    assert errors(tree, ds) == errors(train_topk(ds, cfg), ds)
    assert is_non_redundant(tree) and tree.depth() <= h


@given(ds=datasets(d_max=6, n_max=40), k=st.integers(1, 6), h=st.integers(0, 3), kind=kinds,
       slack=st.integers(-3, 3), batched=st.booleans())
def test_budget_soundness(ds, k, h, kind, slack, batched):
    best = best_error_in_space(ds, k, h, kind)
    ub = best + slack
    if ub < 0:
        return
    tree = train_opt_topk(ds, TrainConfig(k, h, kind), ub, batched=batched)
    if ub < best:
        assert tree is NO_TREE
    else:
        assert tree is not NO_TREE
        assert errors(tree, ds) == best <= ub


@given(ds=datasets(d_max=6, n_max=40), k=st.integers(1, 6), h=st.integers(1, 3), kind=kinds)
def test_shared_cache_across_rising_budgets(ds, k, h, kind):
    # NO_TREE entries stored under small budgets must not block larger ones
    cfg = TrainConfig(k, h, kind)
    best = best_error_in_space(ds, k, h, kind)
    cache = Cache()
    for ub in range(0, best + 2):
        tree = train_opt_topk(ds, cfg, ub, cache, batched=False)
        if ub < best:
            assert tree is NO_TREE
        else:
            assert errors(tree, ds) == best


@given(ds=datasets(d_max=6, n_max=40), k=st.integers(1, 6), h=st.integers(1, 3), kind=kinds)
def test_never_expands_more_than_plain(ds, k, h, kind):
    cfg = TrainConfig(k, h, kind)
    plain, opt = SearchStats(), SearchStats()
    train_topk(ds, cfg, stats=plain)
    train_opt_topk(ds, cfg, stats=opt, batched=False)
    for depth in range(h + 1):
        assert opt.calls[depth] <= plain.calls[depth]
