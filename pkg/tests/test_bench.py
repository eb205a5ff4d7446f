import json

import numpy as np
import pytest

from topktree import bench
from topktree.dataset import BinaryDataset, write_binary_csv
from topktree.synth import SynthSpec, sample


@pytest.fixture
def tiny(tmp_path):
    ds = sample(SynthSpec("parity_mix", 2, 3, 0.1), 120, 0)
    write_binary_csv(ds, tmp_path / "tiny.csv")
    return tmp_path


def test_single_cell(tiny):
    cfg = bench.BenchConfig(["tiny.csv"], [1], [1], splits=1)
    (rec,) = bench.run_accuracy_sweep(cfg, tiny)
    assert rec.status == "ok" and rec.dataset == "tiny"
    assert 0 <= rec.train_acc <= 1 and 0 <= rec.test_acc <= 1


def test_larger_k_never_trains_worse(tiny):
    cfg = bench.BenchConfig(["tiny.csv"], [1, 2, 4], [1, 2, 3], splits=3)
    recs = bench.run_accuracy_sweep(cfg, tiny)
    by = {(r.split, r.depth, r.k): r.train_acc for r in recs}
    for split in range(3):
        for depth in (1, 2, 3):
            accs = [by[split, depth, k] for k in (1, 2, 4)]
            assert accs == sorted(accs)


def test_reproducible(tiny):
    cfg = bench.BenchConfig(["tiny.csv"], [1, 2], [2], splits=2, engine="plain")
    a = bench.run_accuracy_sweep(cfg, tiny)
    b = bench.run_accuracy_sweep(cfg, tiny)
    assert [(r.train_acc, r.test_acc) for r in a] == [(r.train_acc, r.test_acc) for r in b]


def test_timeout_is_isolated():
    rng = np.random.default_rng(0)
    ds = BinaryDataset(rng.integers(0, 2, (5000, 40)), rng.integers(0, 2, 5000))
    recs = bench.run_scaling_features(ds, [1, 7], [40], [8], time_limit=0.05)
    status = {r.depth: r.status for r in recs}
    assert status == {1: "ok", 7: "timeout"}
    slow = next(r for r in recs if r.status == "timeout")
    assert slow.train_acc is None and slow.train_time_ms is None


def test_scaling_records(tiny):
    ds = sample(SynthSpec("parity_mix", 2, 4, 0.1), 200, 1)
    recs = bench.run_scaling_features(ds, [2], [1, 3, ds.d], [1, 2], 60)
    assert sorted({r.size for r in recs}) == [1, 3, ds.d]
    recs = bench.run_scaling_samples(ds, [2], [50, 100, 200], [2], 60)
    assert [r.size for r in recs] == [50, 100, 200]
    with pytest.raises(ValueError):
        bench.run_scaling_samples(ds, [2], [500], [2], 60)


def test_k_plateau_full_k_is_non_decreasing():
    ds = sample(SynthSpec("monotone_mix", 4, 4, 0.1), 300, 2)
    recs = bench.run_k_plateau(ds, list(range(1, ds.d + 1)), depth=3, splits=2)
    for split in range(2):
        accs = [r.train_acc for r in recs if r.split == split]
        assert accs == sorted(accs)


def test_csv_round_trip(tiny, tmp_path):
    cfg = bench.BenchConfig(["tiny.csv"], [1, 2], [1], splits=2)
    recs = bench.run_accuracy_sweep(cfg, tiny)
    bench.write_records(recs, tmp_path / "out.csv")
    text = (tmp_path / "out.csv").read_text()
    assert text.splitlines()[0] == "dataset,k,depth,split,train_acc,test_acc,train_time_ms,status"
    back = bench.read_records(tmp_path / "out.csv")
    assert [(r.k, r.split, r.train_acc) for r in back] == sorted(
        [(r.k, r.split, r.train_acc) for r in recs], key=lambda t: (t[0], t[1]))


def test_aggregate():
    recs = [bench.BenchRecord("d", 1, 2, s, 0.5 + s / 10, 0.4, 1.0, "ok") for s in range(3)]
    recs.append(bench.BenchRecord("d", 1, 2, 3, None, None, None, "timeout"))
    (row,) = bench.aggregate(recs)
    assert row["splits"] == 3
    assert row["train_mean"] == pytest.approx(0.6)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        bench.BenchConfig([], [1], [1])
    with pytest.raises(ValueError):
        bench.BenchConfig(["a"], [1], [1], time_limit=0)
    with pytest.raises(ValueError):
        bench.BenchConfig(["a"], [0], [1])
    (tmp_path / "c.json").write_text(json.dumps({"datasets": ["a"], "ks": [1], "depths": [1],
                                                 "colour": "red"}))
    with pytest.raises(ValueError, match="colour"):
        bench.BenchConfig.from_json(tmp_path / "c.json")


def test_synth_dataset_entry():
    name, ds = bench.load_dataset({"synth": "parity_mix", "h": 2, "K": 3, "eps": 0.1, "n": 50})
    assert name == "parity_mix-h2-K3" and ds.n == 50 and ds.d == 4
