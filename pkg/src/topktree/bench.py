"""Experiment harness: accuracy sweeps, training-time scaling, k-plateau."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import synth
from .dataset import (
    BinaryDataset,
    atomic_write_text,
    binarize,
    load_csv,
    load_schema,
    read_binary_csv,
    train_test_split,
)
from .impurity import ImpurityKind
from .opt import train_opt_topk
from .search import SearchStats, TimeLimitExceeded, TrainConfig
from .topk import train_topk
from .tree import accuracy

log = logging.getLogger(__name__)

RESULT_FIELDS = ["dataset", "k", "depth", "split", "train_acc", "test_acc", "train_time_ms", "status"]
SCALING_FIELDS = RESULT_FIELDS + ["size", "calls"]
ENGINES = ("plain", "opt")


@dataclass
class BenchConfig:
    datasets: list
    ks: list
    depths: list
    splits: int = 10
    seed: int = 0
    fraction: float = 0.8
    impurity: str = "entropy"
    engine: str = "opt"
    time_limit: float = 600.0

    def __post_init__(self):
        for name in ("datasets", "ks", "depths"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if any(int(k) < 1 for k in self.ks):
            raise ValueError("every k must be >= 1")
        if any(int(h) < 0 for h in self.depths):
            raise ValueError("every depth must be >= 0")
        if self.splits < 1:
            raise ValueError("splits must be >= 1")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        ImpurityKind.parse(self.impurity)

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path) as fh:
            obj = json.load(fh)
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class BenchRecord:
    dataset: str
    k: int
    depth: int
    split: int
    train_acc: float | None
    test_acc: float | None
    train_time_ms: float | None
    status: str
    size: int | None = None
    calls: int | None = None


def load_dataset(entry, base_dir=None) -> tuple[str, BinaryDataset]:
    """Resolve one ``datasets`` entry of a config.

    Entries are a path to a binarized CSV, ``{"raw": csv, "schema": json,
    "max_features": 100}``, or ``{"synth": kind, "h", "K", "eps", "n", "seed"}``.
    """
    base_dir = Path(base_dir or ".")
    if isinstance(entry, str):
        path = base_dir / entry
        return path.stem, read_binary_csv(path)
    if "synth" in entry:
        spec = synth.SynthSpec(entry["synth"], entry["h"], entry["K"], entry["eps"])
        ds = synth.sample(spec, entry["n"], entry.get("seed", 0))
        name = entry.get("name", f"{spec.kind}-h{spec.h}-K{spec.K}")
        return name, ds
    if "raw" in entry:
        path = base_dir / entry["raw"]
        raw = load_csv(path, load_schema(base_dir / entry["schema"]))
        ds, _ = binarize(raw, entry.get("max_features", 100))
        return entry.get("name", path.stem), ds
    raise ValueError(f"cannot interpret dataset entry {entry!r}")


def fit(ds, cfg: TrainConfig, engine="opt", time_limit=None, stats=None):
    if engine == "plain":
        return train_topk(ds, cfg, stats=stats, time_limit=time_limit)
    return train_opt_topk(ds, cfg, stats=stats, time_limit=time_limit)


def _cell(name, train, test, k, depth, split, impurity, engine, time_limit, size=None):
    cfg = TrainConfig(k, depth, impurity)
    stats = SearchStats()
    try:
        t0 = time.perf_counter()
        tree = fit(train, cfg, engine, time_limit, stats)
        elapsed = (time.perf_counter() - t0) * 1e3
    except TimeLimitExceeded:
        log.info("%s k=%d depth=%d split=%d: timeout", name, k, depth, split)
        return BenchRecord(name, k, depth, split, None, None, None, "timeout", size, None)
    except Exception:  # isolate the cell; caller reports a nonzero exit
        log.exception("%s k=%d depth=%d split=%d failed", name, k, depth, split)
        return BenchRecord(name, k, depth, split, None, None, None, "error", size, None)
    test_acc = accuracy(tree, test) if test is not None and test.n else None
    return BenchRecord(
        name, k, depth, split, accuracy(tree, train), test_acc, elapsed, "ok",
        size, stats.total_calls,
    )


def run_accuracy_sweep(cfg: BenchConfig, base_dir=None) -> list[BenchRecord]:
    records = []
    for entry in cfg.datasets:
        name, ds = load_dataset(entry, base_dir)
        for split in range(cfg.splits):
            train, test = train_test_split(ds, cfg.fraction, cfg.seed + split)
            for depth in cfg.depths:
                for k in cfg.ks:
                    records.append(_cell(
                        name, train, test, int(k), int(depth), split,
                        cfg.impurity, cfg.engine, cfg.time_limit,
                    ))
    return records


def run_scaling_features(ds, depths, feature_counts, ks, time_limit, *, name="data",
                         engine="opt", impurity="entropy") -> list[BenchRecord]:
    """Train on the first ``c`` features, all rows, for each count ``c``."""
    if any(c > ds.d or c < 1 for c in feature_counts):
        raise ValueError(f"feature counts must lie in [1, {ds.d}]")
    records = []
    for c in feature_counts:
        sub = ds.select_features(range(c))
        for depth in depths:
            for k in ks:
                records.append(_cell(name, sub, None, int(k), int(depth), 0,
                                     impurity, engine, time_limit, size=int(c)))
    return records


def run_scaling_samples(ds, depths, sample_counts, ks, time_limit, *, name="data",
                        engine="opt", impurity="entropy", seed=0) -> list[BenchRecord]:
    """Train on row prefixes of one seeded shuffle, all features, for each count."""
    if any(c > ds.n or c < 1 for c in sample_counts):
        raise ValueError(f"sample counts must lie in [1, {ds.n}]")
    order = np.random.default_rng(seed).permutation(ds.n)
    records = []
    for c in sample_counts:
        sub = ds.subset(order[:c])
        for depth in depths:
            for k in ks:
                records.append(_cell(name, sub, None, int(k), int(depth), 0,
                                     impurity, engine, time_limit, size=int(c)))
    return records


def run_k_plateau(ds, ks, depth=3, splits=10, *, name="data", seed=0, fraction=0.8,
                  engine="opt", impurity="entropy", time_limit=600.0) -> list[BenchRecord]:
    records = []
    for split in range(splits):
        train, test = train_test_split(ds, fraction, seed + split)
        for k in ks:
            records.append(_cell(name, train, test, int(k), int(depth), split,
                                 impurity, engine, time_limit))
    return records


def aggregate(records) -> list[dict]:
    """Mean and standard deviation over splits per (dataset, k, depth)."""
    groups: dict = {}
    for r in records:
        if r.status == "ok":
            groups.setdefault((r.dataset, r.k, r.depth), []).append(r)
    out = []
    for (name, k, depth), rs in sorted(groups.items()):
        tr = np.array([r.train_acc for r in rs])
        te = np.array([r.test_acc for r in rs if r.test_acc is not None])
        out.append({
            "dataset": name, "k": k, "depth": depth, "splits": len(rs),
            "train_mean": tr.mean(), "train_std": tr.std(),
            "test_mean": te.mean() if te.size else None,
            "test_std": te.std() if te.size else None,
            "time_ms_mean": float(np.mean([r.train_time_ms for r in rs])),
        })
    return out


def records_to_csv(records, scaling=False) -> str:
    fields = SCALING_FIELDS if scaling else RESULT_FIELDS
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in sorted(records, key=lambda r: (r.dataset, r.size or 0, r.depth, r.k, r.split)):
        row = asdict(r)
        writer.writerow({f: ("" if row[f] is None else row[f]) for f in fields})
    return buf.getvalue()


def write_records(records, path, scaling=False):
    atomic_write_text(path, records_to_csv(records, scaling))


def read_records(path) -> list[BenchRecord]:
    def num(v, cast):
        return None if v in ("", None) else cast(v)

    with open(path, newline="") as fh:
        return [
            BenchRecord(
                row["dataset"], int(row["k"]), int(row["depth"]), int(row["split"]),
                num(row["train_acc"], float), num(row["test_acc"], float),
                num(row["train_time_ms"], float), row["status"],
                num(row.get("size"), int), num(row.get("calls"), int),
            )
            for row in csv.DictReader(fh)
        ]
