"""Raw CSV loading, binarization, train/test splits and row-subset views.

Binary feature columns are stored column-major as packed ``uint64`` words so
that counting the rows of a subset that satisfy a feature is a handful of
AND + popcount operations per feature.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files."""


class ParseError(DataError):
    pass


class SchemaError(DataError):
    pass


class ConfigError(ValueError):
    pass


CATEGORICAL = "categorical"
NUMERIC = "numeric"
LABEL = "label"


@dataclass(frozen=True)
class RawColumn:
    name: str
    kind: str
    values: tuple


@dataclass(frozen=True)
class RawDataset:
    columns: tuple[RawColumn, ...]
    labels: np.ndarray
    classes: tuple[str, ...]

    def __post_init__(self):
        n = len(self.labels)
        if n < 1:
            raise DataError("no rows")
        for col in self.columns:
            if len(col.values) != n:
                raise DataError(f"column {col.name!r} has {len(col.values)} rows, expected {n}")

    @property
    def n(self) -> int:
        return len(self.labels)


def _canonical_labels(raw_labels):
    classes: dict[str, int] = {}
    out = np.empty(len(raw_labels), dtype=np.int64)
    for i, lab in enumerate(raw_labels):
        out[i] = classes.setdefault(lab, len(classes))
    return out, tuple(classes)


def load_schema(path) -> dict[str, str]:
    with open(path) as fh:
        schema = json.load(fh)
    if not isinstance(schema, dict):
        raise SchemaError("schema must be a JSON object mapping column name to kind")
    for name, kind in schema.items():
        if kind not in (CATEGORICAL, NUMERIC, LABEL):
            raise SchemaError(f"column {name!r}: unknown kind {kind!r}")
    if list(schema.values()).count(LABEL) != 1:
        raise SchemaError("schema must declare exactly one label column")
    return schema


def load_csv(path, schema: dict[str, str]) -> RawDataset:
    """Read a raw CSV file whose columns are declared in ``schema``.

    Class labels are mapped to ``0..C-1`` in order of first appearance.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: missing header row") from None
        for name in schema:
            if name not in header:
                raise SchemaError(f"unknown column in schema: {name!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            rows.append([c.strip() for c in row])
    if not rows:
        raise DataError("no rows")

    label_name = next(name for name, kind in schema.items() if kind == LABEL)
    label_idx = header.index(label_name)
    labels, classes = _canonical_labels([r[label_idx] for r in rows])

    columns = []
    for j, name in enumerate(header):
        kind = schema.get(name)
        if kind is None or kind == LABEL:
            continue
        values = [r[j] for r in rows]
        if kind == NUMERIC:
            try:
                values = [float(v) for v in values]
            except ValueError as exc:
                bad = next(i for i, v in enumerate(values) if not _is_float(v))
                raise ParseError(f"{path}: row {bad + 2}: column {name!r}: {exc}") from None
        columns.append(RawColumn(name, kind, tuple(values)))
    return RawDataset(tuple(columns), labels, classes)


def _is_float(s) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# --------------------------------------------------------------------------
# Binary dataset and views
# --------------------------------------------------------------------------


def pack_columns(columns: np.ndarray) -> np.ndarray:
    """Pack a boolean ``(m, n)`` array row-wise into ``(m, ceil(n/64))`` uint64 words."""
    columns = np.ascontiguousarray(columns, dtype=bool)
    m, n = columns.shape
    n_words = max(1, -(-n // 64))
    packed = np.packbits(columns, axis=1, bitorder="little")
    padded = np.zeros((m, n_words * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view(np.uint64).reshape(m, n_words)


def popcount(words: np.ndarray, axis=-1) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=axis, dtype=np.int64)


class BinaryDataset:
    """Immutable n x d binary feature matrix with integer class labels."""

    def __init__(self, X, y, feature_names=None, n_classes=None):
        X = np.asarray(X)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        if X.shape[0] != y.shape[0]:
            raise DataError("feature matrix and labels disagree on row count")
        if X.size and not np.isin(X, (0, 1)).all():
            raise DataError("feature cells must be 0 or 1")
        if y.size and y.min() < 0:
            raise DataError("labels must be non-negative integers")
        self.X = np.ascontiguousarray(X, dtype=np.uint8)
        self.X.setflags(write=False)
        self.y = y.copy()
        self.y.setflags(write=False)
        self.n, self.d = self.X.shape
        if n_classes is None:
            n_classes = int(y.max()) + 1 if y.size else 1
        self.n_classes = max(int(n_classes), 2)
        if feature_names is None:
            feature_names = [f"x{i}" for i in range(self.d)]
        if len(feature_names) != self.d:
            raise DataError("feature_names length must equal d")
        self.feature_names = tuple(feature_names)

        self.bits = pack_columns(self.X.T.astype(bool))
        self.class_bits = pack_columns(
            np.stack([self.y == c for c in range(self.n_classes)])
        )
        self.all_rows = pack_columns((np.ones(self.n, dtype=bool),))[0]
        for a in (self.bits, self.class_bits, self.all_rows):
            a.setflags(write=False)

    def __repr__(self):
        return f"BinaryDataset(n={self.n}, d={self.d}, classes={self.n_classes})"

    def __len__(self):
        return self.n

    def view(self) -> "DatasetView":
        return DatasetView(self, self.all_rows)

    def subset(self, rows) -> "BinaryDataset":
        rows = np.asarray(rows)
        return BinaryDataset(self.X[rows], self.y[rows], self.feature_names, self.n_classes)

    def select_features(self, features) -> "BinaryDataset":
        features = list(features)
        return BinaryDataset(
            self.X[:, features],
            self.y,
            [self.feature_names[f] for f in features],
            self.n_classes,
        )


@dataclass(frozen=True, eq=False)
class DatasetView:
    """Rows of ``base`` reachable along a branch path.

    ``path`` is the sorted tuple of ``(feature, bit)`` assignments made so far
    (the itemset); ``queried`` is its feature set.
    """

    base: BinaryDataset
    rows: np.ndarray
    path: tuple[tuple[int, int], ...] = ()
    queried: frozenset = field(default_factory=frozenset)

    @cached_property
    def size(self) -> int:
        return int(popcount(self.rows))

    def __len__(self):
        return self.size

    @cached_property
    def class_counts(self) -> np.ndarray:
        return popcount(self.base.class_bits & self.rows)

    @cached_property
    def feature_class_counts(self) -> np.ndarray:
        """``(C, d)`` counts of rows per class having feature value 1."""
        masked = self.base.class_bits & self.rows
        return popcount(self.base.bits[None, :, :] & masked[:, None, :])

    @property
    def free_features(self) -> np.ndarray:
        mask = np.ones(self.base.d, dtype=bool)
        if self.queried:
            mask[list(self.queried)] = False
        return mask

    def row_indices(self) -> np.ndarray:
        bits = np.unpackbits(self.rows.view(np.uint8), bitorder="little")[: self.base.n]
        return np.flatnonzero(bits)

    def labels(self) -> np.ndarray:
        return self.base.y[self.row_indices()]

    def restrict(self, feature: int, value: int) -> "DatasetView":
        return restrict(self, feature, value)


def restrict(view: DatasetView, feature: int, value: int) -> DatasetView:
    """Rows of ``view`` with ``x[feature] == value``; ``feature`` becomes queried."""
    if feature in view.queried:
        raise ValueError(f"feature {feature} already queried on this path")
    if not 0 <= feature < view.base.d:
        raise IndexError(f"feature {feature} out of range")
    col = view.base.bits[feature]
    rows = view.rows & col if value else view.rows & ~col
    path = tuple(sorted(view.path + ((int(feature), int(bool(value))),)))
    return DatasetView(view.base, rows, path, view.queried | {int(feature)})


def view_from_indices(ds: BinaryDataset, indices) -> DatasetView:
    mask = np.zeros(ds.n, dtype=bool)
    mask[np.asarray(indices, dtype=np.int64)] = True
    return DatasetView(ds, pack_columns(mask[None, :])[0])


# --------------------------------------------------------------------------
# Binarization
# --------------------------------------------------------------------------


@dataclass
class BinarizationMap:
    """Per raw attribute: category list or sorted thresholds (bit = value >= t)."""

    attributes: list[dict]
    classes: list[str]

    @property
    def feature_names(self) -> list[str]:
        names = []
        for attr in self.attributes:
            if attr["kind"] == CATEGORICAL:
                names += [f"{attr['name']}={v}" for v in attr["categories"]]
            else:
                names += [f"{attr['name']}>={t:.10g}" for t in attr["thresholds"]]
        return names

    def apply(self, raw: RawDataset) -> BinaryDataset:
        by_name = {c.name: c for c in raw.columns}
        blocks = []
        for attr in self.attributes:
            col = by_name.get(attr["name"])
            if col is None:
                raise SchemaError(f"raw data lacks attribute {attr['name']!r}")
            if attr["kind"] == CATEGORICAL:
                vals = np.array([str(v) for v in col.values], dtype=object)
                blocks += [(vals == c) for c in attr["categories"]]
            else:
                vals = np.asarray(col.values, dtype=float)
                blocks += [(vals >= t) for t in attr["thresholds"]]
        X = np.stack(blocks, axis=1) if blocks else np.zeros((raw.n, 0), dtype=bool)
        # map labels through the training class order; unseen classes get new ids
        index = {c: i for i, c in enumerate(self.classes)}
        extra = list(self.classes)
        y = np.empty(raw.n, dtype=np.int64)
        for i, lab in enumerate(raw.labels):
            name = raw.classes[lab]
            if name not in index:
                index[name] = len(extra)
                extra.append(name)
            y[i] = index[name]
        return BinaryDataset(X.astype(np.uint8), y, self.feature_names, len(extra))

    def to_json(self) -> dict:
        return {"attributes": self.attributes, "classes": self.classes}

    @classmethod
    def from_json(cls, obj) -> "BinarizationMap":
        return cls(obj["attributes"], obj["classes"])

    def save(self, path):
        atomic_write_text(path, json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path) -> "BinarizationMap":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def quantile_thresholds(values, n_thresholds: int) -> list[float]:
    """Midpoint thresholds at equal-frequency quantiles of the distinct values."""
    distinct = np.unique(np.asarray(values, dtype=float))
    u = len(distinct)
    if u < 2 or n_thresholds < 1:
        return []
    if n_thresholds >= u - 1:
        cuts = range(1, u)
    else:
        cuts = sorted({
            min(max(int(np.floor(i * u / (n_thresholds + 1) + 0.5)), 1), u - 1)
            for i in range(1, n_thresholds + 1)
        })
    return [float((distinct[j - 1] + distinct[j]) / 2) for j in cuts]


def binarize(raw: RawDataset, max_features: int = 100) -> tuple[BinaryDataset, BinarizationMap]:
    """One-hot encode categorical attributes and threshold numeric ones.

    Categorical attributes are never truncated; numeric attributes share what
    is left of ``max_features`` equally, leftovers going to the earliest ones.
    """
    if max_features < 1:
        raise ConfigError("max_features must be positive")
    cat_cols = [c for c in raw.columns if c.kind == CATEGORICAL]
    num_cols = [c for c in raw.columns if c.kind == NUMERIC]
    n_cat = sum(len(set(map(str, c.values))) for c in cat_cols)
    if n_cat > max_features:
        raise ConfigError(
            f"categorical attributes expand to {n_cat} columns, above max_features={max_features}"
        )
    budget = max_features - n_cat
    if num_cols and budget < len(num_cols):
        raise ConfigError(
            f"{len(num_cols)} numeric attributes but only {budget} columns of budget left"
        )
    share, leftover = divmod(budget, len(num_cols)) if num_cols else (0, 0)

    attributes = []
    num_seen = 0
    for col in raw.columns:
        if col.kind == CATEGORICAL:
            cats = sorted(set(map(str, col.values)))
            attributes.append({"name": col.name, "kind": CATEGORICAL, "categories": cats})
        else:
            quota = share + (1 if num_seen < leftover else 0)
            num_seen += 1
            attributes.append({
                "name": col.name,
                "kind": NUMERIC,
                "thresholds": quantile_thresholds(col.values, quota),
            })
    bmap = BinarizationMap(attributes, list(raw.classes))
    return bmap.apply(raw), bmap


# --------------------------------------------------------------------------
# Splits
# --------------------------------------------------------------------------


def split_indices(n: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise ValueError("need at least two rows to split")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    n_train = int(round(fraction * n))
    if n_train == 0 or n_train == n:
        raise ValueError(f"fraction {fraction} leaves an empty part for n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def train_test_split(ds: BinaryDataset, fraction: float = 0.8, seed: int = 0):
    """Seeded random partition into ``round(fraction * n)`` train rows and the rest."""
    train_idx, test_idx = split_indices(ds.n, fraction, seed)
    return ds.subset(train_idx), ds.subset(test_idx)


# --------------------------------------------------------------------------
# Binarized CSV
# --------------------------------------------------------------------------


def atomic_write_text(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_binary_csv(ds: BinaryDataset, path):
    lines = [",".join(list(ds.feature_names) + ["label"])]
    for row, lab in zip(ds.X, ds.y):
        lines.append(",".join(map(str, row.tolist())) + f",{int(lab)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_binary_csv(path) -> BinaryDataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: missing header row") from None
        if not header or header[-1].strip() != "label":
            raise ParseError(f"{path}: last column must be 'label'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            try:
                vals = [int(c) for c in row]
            except ValueError:
                raise ParseError(f"{path}: row {lineno}: non-integer cell") from None
            if any(v not in (0, 1) for v in vals[:-1]) or vals[-1] < 0:
                raise ParseError(f"{path}: row {lineno}: cells must be 0/1, label >= 0")
            rows.append(vals)
    if not rows:
        raise DataError("no rows")
    arr = np.array(rows, dtype=np.int64)
    return BinaryDataset(arr[:, :-1], arr[:, -1], [h.strip() for h in header[:-1]])
