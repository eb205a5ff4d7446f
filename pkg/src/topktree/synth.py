"""Hard label distributions over the uniform Boolean cube.

``parity_mix``: with probability 1-eps the label is the parity of the first
``h`` bits, otherwise it is a uniformly chosen bit among the remaining
``K-1``. ``monotone_mix``: Tribes of the first ``h`` bits with probability
1-eps, Majority of the remaining ``K-1`` otherwise.

Label probabilities are kept as exact rationals where it matters: accuracy
under the distribution is computed by enumerating all ``2^d`` inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataset import BinaryDataset
from .tree import DecisionTree, predict_batch

PARITY_MIX = "parity_mix"
MONOTONE_MIX = "monotone_mix"
EXACT_MAX_D = 24


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    h: int
    K: int
    eps: float

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in (PARITY_MIX, MONOTONE_MIX):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.K < 2:
            raise ValueError("K must be > 1")
        if not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")

    @property
    def d(self) -> int:
        return self.h + self.K - 1

    @property
    def eps_exact(self) -> Fraction:
        return Fraction(str(self.eps))


# --------------------------------------------------------------------------
# Boolean functions (row-wise over a 2-D bit array, or a single vector)
# --------------------------------------------------------------------------


def _as_rows(x):
    x = np.asarray(x, dtype=np.int64)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def _unwrap(out, single):
    return int(out[0]) if single else out


def parity(x):
    rows, single = _as_rows(x)
    if rows.shape[1] == 0:
        raise ValueError("parity of an empty input")
    return _unwrap(rows.sum(axis=1) % 2, single)


def majority(x):
    """1 iff at least half of the bits are 1 (exact halves count)."""
    rows, single = _as_rows(x)
    length = rows.shape[1]
    if length == 0:
        raise ValueError("majority of an empty input")
    return _unwrap((2 * rows.sum(axis=1) >= length).astype(np.int64), single)


def tribes_width(l: int) -> tuple[int, int]:
    """Largest ``w`` with ``(1 - 2^-w)^(l/w) <= 1/2``, and ``t = floor(l / w)``."""
    if l < 1:
        raise ValueError("l must be >= 1")
    w = 1
    for cand in range(1, l + 1):
        if (l / cand) * math.log1p(-(2.0 ** -cand)) <= -math.log(2):
            w = cand
    return w, l // w


def tribes(x):
    """OR over consecutive width-``w`` blocks of the AND of each block."""
    rows, single = _as_rows(x)
    l = rows.shape[1]
    if l == 0:
        raise ValueError("tribes of an empty input")
    w, t = tribes_width(l)
    blocks = rows[:, : w * t].reshape(rows.shape[0], t, w)
    return _unwrap(blocks.all(axis=2).any(axis=1).astype(np.int64), single)


# --------------------------------------------------------------------------
# Label distributions
# --------------------------------------------------------------------------


def _split(spec: SynthSpec, X):
    X = np.asarray(X, dtype=np.int64)
    return X[:, : spec.h], X[:, spec.h :]


def labeler(spec: SynthSpec):
    """Return ``q(X)``: the vector of ``Pr[y = 1 | x]`` for each row of ``X``."""

    def q(X):
        rows, single = _as_rows(X)
        if rows.shape[1] != spec.d:
            raise ValueError(f"expected {spec.d} features, got {rows.shape[1]}")
        first, second = _split(spec, rows)
        if spec.kind == PARITY_MIX:
            main, noise = parity(first), second.mean(axis=1)
        else:
            main, noise = tribes(first), majority(second)
        out = (1 - spec.eps) * main + spec.eps * noise
        return float(out[0]) if single else out

    return q


def sample(spec: SynthSpec, n: int, seed=0) -> BinaryDataset:
    """``n`` i.i.d. draws: x uniform on the cube, y ~ Bernoulli(q(x))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, spec.d), dtype=np.uint8)
    y = (rng.random(n) < labeler(spec)(X)).astype(np.int64)
    names = [f"a{i}" for i in range(spec.h)] + [f"b{i}" for i in range(spec.K - 1)]
    return BinaryDataset(X, y, names, n_classes=2)


def cube(d: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the Boolean cube in binary counting order (bit 0 first)."""
    stop = 2**d if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(d)) & 1).astype(np.uint8)


def exact_accuracy_fraction(tree: DecisionTree, spec: SynthSpec, chunk: int = 1 << 16) -> Fraction:
    """``Pr[T(x) = y]`` under the distribution, as an exact rational.

    The label is ``main(x)`` w.p. 1-eps and a noise bit w.p. eps; agreement
    counts for both branches are accumulated as integers over the cube.
    """
    d = spec.d
    if d > EXACT_MAX_D:
        raise ValueError(f"exact enumeration limited to d <= {EXACT_MAX_D}")
    main_agree = 0
    noise_agree = Fraction(0)
    for start in range(0, 2**d, chunk):
        X = cube(d, start, min(start + chunk, 2**d))
        pred = predict_batch(tree, X)
        first, second = _split(spec, X)
        if spec.kind == PARITY_MIX:
            main = parity(first)
            ones = second.sum(axis=1)
            m = spec.K - 1
            # uniform coordinate of x2 equals pred with prob ones/m (pred=1) or (m-ones)/m
            agree = np.where(pred == 1, ones, m - ones)
            noise_agree += Fraction(int(agree.sum()), m)
        else:
            main = tribes(first)
            noise_agree += int(np.count_nonzero(pred == majority(second)))
        main_agree += int(np.count_nonzero(pred == main))
    eps = spec.eps_exact
    return ((1 - eps) * main_agree + eps * noise_agree) / 2**d


def exact_accuracy(tree: DecisionTree, spec: SynthSpec) -> float:
    return float(exact_accuracy_fraction(tree, spec))


def bayes_accuracy(spec: SynthSpec, chunk: int = 1 << 18) -> float:
    """``E[max(q(x), 1 - q(x))]``: no classifier, of any depth, does better."""
    if spec.d > EXACT_MAX_D:
        raise ValueError(f"exact enumeration limited to d <= {EXACT_MAX_D}")
    q = labeler(spec)
    total = 0.0
    for start in range(0, 2**spec.d, chunk):
        p = q(cube(spec.d, start, min(start + chunk, 2**spec.d)))
        total += float(np.maximum(p, 1 - p).sum())
    return total / 2**spec.d


def is_monotone(q, d: int) -> bool:
    """Exhaustive check that flipping any bit 0 -> 1 never lowers ``q``."""
    X = cube(d)
    vals = np.asarray(q(X), dtype=float)
    idx = np.arange(2**d)
    for i in range(d):
        lo = idx[(idx >> i) & 1 == 0]
        if np.any(vals[lo] > vals[lo | (1 << i)] + 1e-15):
            return False
    return True


def parity_tree(spec: SynthSpec) -> DecisionTree:
    """Complete tree on the first ``h`` coordinates computing their parity."""
    from .tree import Leaf, Node

    def build(i, acc):
        if i == spec.h:
            return Leaf(acc)
        return Node(i, build(i + 1, acc), build(i + 1, acc ^ 1))

    return build(0, 0)


def function_tree(fn, features) -> DecisionTree:
    """Complete tree over ``features`` whose leaves hold ``fn`` of the queried bits."""
    from .tree import Leaf, Node

    features = list(features)

    def build(i, bits):
        if i == len(features):
            return Leaf(int(fn(np.array(bits))))
        return Node(features[i], build(i + 1, bits + [0]), build(i + 1, bits + [1]))

    return build(0, [])


def fico_like_raw(n: int = 1000, n_attributes: int = 23, noise: float = 2.0, seed=0):
    """Numeric stand-in with the shape of a credit-scoring table.

    Attributes are independent standard normals rounded to 3 decimals; the
    label thresholds a random linear score plus Gaussian noise.
    """
    from .dataset import RawColumn, RawDataset

    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(n, n_attributes))
    w = rng.normal(size=n_attributes)
    y = (Z @ w + rng.normal(scale=noise, size=n) > 0).astype(np.int64)
    cols = tuple(
        RawColumn(f"f{j}", "numeric", tuple(np.round(Z[:, j], 3))) for j in range(n_attributes)
    )
    return RawDataset(cols, y, ("0", "1"))
