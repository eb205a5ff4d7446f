"""Command-line entry point: ``topktree <subcommand> ...``.

Exit status: 0 on success, 1 on usage errors, 2 on runtime errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import bench, synth
from .dataset import (
    BinarizationMap,
    DataError,
    atomic_write_text,
    binarize,
    load_csv,
    load_schema,
    read_binary_csv,
    write_binary_csv,
)
from .impurity import ImpurityKind
from .opt import NO_TREE
from .oracle import best_in_space, best_in_space_by_filter, count_shapes
from .search import TimeLimitExceeded, TrainConfig
from .tree import accuracy, dumps, errors, loads

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    def __init__(self, message, parser=None):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _impurity(text):
    try:
        return ImpurityKind.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError("choose from entropy, gini, sqrt") from None


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--impurity", type=_impurity, default=ImpurityKind.ENTROPY,
                        metavar="{entropy,gini,sqrt}")
    common.add_argument("--engine", choices=bench.ENGINES, default="opt")
    common.add_argument("--time-limit", type=_positive_float, default=None, metavar="SECONDS")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="topktree", description="Top-k decision tree learning.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("binarize", parents=[common], help="binarize a raw CSV file")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True, help="JSON: column -> categorical|numeric|label")
    p.add_argument("--max-features", type=_positive_int, default=100)
    p.add_argument("--map", help="apply an existing binarization map instead of fitting one")
    p.add_argument("--map-out", help="write the fitted binarization map here")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", parents=[common], help="train a Top-k tree")
    p.add_argument("--data", required=True, help="binarized CSV")
    p.add_argument("--k", type=_positive_int, default=1)
    p.add_argument("--depth", type=_nonneg_int, default=5)
    p.add_argument("--out", required=True, help="tree JSON output")

    p = sub.add_parser("eval", parents=[common], help="accuracy of a tree on a dataset")
    p.add_argument("--tree", required=True)
    p.add_argument("--data", required=True)

    p = sub.add_parser("synth", help="sample a synthetic hard distribution")
    ssub = p.add_subparsers(dest="kind", parser_class=_Parser, required=True)
    for kind in ("parity-mix", "monotone-mix"):
        q = ssub.add_parser(kind, parents=[common])
        q.add_argument("--h", type=_positive_int, required=True)
        q.add_argument("--K", type=int, required=True)
        q.add_argument("--eps", type=float, required=True)
        q.add_argument("--n", type=_positive_int, required=True)
        q.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run an experiment from a JSON config")
    bsub = p.add_subparsers(dest="experiment", parser_class=_Parser, required=True)
    for name in ("accuracy", "scale-features", "scale-samples", "k-plateau"):
        q = bsub.add_parser(name, parents=[common])
        q.add_argument("--config", required=True)
        q.add_argument("--out", required=True, help="results CSV")
        if name.startswith("scale"):
            q.add_argument("--counts", type=_int_list, required=True,
                           help="comma-separated feature or sample counts")

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare Top-k against brute-force enumeration")
    p.add_argument("--instances", type=_positive_int, default=50)
    p.add_argument("--max-d", type=_positive_int, default=6)
    p.add_argument("--max-n", type=_positive_int, default=32)
    p.add_argument("--max-h", type=_nonneg_int, default=3)
    return parser


def _train(ds, cfg, engine, time_limit):
    return bench.fit(ds, cfg, engine, time_limit)


def cmd_binarize(args):
    raw = load_csv(args.data, load_schema(args.schema))
    if args.map:
        bmap = BinarizationMap.load(args.map)
        ds = bmap.apply(raw)
    else:
        ds, bmap = binarize(raw, args.max_features)
    write_binary_csv(ds, args.out)
    if args.map_out:
        bmap.save(args.map_out)
    print(f"binarized {ds.n} rows into {ds.d} features -> {args.out}")


def cmd_train(args):
    ds = read_binary_csv(args.data)
    cfg = TrainConfig(args.k, args.depth, args.impurity)
    t0 = time.perf_counter()
    tree = _train(ds, cfg, args.engine, args.time_limit)
    elapsed = time.perf_counter() - t0
    atomic_write_text(args.out, dumps(tree) + "\n")
    print(f"train accuracy: {accuracy(tree, ds)!r}")
    print(f"k={cfg.k} depth={cfg.depth} impurity={cfg.impurity.value} engine={args.engine} "
          f"time={elapsed:.3f}s -> {args.out}")


def cmd_eval(args):
    with open(args.tree) as fh:
        tree = loads(fh.read())
    ds = read_binary_csv(args.data)
    print(f"accuracy: {accuracy(tree, ds)!r}")


def cmd_synth(args):
    kind = args.kind.replace("-", "_")
    try:
        spec = synth.SynthSpec(kind, args.h, args.K, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ds = synth.sample(spec, args.n, args.seed)
    write_binary_csv(ds, args.out)
    print(f"sampled {ds.n} rows of {kind} (d={spec.d}) -> {args.out}")


def _apply_overrides(cfg, args, argv):
    # explicit global flags win over the config file
    if "--impurity" in argv:
        cfg.impurity = args.impurity.value
    if "--engine" in argv:
        cfg.engine = args.engine
    if args.time_limit is not None:
        cfg.time_limit = args.time_limit
    if "--seed" in argv:
        cfg.seed = args.seed
    return cfg


def cmd_bench(args, argv):
    from pathlib import Path

    try:
        cfg = _apply_overrides(bench.BenchConfig.from_json(args.config), args, argv)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad config: {exc}") from None
    base_dir = Path(args.config).resolve().parent
    scaling = args.experiment.startswith("scale")
    if args.experiment == "accuracy":
        records = bench.run_accuracy_sweep(cfg, base_dir)
    else:
        name, ds = bench.load_dataset(cfg.datasets[0], base_dir)
        common = dict(name=name, engine=cfg.engine, impurity=cfg.impurity)
        if args.experiment == "scale-features":
            records = bench.run_scaling_features(ds, cfg.depths, args.counts, cfg.ks,
                                                 cfg.time_limit, **common)
        elif args.experiment == "scale-samples":
            records = bench.run_scaling_samples(ds, cfg.depths, args.counts, cfg.ks,
                                                cfg.time_limit, seed=cfg.seed, **common)
        else:
            records = bench.run_k_plateau(ds, cfg.ks, cfg.depths[0], cfg.splits, seed=cfg.seed,
                                          fraction=cfg.fraction, time_limit=cfg.time_limit,
                                          **common)
    bench.write_records(records, args.out, scaling=scaling)
    for row in bench.aggregate(records):
        test = "" if row["test_mean"] is None else f" test={row['test_mean']:.4f}"
        print(f"{row['dataset']} k={row['k']} depth={row['depth']}: "
              f"train={row['train_mean']:.4f}{test} time={row['time_ms_mean']:.1f}ms")
    n_timeout = sum(r.status == "timeout" for r in records)
    n_error = sum(r.status == "error" for r in records)
    print(f"{len(records)} cells, {n_timeout} timeouts, {n_error} errors -> {args.out}")
    return EXIT_RUNTIME if n_error else EXIT_OK


def cmd_oracle_check(args):
    from .dataset import BinaryDataset
    from .opt import train_opt_topk
    from .topk import train_topk

    failures = 0
    for i in range(args.instances):
        seed = args.seed + i
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, args.max_d + 1))
        n = int(rng.integers(1, args.max_n + 1))
        h = int(rng.integers(0, args.max_h + 1))
        k = int(rng.integers(1, d + 1))
        ds = BinaryDataset(rng.integers(0, 2, (n, d)), rng.integers(0, 2, n))
        cfg = TrainConfig(k, h, args.impurity)
        plain = errors(train_topk(ds, cfg), ds)
        opt_tree = train_opt_topk(ds, cfg)
        opt = errors(opt_tree, ds) if opt_tree is not NO_TREE else None
        acc, _ = best_in_space(ds, k, h, cfg.impurity)
        best = int(round(n * (1 - acc)))
        ok = plain == opt == best
        if count_shapes(d, h) <= 20_000:
            acc2, _ = best_in_space_by_filter(ds, k, h, cfg.impurity)
            ok = ok and int(round(n * (1 - acc2))) == best
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} seed={seed} d={d} n={n} h={h} k={k} "
              f"errors plain={plain} opt={opt} oracle={best}")
    print(f"{args.instances - failures}/{args.instances} instances agree")
    return EXIT_RUNTIME if failures else EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        (exc.parser or parser).print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "binarize":
            cmd_binarize(args)
        elif args.command == "train":
            cmd_train(args)
        elif args.command == "eval":
            cmd_eval(args)
        elif args.command == "synth":
            cmd_synth(args)
        elif args.command == "bench":
            return cmd_bench(args, argv)
        elif args.command == "oracle-check":
            return cmd_oracle_check(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TimeLimitExceeded as exc:
        print(f"DNF: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, DataError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
