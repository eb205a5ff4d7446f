"""Exact accuracy of Top-k on the two hard synthetic distributions.

parity-mix: Top-K against Top-(K-1) at depth h. monotone-mix: sweep h, K with
k = K - h, reporting Top-k, the Bayes rate, and Top-K when a gap is possible.

    python scripts/hierarchy.py parity --h 3 --K 4
    python scripts/hierarchy.py monotone --hs 6,8 --time-limit 300
"""
import argparse

from topktree.opt import train_opt_topk
from topktree.search import TimeLimitExceeded, TrainConfig
from topktree.synth import EXACT_MAX_D, SynthSpec, bayes_accuracy, exact_accuracy, sample


def fit(ds, k, h, limit):
    try:
        return train_opt_topk(ds, TrainConfig(k, h), time_limit=limit)
    except TimeLimitExceeded:
        return None


def parity(args):
    spec = SynthSpec("parity_mix", args.h, args.K, args.eps)
    ds = sample(spec, args.n, args.seed)
    for k in range(1, args.K + 1):
        tree = fit(ds, k, args.h, args.time_limit)
        acc = "DNF" if tree is None else f"{exact_accuracy(tree, spec):.4f}"
        print(f"parity_mix h={args.h} K={args.K}: Top-{k} depth {args.h} exact accuracy {acc}")


def monotone(args):
    for h in (int(v) for v in args.hs.split(",")):
        for K in range(h + 2, 3 * h + 1):
            spec = SynthSpec("monotone_mix", h, K, args.eps)
            if spec.d > EXACT_MAX_D:
                print(f"h={h} K={K}: d={spec.d} too large for exact evaluation")
                continue
            ds = sample(spec, args.n, args.seed)
            k = K - h
            tree = fit(ds, k, h, args.time_limit)
            if tree is None:
                print(f"h={h} K={K} k={k}: DNF")
                continue
            acc, bayes = exact_accuracy(tree, spec), bayes_accuracy(spec)
            line = f"h={h} K={K} k={k}: Top-k {acc:.4f} Bayes {bayes:.4f}"
            if bayes - acc >= args.gap:
                big = fit(ds, K, h, args.time_limit)
                line += " Top-K DNF" if big is None else f" Top-K {exact_accuracy(big, spec):.4f}"
            print(line, flush=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="which", required=True)
    p = sub.add_parser("parity")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--n", type=int, default=50_000)
    m = sub.add_parser("monotone")
    m.add_argument("--hs", default="6,8")
    m.add_argument("--n", type=int, default=100_000)
    m.add_argument("--gap", type=float, default=0.15)
    for q in (p, m):
        q.add_argument("--eps", type=float, default=0.1)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()
    parity(args) if args.which == "parity" else monotone(args)


if __name__ == "__main__":
    main()
