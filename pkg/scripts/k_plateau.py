"""Train and test accuracy against k at depth 3, up to k = d.

    python scripts/k_plateau.py --out results/k_plateau.csv
"""
import argparse
import tempfile

from topktree import bench
from topktree.dataset import binarize
from topktree.uci import find_car, load_car, load_tic_tac_toe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--splits", type=int, default=10)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        datasets = {"tic-tac-toe": binarize(load_tic_tac_toe(tmp))[0]}
    if find_car() is not None:
        datasets["car"] = binarize(load_car(find_car()))[0]
    records = []
    for name, ds in datasets.items():
        ks = sorted({1, 2, 3, 4, 6, 8, 12, 16, ds.d} & set(range(1, ds.d + 1)))
        records += bench.run_k_plateau(ds, ks, args.depth, args.splits, name=name)
    bench.write_records(records, args.out)
    for row in bench.aggregate(records):
        print(f"{row['dataset']:12s} k={row['k']:<3d} train={row['train_mean']:.4f} "
              f"test={row['test_mean']:.4f}")


if __name__ == "__main__":
    main()
