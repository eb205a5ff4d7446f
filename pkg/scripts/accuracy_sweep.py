"""Test accuracy of Top-k against depth on the UCI benchmarks (10 seeded 80:20 splits).

    python scripts/accuracy_sweep.py --out results/accuracy.csv
"""
import argparse
import tempfile

from topktree import bench
from topktree.dataset import binarize, train_test_split
from topktree.uci import find_car, load_car, load_tic_tac_toe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", default="1,2,3,4,8,12,16")
    ap.add_argument("--depths", default="2,3,4,5,6")
    ap.add_argument("--splits", type=int, default=10)
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    ks = [int(v) for v in args.ks.split(",")]
    depths = [int(v) for v in args.depths.split(",")]

    with tempfile.TemporaryDirectory() as tmp:
        datasets = {"tic-tac-toe": binarize(load_tic_tac_toe(tmp))[0]}
    car = find_car()
    if car is None:
        print("car.data not found under data/ (or $TOPKTREE_DATA); skipping car")
    else:
        datasets["car"] = binarize(load_car(car))[0]

    records = []
    for name, ds in datasets.items():
        print(f"{name}: {ds.n} rows, {ds.d} binary features")
        for split in range(args.splits):
            train, test = train_test_split(ds, 0.8, split)
            for depth in depths:
                for k in ks:
                    records.append(bench._cell(name, train, test, k, depth, split,
                                               "entropy", "opt", args.time_limit))
    bench.write_records(records, args.out)
    for row in bench.aggregate(records):
        print(f"{row['dataset']:12s} depth={row['depth']} k={row['k']:<3d} "
              f"test={row['test_mean']:.4f}±{row['test_std']:.4f} train={row['train_mean']:.4f}")


if __name__ == "__main__":
    main()
