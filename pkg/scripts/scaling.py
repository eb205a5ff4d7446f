"""Training time against feature count and sample count on a FICO-shaped table.

The stand-in has 1000 rows and 1407 binary features (23 Gaussian attributes,
thresholded); see ``topktree.synth.fico_like_raw``.

    python scripts/scaling.py --out-dir results/
"""
import argparse
from pathlib import Path

from topktree import bench
from topktree.dataset import binarize, write_binary_csv
from topktree.synth import fico_like_raw


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", default="1,4,8,16")
    ap.add_argument("--depths", default="4,5,6")
    ap.add_argument("--features", default="50,100,200,300,500,800,1100,1407")
    ap.add_argument("--samples", default="50,100,150,250,500,750,1000")
    ap.add_argument("--engine", choices=bench.ENGINES, default="opt")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ints = lambda s: [int(v) for v in s.split(",")]  # noqa: E731

    ds, _ = binarize(fico_like_raw(), 1407)
    write_binary_csv(ds, out / "fico_like.csv")
    common = dict(name="fico-like", engine=args.engine)
    for label, fn, counts in (("features", bench.run_scaling_features, ints(args.features)),
                              ("samples", bench.run_scaling_samples, ints(args.samples))):
        records = fn(ds, ints(args.depths), counts, ints(args.ks), args.time_limit, **common)
        bench.write_records(records, out / f"scale_{label}.csv", scaling=True)
        for r in records:
            t = "DNF" if r.status != "ok" else f"{r.train_time_ms / 1e3:8.2f}s"
            print(f"{label}={r.size:5d} depth={r.depth} k={r.k:<3d} {t} calls={r.calls}")


if __name__ == "__main__":
    main()
