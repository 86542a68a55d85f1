"""Compare the compiled and numpy grid-maximum kernels on oracle workloads.

    python benchmarks/bench_oracle.py [--h 1/50] [--samples 200] [--repeat 5]

Both kernels run on the same point cloud and dual samples.  Results agree to
rounding only: the numpy path goes through a BLAS matrix product.
"""
import argparse
import json
import os
import statistics
import time
from pathlib import Path

import numpy as np

from plqconj import _oracle_py, plqmodel
from plqconj.core import parse_scalar
from plqconj.verify import oracle_points

try:
    from plqconj import _oracle_kernel
except ImportError:  # not compiled
    _oracle_kernel = None

DATA = Path(__file__).resolve().parent.parent / "data"


def timed(fn, *args, repeat=5):
    ts = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        ts.append(time.perf_counter() - t0)
    return out, min(ts), statistics.median(ts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", default="1/50")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args()
    h = parse_scalar(args.h)
    rng = np.random.default_rng(0)
    S = np.ascontiguousarray(rng.uniform(-30, 30, size=(args.samples, 2)))
    rows = []
    for name in ("hexagon_one_piece", "quad_one_piece", "convex_bowl"):
        f = plqmodel.load(DATA / f"{name}.json")
        X, F = oracle_points(f, h)
        ref, py_min, py_med = timed(_oracle_py.grid_max, S, X, F, repeat=args.repeat)
        row = {"instance": name, "grid_points": len(X), "numpy_s": py_min}
        if _oracle_kernel is not None:
            got, cy_min, _ = timed(_oracle_kernel.grid_max, S, X, F, repeat=args.repeat)
            row["cython_s"] = cy_min
            row["speedup"] = py_min / cy_min if cy_min else float("inf")
            row["max_abs_diff"] = float(np.max(np.abs(got - ref)))
        rows.append(row)
    print(f"{'instance':<20} {'points':>8} {'numpy[s]':>10} {'cython[s]':>10} {'speedup':>8} {'max|diff|':>10}")
    for r in rows:
        print(
            f"{r['instance']:<20} {r['grid_points']:>8} {r['numpy_s']:>10.4f} "
            f"{r.get('cython_s', float('nan')):>10.4f} {r.get('speedup', float('nan')):>8.2f} "
            f"{r.get('max_abs_diff', float('nan')):>10.2e}"
        )
    if args.json:
        Path(args.json).write_text(json.dumps({"cpu_count": os.cpu_count(), "rows": rows}, indent=1) + "\n")


if __name__ == "__main__":
    main()
