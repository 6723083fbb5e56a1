"""Peakon translation error against the exact travelling wave, CH and DP.

    python3 scripts/peakon_convergence.py --out results/peakon_convergence.csv
"""
import argparse
import csv
import time
from pathlib import Path

import numpy as np

from chlab import BFamily, Field, line_grid
from chlab.integrator import SolverConfig, run
from chlab.peakons import single_peakon


def rel_l2(a, b, w):
    return float(np.sqrt(np.dot(w, (a - b) ** 2) / np.dot(w, b * b)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[512, 1024, 2048, 4096, 8192])
    ap.add_argument("--half-length", type=float, default=20.0)
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--cfl", type=float, default=0.3)
    ap.add_argument("--out", type=Path, default=Path("results/peakon_convergence.csv"))
    args = ap.parse_args()

    rows = []
    for b in (2.0, 3.0):
        prev = None
        for n in args.sizes:
            g = line_grid(args.half_length, n)
            t0 = time.perf_counter()
            traj = run(BFamily(b), Field(g, single_peakon(1.0, g.x, 0.0)),
                       SolverConfig(t_end=args.t_end, cfl=args.cfl))
            err = rel_l2(traj.final.values, single_peakon(1.0, g.x, args.t_end), g.weights)
            rate = np.log2(prev / err) if prev else float("nan")
            prev = err
            rows.append((b, n, g.dx, err, rate, traj.steps, time.perf_counter() - t0))
            print(f"b={b:g} n={n:5d} rel_l2={err:.3e} rate={rate:5.2f} steps={traj.steps}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["b", "n", "dx", "rel_l2", "observed_rate", "steps", "seconds"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
