"""Probe a compact bump as it evolves.

The initial bump vanishes outside a finite interval.  Under the flow the
non-local term switches on exponential tails at once, so the quiet intervals
found at t = 0 are destroyed.  The probe reports a positive gap on each of
them, i.e. the data cannot be the trace of a solution that stays zero there.
"""
import argparse
import json

import numpy as np

from chlab import BFamily, Field, line_grid
from chlab.diagnostics import find_vanishing_intervals, uc_probe
from chlab.integrator import SolverConfig, run


def bump(x, lo, hi):
    out = np.zeros_like(x)
    s = (x - 0.5 * (lo + hi)) / (0.5 * (hi - lo))
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--half-length", type=float, default=20.0)
    ap.add_argument("--eps", type=float, default=1e-10)
    ap.add_argument("--t-end", type=float, default=0.5)
    args = ap.parse_args()

    m = BFamily(2.0)
    g = line_grid(args.half_length, args.n)
    u0 = Field.from_function(g, lambda x: 0.5 * bump(x, -1.0, 1.0))
    traj = run(m, u0, SolverConfig(t_end=args.t_end, snapshot_every=20))
    for t, u in zip(traj.times, traj.snapshots):
        ivs = find_vanishing_intervals(u, args.eps, 16 * g.dx)
        print(f"t={t:.3f}: {len(ivs)} quiet interval(s)")
        for iv in ivs:
            rep = uc_probe(m, u, iv, t_star=t)
            print("   ", json.dumps({k: rep.to_dict()[k] for k in ("interval", "gap", "verdict")}))


if __name__ == "__main__":
    main()
