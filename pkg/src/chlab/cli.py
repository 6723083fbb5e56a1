"""Command-line front end.

Exit codes: 0 success, 2 invalid input (config, arguments, missing data),
3 BlowUpSuspected / peakon collision, 4 NonFiniteState, 5 kernel check failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from . import diagnostics, kernels, peakons
from .config import Scenario, load_scenario
from .errors import ChlabError, CollisionError, ConfigError, NonFiniteState
from .fields import Circle, read_csv
from .integrator import Status, run
from .model import BFamily

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BLOWUP = 3
EXIT_NONFINITE = 4
EXIT_CHECK_FAILED = 5


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_INVALID


def _load(args) -> Scenario:
    scen = load_scenario(args.config)
    if getattr(args, "out", None):
        scen.output_dir = Path(args.out)
    return scen


def _describe(scen: Scenario) -> dict:
    dom = scen.grid.domain
    return {
        "model": getattr(scen.model, "name", "general"),
        "domain": "circle" if isinstance(dom, Circle) else f"line(L={dom.half_length:g})",
        "n": scen.grid.n,
        "initial": scen.initial,
    }


def cmd_simulate(args) -> int:
    scen = _load(args)
    u0 = scen.initial_field()
    out = scen.output_dir
    try:
        traj = run(scen.model, u0, scen.solver)
    except NonFiniteState as exc:
        if exc.trajectory is not None:
            exc.trajectory.export(out, _describe(scen))
        print(f"NonFiniteState: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    traj.export(out, _describe(scen))
    print(json.dumps(traj.summary(), sort_keys=True))
    return EXIT_BLOWUP if traj.status is Status.BLOWUP_SUSPECTED else EXIT_OK


def _snapshot_index(out: Path):
    index = out / "snapshots.csv"
    if not index.exists():
        raise FileNotFoundError(f"{index} not found; run 'simulate' first")
    with index.open() as fh:
        return [(int(r["index"]), float(r["t"]), out / r["file"]) for r in csv.DictReader(fh)]


def _select(entries, selector: str):
    try:
        i = int(selector)
    except ValueError:
        t = float(selector)
        hit = [e for e in entries if abs(e[1] - t) <= 1e-9 * max(1.0, abs(t))]
        if not hit:
            raise LookupError(f"no snapshot at t = {t}")
        return hit
    hit = [e for e in entries if e[0] == i]
    if not hit:
        raise LookupError(f"no snapshot with index {i}")
    return hit


def cmd_probe(args) -> int:
    scen = _load(args)
    out = scen.output_dir
    try:
        entries = _snapshot_index(out)
        if args.snapshot is not None:
            entries = _select(entries, args.snapshot)
    except (FileNotFoundError, LookupError, ValueError) as exc:
        return _fail(str(exc))
    cfg = scen.probe
    min_width = cfg.min_width if cfg.min_width is not None else 16 * scen.grid.dx
    records = []
    for index, t, path in entries:
        if not path.exists():
            return _fail(f"missing snapshot file {path}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            u = read_csv(path, scen.grid)
        for iv in diagnostics.find_vanishing_intervals(u, cfg.eps, min_width):
            rep = diagnostics.uc_probe(scen.model, u, iv, t_star=t,
                                       mass_tol=cfg.mass_tol, ineq_tol=cfg.ineq_tol)
            records.append({"snapshot": index, **rep.to_dict()})
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "probe.jsonl", "w") as fh:
        for rec in records:
            line = json.dumps(rec, sort_keys=True)
            fh.write(line + "\n")
            print(line)
    return EXIT_OK


def cmd_kernelcheck(args) -> int:
    if args.trials < 1:
        return _fail("--trials must be >= 1")
    res = kernels.monotonicity_check(args.trials, args.seed)
    print(f"trials={res.trials} seed={res.seed}")
    print(f"line   min margin {res.line_min_margin:.17g} violations {res.line_violations}")
    print(f"circle min margin {res.circle_min_margin:.17g} violations {res.circle_violations}")
    print(f"floor identities agreement {res.floor_agreement:.6f}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else EXIT_CHECK_FAILED


def _rel_l2(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> float:
    den = np.sqrt(np.dot(w, b * b))
    num = np.sqrt(np.dot(w, (a - b) ** 2))
    return float(num / den) if den > 0 else float(num)


def cmd_peakon(args) -> int:
    scen = _load(args)
    if scen.initial["profile"] not in ("peakon", "multipeakon"):
        return _fail("peakon needs initial.profile = 'peakon' or 'multipeakon'")
    state = scen.peakon_state()
    if len(state) == 0:
        return _fail("empty peakon list")
    if not (isinstance(scen.model, BFamily) and scen.model.b == 2.0):
        return _fail("the multi-peakon ODEs are only available for Camassa-Holm (b = 2)")
    out = scen.output_dir
    out.mkdir(parents=True, exist_ok=True)
    t_end = scen.solver.t_end
    try:
        times, states = peakons.peakon_trajectory(state, t_end, scen.peakon.dt)
    except CollisionError as exc:
        times, states = exc.history
        peakons.write_trajectory_csv(times, states, out / "peakon_trajectory.csv")
        print(f"CollisionError at t = {exc.t:.6g}: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    peakons.write_trajectory_csv(times, states, out / "peakon_trajectory.csv")
    final = states[-1]
    record = {"t_end": t_end, "q": final.q.tolist(), "p": final.p.tolist(),
              "hamiltonian": peakons.hamiltonian(final),
              "total_momentum": peakons.total_momentum(final)}
    if scen.peakon.compare_pde:
        u0 = peakons.multipeakon_field(state, scen.grid)
        try:
            traj = run(scen.model, u0, scen.solver)
        except NonFiniteState as exc:
            print(f"NonFiniteState in PDE run: {exc}", file=sys.stderr)
            return EXIT_NONFINITE
        w = scen.grid.weights
        with open(out / "comparison.csv", "w") as fh:
            fh.write("t,rel_l2,sup_diff\n")
            for t, u in zip(traj.times, traj.snapshots):
                ode = peakons.multipeakon_field(peakons.evolve_peakons(state, t, scen.peakon.dt), scen.grid)
                rel = _rel_l2(u.values, ode.values, w)
                sup = float(np.max(np.abs(u.values - ode.values)))
                fh.write(f"{t:.17g},{rel:.17g},{sup:.17g}\n")
        record["rel_l2_final"] = rel
        record["pde_status"] = traj.status.value
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _read_xu(path):
    with open(path) as fh:
        header = fh.readline().strip()
    if header != "x,u":
        raise ValueError(f"{path}: expected header 'x,u'")
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def cmd_compare(args) -> int:
    try:
        a, b = _read_xu(args.first), _read_xu(args.second)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    if a.shape != b.shape or not np.array_equal(a[:, 0], b[:, 0]):
        return _fail("snapshots are sampled on different grids")
    x, d = a[:, 0], a[:, 1] - b[:, 1]
    l2 = float(np.sqrt(trapezoid(d * d, x)))
    ref = float(np.sqrt(trapezoid(b[:, 1] ** 2, x)))
    rec = {"l2": l2, "rel_l2": l2 / ref if ref > 0 else l2, "sup": float(np.max(np.abs(d)))}
    print(json.dumps(rec, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="evolve a scenario and write snapshots/diagnostics")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("probe", help="run the unique-continuation probe on saved snapshots")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--snapshot", help="snapshot index (integer) or time (real)")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("kernelcheck", help="randomized check of the kernel inequalities")
    s.add_argument("--trials", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_kernelcheck)

    s = sub.add_parser("peakon", help="evolve the N-peakon ODEs, optionally against the PDE")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_peakon)

    s = sub.add_parser("compare", help="difference norms between two x,u snapshot files")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(str(exc))
    except ChlabError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
