"""Method-of-lines time stepping with classical RK4."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .diagnostics import DiagnosticsSeries
from .errors import NonFiniteState
from .fields import TRUNCATION_TOL, Field, write_csv
from .model import ModelSpec, rhs_array

SPEED_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Either a fixed ``dt`` or an advective ``cfl`` with ``dt_max``."""

    t_end: float
    dt: Optional[float] = None
    cfl: Optional[float] = 0.3
    dt_max: float = 1e-2
    dealias: bool = False
    snapshot_every: int = 0
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if not (np.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end}")
        if self.dt is not None:
            if not self.dt > 0:
                raise ValueError("dt must be positive")
        elif self.cfl is None or not (0 < self.cfl <= 1):
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not self.blowup_threshold > 0:
            raise ValueError("blowup_threshold must be positive")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")


class Status(str, Enum):
    COMPLETED = "Completed"
    BLOWUP_SUSPECTED = "BlowUpSuspected"
    NON_FINITE = "NonFiniteState"


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: DiagnosticsSeries = field(default_factory=DiagnosticsSeries)
    status: Status = Status.COMPLETED
    steps: int = 0
    message: str = ""

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    def add_snapshot(self, t: float, u: Field) -> None:
        if self.times and t <= self.times[-1]:
            return
        self.times.append(float(t))
        self.snapshots.append(u)

    def summary(self) -> dict:
        d = self.diagnostics
        return {
            "status": self.status.value,
            "steps": self.steps,
            "t_final": d.t[-1] if d.t else 0.0,
            "snapshots": len(self.snapshots),
            "energy_initial": d.energy[0] if d.t else None,
            "energy_final": d.energy[-1] if d.t else None,
            "max_slope_final": d.max_slope[-1] if d.t else None,
            "message": self.message,
        }

    def export(self, out_dir, extra: Optional[dict] = None) -> None:
        """Snapshots as ``snapshots/snap_#####.csv`` plus diagnostics and summary."""
        out = Path(out_dir)
        snap_dir = out / "snapshots"
        snap_dir.mkdir(parents=True, exist_ok=True)
        with open(out / "snapshots.csv", "w") as fh:
            fh.write("index,t,file\n")
            for i, (t, u) in enumerate(zip(self.times, self.snapshots)):
                name = f"snap_{i:05d}.csv"
                write_csv(u, snap_dir / name)
                fh.write(f"{i},{t:.17g},snapshots/{name}\n")
        self.diagnostics.write_csv(out / "diagnostics.csv")
        with open(out / "summary.json", "w") as fh:
            json.dump({**self.summary(), **(extra or {})}, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _check_finite(v: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(v)):
        raise NonFiniteState(f"non-finite values in {what}")


def _rk4(m: ModelSpec, u: np.ndarray, grid, dt: float, dealias: bool) -> np.ndarray:
    k1 = rhs_array(m, u, grid, dealias)
    k2 = rhs_array(m, u + 0.5 * dt * k1, grid, dealias)
    k3 = rhs_array(m, u + 0.5 * dt * k2, grid, dealias)
    k4 = rhs_array(m, u + dt * k3, grid, dealias)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_rk4(m: ModelSpec, u: Field, dt: float, dealias: bool = False) -> Field:
    if not dt > 0:
        raise ValueError("dt must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        v = _rk4(m, u.values, u.grid, dt, dealias)
    _check_finite(v, "RK4 step")
    return Field(u.grid, v)


def select_dt(u: Field, cfl: float, dt_max: float) -> float:
    speed = max(float(np.max(np.abs(u.values))), SPEED_FLOOR)
    return min(dt_max, cfl * u.grid.dx / speed)


def run(m: ModelSpec, u0: Field, cfg: SolverConfig) -> Trajectory:
    """Advance u0 to ``cfg.t_end``.

    Stops early with status BlowUpSuspected when the discrete sup of |u_x|
    exceeds ``cfg.blowup_threshold``.  Non-finite states raise NonFiniteState
    with the partial trajectory attached.  On the line a single truncation
    warning is issued per run, reporting the largest boundary value reached.
    """
    traj = Trajectory()
    traj.add_snapshot(0.0, u0)
    traj.diagnostics.record(0.0, u0)
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=r"\|u\(\+-L\)\|")
        edge = _advance(m, u0, cfg, traj)
    if edge > TRUNCATION_TOL:
        warnings.warn(f"|u(+-L)| reached {edge:.3g} during the run, exceeding truncation "
                      f"tolerance {TRUNCATION_TOL:g}", stacklevel=2)
    return traj


def _advance(m: ModelSpec, u0: Field, cfg: SolverConfig, traj: Trajectory) -> float:
    grid = u0.grid
    v = np.array(u0.values)
    t = 0.0
    u = u0
    edge = 0.0
    while t < cfg.t_end:
        dt = cfg.dt if cfg.dt is not None else select_dt(u, cfg.cfl, cfg.dt_max)
        if t + dt >= cfg.t_end * (1 - 1e-12):
            dt = cfg.t_end - t
        if dt <= 0:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            v = _rk4(m, v, grid, dt, cfg.dealias)
        if not np.all(np.isfinite(v)):
            traj.status = Status.NON_FINITE
            traj.message = f"non-finite state after step {traj.steps + 1} at t={t + dt:.6g}"
            raise NonFiniteState(traj.message, trajectory=traj)
        t = t + dt if t + dt < cfg.t_end else cfg.t_end
        traj.steps += 1
        u = Field(grid, v)
        if not grid.periodic:
            edge = max(edge, abs(v[0]), abs(v[-1]))
        traj.diagnostics.record(t, u)
        slope = traj.diagnostics.max_slope[-1]
        if slope > cfg.blowup_threshold:
            traj.status = Status.BLOWUP_SUSPECTED
            traj.message = f"max |u_x| = {slope:.6g} exceeded {cfg.blowup_threshold:g} at t={t:.6g}"
            traj.add_snapshot(t, u)
            return edge
        if cfg.snapshot_every and traj.steps % cfg.snapshot_every == 0:
            traj.add_snapshot(t, u)
    traj.add_snapshot(t, u)
    return edge
