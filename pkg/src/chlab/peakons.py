"""Peakon reference solutions and the Camassa-Holm N-peakon ODEs.

The ansatz u(x, t) = sum_i p_i(t) exp(-|x - q_i(t)|) solves CH when

    dq_i/dt = sum_j p_j exp(-|q_i - q_j|)
    dp_i/dt = p_i sum_j p_j sgn(q_i - q_j) exp(-|q_i - q_j|)

which is Hamiltonian with H = 1/2 sum_ij p_i p_j exp(-|q_i - q_j|).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, DomainError
from .fields import Field, Grid

COLLISION_TOL = 1e-6


def single_peakon(c: float, x, t: float):
    if not c > 0:
        raise ValueError("peakon speed c must be positive")
    return c * np.exp(-np.abs(np.asarray(x) - c * t))


@dataclass(frozen=True)
class PeakonState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"positions {q.shape} and momenta {p.shape} must be matching 1-d arrays")
        if q.size > 1 and np.any(np.diff(q) <= 0):
            raise ValueError("peakon positions must be strictly increasing")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])


def multipeakon_field(s: PeakonState, grid: Grid) -> Field:
    if grid.periodic:
        raise DomainError("multi-peakon fields are only defined on the line")
    x = grid.x
    u = np.zeros(grid.size)
    for qi, pi in zip(s.q, s.p):
        u += pi * np.exp(-np.abs(x - qi))
    return Field(grid, u)


def _rhs(q: np.ndarray, p: np.ndarray):
    r = q[:, None] - q[None, :]
    e = np.exp(-np.abs(r))
    qdot = e @ p
    pdot = p * ((np.sign(r) * e) @ p)
    return qdot, pdot


def _check_gaps(q: np.ndarray, tol: float) -> None:
    if q.size > 1:
        gap = float(np.min(np.diff(q)))
        if gap < tol:
            raise CollisionError(f"peakon gap {gap:.3g} below collision tolerance {tol:g}")


def multipeakon_rhs(s: PeakonState, tol: float = COLLISION_TOL):
    """Returns (dq/dt, dp/dt)."""
    _check_gaps(s.q, tol)
    return _rhs(s.q, s.p)


def hamiltonian(s: PeakonState) -> float:
    e = np.exp(-np.abs(s.q[:, None] - s.q[None, :]))
    return 0.5 * float(s.p @ e @ s.p)


def total_momentum(s: PeakonState) -> float:
    return float(np.sum(s.p))


def peakon_trajectory(s: PeakonState, t_end: float, dt: float, tol: float = COLLISION_TOL):
    """RK4 history ``(times, states)``, including t = 0 and t = t_end.

    On a collision the CollisionError carries the last good state and the
    partial history.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if len(s) == 0:
        return [0.0], [s]
    nsteps = max(1, int(np.ceil(t_end / dt - 1e-9))) if t_end > 0 else 0
    h = t_end / nsteps if nsteps else 0.0
    q, p = s.q.copy(), s.p.copy()
    times, states = [0.0], [s]
    _check_gaps(q, tol)
    for i in range(1, nsteps + 1):
        try:
            k1q, k1p = _rhs(q, p)
            k2q, k2p = _rhs(q + 0.5 * h * k1q, p + 0.5 * h * k1p)
            k3q, k3p = _rhs(q + 0.5 * h * k2q, p + 0.5 * h * k2p)
            k4q, k4p = _rhs(q + h * k3q, p + h * k3p)
            qn = q + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
            pn = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
            _check_gaps(qn, tol)
        except CollisionError as exc:
            exc.state, exc.t, exc.history = states[-1], times[-1], (times, states)
            raise
        q, p = qn, pn
        times.append(i * h)
        states.append(PeakonState(q.copy(), p.copy()))
    return times, states


def evolve_peakons(s: PeakonState, t_end: float, dt: float, tol: float = COLLISION_TOL) -> PeakonState:
    return peakon_trajectory(s, t_end, dt, tol)[1][-1]


def write_trajectory_csv(times, states, path) -> None:
    n = len(states[0]) if states else 0
    header = ["t"] + [f"{c}{i + 1}" for i in range(n) for c in ("q", "p")]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, s in zip(times, states):
            row = [t] + [v for pair in zip(s.q, s.p) for v in pair]
            w.writerow([f"{v:.17g}" for v in row])
