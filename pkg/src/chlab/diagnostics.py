"""Monitored functionals and the unique-continuation probe.

The probe works on one time slice.  Given a field u and an interval [a, b]
on which u is (numerically) zero, it forms the flux density
f = h(u, u_x) >= 0 and F = d/dx (1 - d^2)^{-1} f.  A genuine solution that
vanishes on [a, b] must have F(a) = F(b) = 0, while the kernel is strictly
monotone across any interval that f avoids, so F(b) > F(a) unless f = 0.
The probe reports which side of that dichotomy the data falls on.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateWindow, DomainError, IntervalOutsideDomain
from .fields import Field, diff, integrate
from .kernels import solver_for
from .model import ModelSpec, flux_h

MASS_TOL_PER_LENGTH = 1e-10
INEQ_TOL = 1e-12


def energy(u: Field) -> float:
    """Trapezoid value of the integral of u^2 + u_x^2."""
    ux = diff(u.values, u.grid)
    return integrate(u.values**2 + ux**2, u.grid)


def _max_slope(values: np.ndarray, grid) -> float:
    # second-order stencil on the line: the fourth-order one overshoots next to
    # a Lipschitz kink (7/6 instead of 1 for a peakon crest)
    return float(np.max(np.abs(diff(values, grid, order=2))))


def max_slope(u: Field) -> float:
    """Discrete sup of |u_x|."""
    return _max_slope(u.values, u.grid)


def sup_norm(u: Field) -> float:
    return float(np.max(np.abs(u.values)))


class DecayFit(NamedTuple):
    theta: float
    residual: float


def decay_rate(u: Field, window, floor: float = 1e-300) -> DecayFit:
    """Least-squares slope of -log|u| against x over ``window``."""
    if u.grid.periodic:
        raise DomainError("decay rates are only defined on the line")
    x0, x1 = window
    if not (0 < x0 < x1 <= u.grid.domain.half_length):
        raise ValueError(f"window must satisfy 0 < x0 < x1 <= L, got {window}")
    x = u.x
    sel = (x >= x0) & (x <= x1)
    mag = np.abs(u.values[sel])
    if sel.sum() < 2 or np.all(mag < 1e-14):
        raise DegenerateWindow(f"no signal above 1e-14 on window {window}")
    y = -np.log(np.maximum(mag, floor))
    coef, res, *_ = np.polyfit(x[sel], y, 1, full=True)
    rms = float(np.sqrt(res[0] / sel.sum())) if res.size else 0.0
    return DecayFit(float(coef[0]), rms)


@dataclass
class DiagnosticsSeries:
    t: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    max_slope: list = field(default_factory=list)
    sup_norm: list = field(default_factory=list)

    def record(self, t: float, u: Field) -> None:
        if self.t and t <= self.t[-1]:
            raise ValueError(f"diagnostic times must increase ({t} after {self.t[-1]})")
        ux = diff(u.values, u.grid)
        self.t.append(float(t))
        self.energy.append(integrate(u.values**2 + ux**2, u.grid))
        self.max_slope.append(_max_slope(u.values, u.grid))
        self.sup_norm.append(float(np.max(np.abs(u.values))))

    def __len__(self):
        return len(self.t)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "energy", "max_slope", "sup_norm"])
            for row in zip(self.t, self.energy, self.max_slope, self.sup_norm):
                w.writerow([f"{v:.17g}" for v in row])


# --- vanishing intervals --------------------------------------------------

def find_vanishing_intervals(u: Field, eps: float, min_width: float) -> list[tuple[float, float]]:
    """Maximal runs where max(|u|, |u_x|) < eps, at least ``min_width`` wide.

    On the circle a run crossing x = 0 is returned as [a, b] with b > 1, and an
    all-quiet field gives [0, 1].
    """
    g = u.grid
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_width < 4 * g.dx * (1 - 1e-12):
        raise ValueError(f"min_width must be at least 4*dx = {4 * g.dx:g}")
    ux = diff(u.values, g)
    quiet = np.maximum(np.abs(u.values), np.abs(ux)) < eps
    x = g.x
    if quiet.all():
        return [(float(x[0]), float(x[-1]) if not g.periodic else 1.0)]
    edges = np.diff(quiet.astype(np.int8))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1))
    if quiet[0]:
        starts.insert(0, 0)
    if quiet[-1]:
        ends.append(len(quiet) - 1)
    runs = [(float(x[s]), float(x[e])) for s, e in zip(starts, ends)]
    if g.periodic and quiet[0] and quiet[-1] and len(runs) > 1:
        head = runs.pop(0)
        tail = runs.pop()
        runs.append((tail[0], head[1] + 1.0))
    return [r for r in runs if r[1] - r[0] >= min_width * (1 - 1e-12)]


# --- the probe ------------------------------------------------------------

class Verdict(str, Enum):
    CONSISTENT_WITH_ZERO = "ConsistentWithZeroSolution"
    STRICT_INEQUALITY = "StrictInequalityWitness"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ProbeReport:
    interval: tuple
    t_star: Optional[float]
    F_a: float
    F_b: float
    f_mass: float
    max_u_on_interval: float
    verdict: Verdict
    F_a_nearest: float
    F_b_nearest: float

    @property
    def gap(self) -> float:
        return self.F_b - self.F_a

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        d["verdict"] = self.verdict.value
        d["gap"] = self.gap
        return d


def _check_interval(u: Field, interval):
    a, b = (float(v) for v in interval)
    g = u.grid
    if not a < b:
        raise IntervalOutsideDomain(f"need a < b, got [{a}, {b}]")
    if g.periodic:
        if b - a > 1.0 + 1e-12:
            raise IntervalOutsideDomain(f"interval [{a}, {b}] is longer than the period")
    else:
        L = g.domain.half_length
        tol = 1e-12 * L
        if a < -L - tol or b > L + tol:
            raise IntervalOutsideDomain(f"[{a}, {b}] is not inside [-{L}, {L}]")
    return a, b


def _interp(values: np.ndarray, u: Field, pts) -> np.ndarray:
    g = u.grid
    pts = np.asarray(pts, dtype=float)
    if g.periodic:
        xp = np.append(g.x, 1.0)
        return np.interp(np.mod(pts, 1.0), xp, np.append(values, values[0]))
    return np.interp(pts, g.x, values)


def _nearest(values: np.ndarray, u: Field, p: float) -> float:
    g = u.grid
    if g.periodic:
        return float(values[int(np.round(np.mod(p, 1.0) / g.dx)) % g.n])
    j = int(np.clip(np.round((p + g.domain.half_length) / g.dx), 0, g.size - 1))
    return float(values[j])


def _inside(u: Field, a: float, b: float, closed: bool = True) -> np.ndarray:
    x = u.x
    if u.grid.periodic:
        x = a + np.mod(x - a, 1.0)
    if closed:
        return (x >= a) & (x <= b)
    return (x > a) & (x < b)


def flux_density(m: ModelSpec, u: Field) -> np.ndarray:
    ux = diff(u.values, u.grid)
    return np.asarray(flux_h(m, u.values, ux), dtype=float)


def uc_probe(
    m: ModelSpec,
    u: Field,
    interval,
    t_star: Optional[float] = None,
    mass_tol: Optional[float] = None,
    ineq_tol: float = INEQ_TOL,
) -> ProbeReport:
    a, b = _check_interval(u, interval)
    if mass_tol is None:
        mass_tol = MASS_TOL_PER_LENGTH * u.grid.domain.length
    f = flux_density(m, u)
    F = solver_for(u.grid).grad_inverse(f)
    F_a, F_b = (float(v) for v in _interp(F, u, [a, b]))
    f_mass = integrate(f, u.grid)
    inside = _inside(u, a, b)
    max_u = float(np.max(np.abs(u.values[inside]))) if inside.any() else 0.0
    if f_mass <= mass_tol:
        verdict = Verdict.CONSISTENT_WITH_ZERO
    elif F_b - F_a > ineq_tol:
        verdict = Verdict.STRICT_INEQUALITY
    else:
        verdict = Verdict.INCONCLUSIVE
    return ProbeReport(
        interval=(a, b),
        t_star=t_star,
        F_a=F_a,
        F_b=F_b,
        f_mass=f_mass,
        max_u_on_interval=max_u,
        verdict=verdict,
        F_a_nearest=_nearest(F, u, a),
        F_b_nearest=_nearest(F, u, b),
    )


def fprime_identity_residual(m: ModelSpec, u: Field, interval) -> float:
    """max over grid points in (a, b) of |F' - ((1 - d^2)^{-1} f - f)|.

    Uses d^2 (1 - d^2)^{-1} = (1 - d^2)^{-1} - 1 with F' taken as the discrete
    derivative of F.
    """
    a, b = _check_interval(u, interval)
    solver = solver_for(u.grid)
    f = flux_density(m, u)
    F = solver.grad_inverse(f)
    resid = np.abs(diff(F, u.grid) - (solver.inverse(f) - f))
    inside = _inside(u, a, b, closed=False)
    if not inside.any():
        return 0.0
    return float(np.max(resid[inside]))
