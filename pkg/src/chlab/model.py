"""Equation family: b-equations and the general (g, h) class.

Every model is evolved in the non-local form

    u_t + g(u, u_x) + d/dx (1 - d^2)^{-1} h(u, u_x) = 0.

For the b-family g = u u_x and h = (b/2) u^2 + ((3 - b)/2) u_x^2; b = 2 is
Camassa-Holm and b = 3 is Degasperis-Procesi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, PositivityViolation
from .fields import Field, Grid, diff
from .kernels import solver_for

Flux = Callable[[np.ndarray, np.ndarray], np.ndarray]

AUDIT_SAMPLES = 4096
AUDIT_SEED = 20240601


@dataclass(frozen=True)
class BFamily:
    b: float

    def __post_init__(self):
        if not (0.0 <= self.b <= 3.0):
            raise ValueError(f"b must lie in [0, 3], got {self.b}")

    @property
    def name(self) -> str:
        return {2.0: "camassa-holm", 3.0: "degasperis-procesi"}.get(float(self.b), f"b={self.b:g}")


@dataclass(frozen=True)
class General:
    """User-selected g and h.

    ``h_uses_ux=False`` declares that h depends on u alone, in which case
    positivity is only required for u != 0.  The positivity audit runs at
    construction unless ``audit=False``.
    """

    g: Flux
    h: Flux
    h_uses_ux: bool = True
    name: str = "general"
    audit: bool = field(default=True, compare=False)

    def __post_init__(self):
        for fn, label in ((self.g, "g"), (self.h, "h")):
            v = float(fn(np.float64(0.0), np.float64(0.0)))
            if v != 0.0:
                raise ValueError(f"{label}(0, 0) must vanish, got {v}")
        if self.audit:
            positivity_audit(self)


ModelSpec = Union[BFamily, General]


def flux_h(m: ModelSpec, u, ux):
    if isinstance(m, BFamily):
        return 0.5 * m.b * u * u + 0.5 * (3.0 - m.b) * ux * ux
    return m.h(u, ux)


def advection_g(m: ModelSpec, u, ux):
    if isinstance(m, BFamily):
        return u * ux
    return m.g(u, ux)


@dataclass
class AuditReport:
    samples: int
    min_value: float
    argmin: tuple


def positivity_audit(m: General, samples: int = AUDIT_SAMPLES, seed: int = AUDIT_SEED) -> AuditReport:
    """Sample h off the origin and raise on the first non-positive value.

    Points on both coordinate axes are checked first, then ``samples`` random
    points with log-uniform radius in [1e-6, 1e3] and uniform angle.  When h
    depends on u only, the u_x axis is skipped and u is sampled away from 0.
    """
    if not isinstance(m, General):
        raise TypeError("positivity audit applies to General specs only")
    rng = np.random.default_rng(seed)
    radii = np.logspace(-6, 3, 19)
    axis_pts = [np.column_stack([s * radii, 0 * radii]) for s in (1.0, -1.0)]
    if m.h_uses_ux:
        axis_pts += [np.column_stack([0 * radii, s * radii]) for s in (1.0, -1.0)]
    r = 10.0 ** rng.uniform(-6.0, 3.0, samples)
    phi = rng.uniform(0.0, 2.0 * np.pi, samples)
    rand_pts = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    if not m.h_uses_ux:
        rand_pts = rand_pts[np.abs(rand_pts[:, 0]) > 0.0]
    pts = np.vstack(axis_pts + [rand_pts])
    vals = np.asarray(m.h(pts[:, 0], pts[:, 1]), dtype=float)
    bad = np.flatnonzero(~(vals > 0.0))
    if bad.size:
        i = bad[0]
        raise PositivityViolation(pts[i], vals[i])
    i = int(np.argmin(vals))
    return AuditReport(len(pts), float(vals[i]), tuple(pts[i]))


# --- spatial right-hand side ---------------------------------------------

def _dealias_mask(grid: Grid) -> np.ndarray:
    k = np.arange(grid.n // 2 + 1)
    return k <= grid.n // 3


def rhs_array(m: ModelSpec, u: np.ndarray, grid: Grid, dealias: bool = False, order: int = 4) -> np.ndarray:
    """u_t = -g(u, u_x) - d/dx (1 - d^2)^{-1} h(u, u_x) on raw samples."""
    if dealias and grid.periodic:
        mask = _dealias_mask(grid)
        u = np.fft.irfft(np.fft.rfft(u) * mask, n=grid.n)
    ux = diff(u, grid, order)
    adv = advection_g(m, u, ux)
    flux = flux_h(m, u, ux)
    if dealias and grid.periodic:
        adv = np.fft.irfft(np.fft.rfft(adv) * mask, n=grid.n)
        flux = np.fft.irfft(np.fft.rfft(flux) * mask, n=grid.n)
    return -adv - solver_for(grid).grad_inverse(flux)


def rhs(m: ModelSpec, u: Field, dealias: bool = False, order: int = 4) -> Field:
    return Field(u.grid, rhs_array(m, u.values, u.grid, dealias, order))


# --- named built-ins for configuration files ------------------------------

G_REGISTRY: dict[str, Flux] = {
    "burgers": lambda u, ux: u * ux,
    "cubic_burgers": lambda u, ux: u * u * ux,
    "cube": lambda u, ux: u**3,
    "zero": lambda u, ux: 0.0 * u,
}

# name -> (h, depends on u_x)
H_REGISTRY: dict[str, tuple[Flux, bool]] = {
    "camassa_holm": (lambda u, ux: u * u + 0.5 * ux * ux, True),
    "h1_density": (lambda u, ux: u * u + ux * ux, True),
    "quartic": (lambda u, ux: u**4 + ux**2 + u * u, True),
    "u_squared": (lambda u, ux: u * u, False),
}


def from_registry(g_name: str, h_name: str) -> General:
    try:
        g = G_REGISTRY[g_name]
    except KeyError:
        raise ConfigError(f"unknown g {g_name!r}; choose from {sorted(G_REGISTRY)}") from None
    try:
        h, uses_ux = H_REGISTRY[h_name]
    except KeyError:
        raise ConfigError(f"unknown h {h_name!r}; choose from {sorted(H_REGISTRY)}") from None
    return General(g, h, h_uses_ux=uses_ux, name=f"{g_name}/{h_name}")
