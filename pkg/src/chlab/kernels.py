"""Green's functions of (1 - d^2/dx^2) and the convolutions built from them.

On the line the kernel is K(x) = exp(-|x|)/2; on the unit circle it is

    G(x) = cosh(x - floor(x) - 1/2) / (2 sinh(1/2)).

``helmholtz_inverse`` and ``helmholtz_grad_inverse`` apply (1 - d^2)^{-1} and
d/dx (1 - d^2)^{-1}.  The circle uses the Fourier symbol; the line uses a
two-sweep recursive exponential filter in which each cell integrates the
kernel exactly against the linear interpolant of the data.  Fields on the
line are taken to vanish outside [-L, L].

``convolution_oracle`` is a slow, direct quadrature of the same operators,
kept independent of the fast paths so tests can compare them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .errors import GridMismatch, IntegerPointError, SizeExceeded
from .fields import Field, Grid

INTEGER_EXCLUSION = 1e-9
ORACLE_MAX_N = 8192
_TWO_SINH_HALF = 2.0 * np.sinh(0.5)


def line_kernel(x):
    return 0.5 * np.exp(-np.abs(x))


def line_kernel_deriv(x):
    """-sgn(x) exp(-|x|)/2 with sgn(0) = 0."""
    return -0.5 * np.sign(x) * np.exp(-np.abs(x))


def periodic_green(x):
    x = np.asarray(x, dtype=float)
    out = np.cosh(x - np.floor(x) - 0.5) / _TWO_SINH_HALF
    return out[()] if out.ndim == 0 else out


def periodic_green_deriv(x, tol: float = INTEGER_EXCLUSION):
    """dG/dx, defined off the integers only."""
    x = np.asarray(x, dtype=float)
    dist = np.abs(x - np.round(x))
    if np.any(dist < tol):
        bad = x[dist < tol] if x.ndim else x
        raise IntegerPointError(f"dG/dx is undefined at integer point(s) {np.ravel(bad)[:3]}")
    out = np.sinh(x - np.floor(x) - 0.5) / _TWO_SINH_HALF
    return out[()] if out.ndim == 0 else out


class HelmholtzSolver:
    """Applies (1 - d^2)^{-1} and d/dx (1 - d^2)^{-1} on one fixed grid."""

    def __init__(self, grid: Grid):
        self.grid = grid
        if grid.periodic:
            k = grid.wavenumbers
            self._inv_symbol = 1.0 / (1.0 + k**2)
            grad = 1j * k / (1.0 + k**2)
            if grid.n % 2 == 0:
                grad[-1] = 0.0
            self._grad_symbol = grad
        else:
            h = grid.dx
            em = np.expm1(-h)  # e^{-h} - 1
            self._decay = 1.0 + em
            # exact integral over one cell of e^{-(distance)} times the linear
            # interpolant: weight on the near node and on the far node
            self._w_near = (h + em) / h
            self._w_far = -em - self._w_near

    def _sweeps(self, f: np.ndarray):
        a, wn, wf = self._decay, self._w_near, self._w_far
        src = np.zeros_like(f)
        src[1:] = wf * f[:-1] + wn * f[1:]
        left = lfilter([1.0], [1.0, -a], src)
        src[:-1] = wn * f[:-1] + wf * f[1:]
        src[-1] = 0.0
        right = lfilter([1.0], [1.0, -a], src[::-1])[::-1]
        return left, right

    def _check(self, f):
        if isinstance(f, Field):
            if f.grid != self.grid:
                raise GridMismatch(f"field grid {f.grid} differs from solver grid {self.grid}")
            return f.values
        f = np.asarray(f, dtype=float)
        if f.shape != (self.grid.size,):
            raise GridMismatch(f"array of shape {f.shape} does not fit grid of {self.grid.size} points")
        return f

    def inverse(self, f) -> np.ndarray:
        v = self._check(f)
        if self.grid.periodic:
            return np.fft.irfft(self._inv_symbol * np.fft.rfft(v), n=self.grid.n)
        left, right = self._sweeps(v)
        return 0.5 * (left + right)

    def grad_inverse(self, f) -> np.ndarray:
        v = self._check(f)
        if self.grid.periodic:
            return np.fft.irfft(self._grad_symbol * np.fft.rfft(v), n=self.grid.n)
        left, right = self._sweeps(v)
        return 0.5 * (right - left)


@lru_cache(maxsize=32)
def solver_for(grid: Grid) -> HelmholtzSolver:
    return HelmholtzSolver(grid)


def helmholtz_inverse(f: Field) -> Field:
    return Field(f.grid, solver_for(f.grid).inverse(f))


def helmholtz_grad_inverse(f: Field) -> Field:
    return Field(f.grid, solver_for(f.grid).grad_inverse(f))


def convolution_oracle(f: Field, points=None, chunk: int = 512):
    """Direct trapezoid-rule convolution of f with the kernel and its derivative.

    Returns ``(K * f, K' * f)`` on the line or ``(G * f, G' * f)`` on the circle,
    evaluated at the grid points or at the given ``points``.  O(n^2); only meant
    as a test oracle.  At zero separation the derivative kernel is taken as 0
    (the mean of its one-sided limits).
    """
    grid = f.grid
    if grid.n > ORACLE_MAX_N:
        raise SizeExceeded(f"oracle limited to n <= {ORACLE_MAX_N}, got {grid.n}")
    y = grid.x
    wf = grid.weights * f.values
    targets = grid.x if points is None else np.atleast_1d(np.asarray(points, dtype=float))
    conv = np.empty(targets.size)
    dconv = np.empty(targets.size)
    for start in range(0, targets.size, chunk):
        t = targets[start:start + chunk]
        r = t[:, None] - y[None, :]
        if grid.periodic:
            k = periodic_green(r)
            frac = r - np.round(r)
            on_int = np.abs(frac) < INTEGER_EXCLUSION
            dk = np.sinh(r - np.floor(r) - 0.5) / _TWO_SINH_HALF
            dk[on_int] = 0.0
        else:
            k = line_kernel(r)
            dk = line_kernel_deriv(r)
        conv[start:start + chunk] = k @ wf
        dconv[start:start + chunk] = dk @ wf
    if points is not None:
        return conv, dconv
    return Field(grid, conv), Field(grid, dconv)


# --- randomized monotonicity check ------------------------------------------

@dataclass
class KernelCheckResult:
    trials: int
    seed: int
    line_min_margin: float
    line_violations: int
    circle_min_margin: float
    circle_violations: int
    floor_agreement: float

    @property
    def passed(self) -> bool:
        return (self.line_violations == 0 and self.circle_violations == 0
                and self.floor_agreement == 1.0)


def _sample_outside(rng, a, b, lo, hi):
    """Uniform samples on [lo, hi] minus [a, b] (elementwise a, b)."""
    left = a - lo
    total = left + (hi - b)
    s = rng.uniform(0.0, 1.0, a.shape) * total
    return np.where(s < left, lo + s, b + (s - left))


def monotonicity_check(trials: int, seed: int, min_gap: float = 1e-3) -> KernelCheckResult:
    """Randomized test of the strict kernel inequalities behind the probe.

    Line: K'(b - y) > K'(a - y) for a < b and y outside [a, b], with a, b in
    [-5, 5] and y in [-10, 10].  Circle: dG(b - y) > dG(a - y) for
    0 < a < b < 1 and y in [0, 1] minus [a, b], together with the floor values
    floor(b - y) = floor(a - y) = 0 for y < a and -1 for y > b.  Endpoints are
    kept ``min_gap`` apart so strictness is resolvable in double precision.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)

    ab = np.sort(rng.uniform(-5.0, 5.0, (trials, 2)), axis=1)
    ab[:, 1] = np.maximum(ab[:, 1], ab[:, 0] + min_gap)
    a, b = ab[:, 0], ab[:, 1]
    y = _sample_outside(rng, a, b, -10.0, 10.0)
    line_margin = line_kernel_deriv(b - y) - line_kernel_deriv(a - y)

    ab = np.sort(rng.uniform(min_gap, 1.0 - min_gap, (trials, 2)), axis=1)
    ab[:, 1] = np.minimum(np.maximum(ab[:, 1], ab[:, 0] + min_gap), 1.0 - min_gap / 2)
    a, b = ab[:, 0], ab[:, 1]
    y = _sample_outside(rng, a, b, 0.0, 1.0)
    # always exercise the closed ends of [0, 1]
    y[0] = 0.0
    if trials > 1:
        y[1] = 1.0
    circ_margin = periodic_green_deriv(b - y) - periodic_green_deriv(a - y)
    fa, fb = np.floor(a - y), np.floor(b - y)
    expected = np.where(y < a, 0.0, -1.0)
    floor_ok = (fa == expected) & (fb == expected)

    return KernelCheckResult(
        trials=trials,
        seed=seed,
        line_min_margin=float(line_margin.min()),
        line_violations=int(np.sum(~(line_margin > 0))),
        circle_min_margin=float(circ_margin.min()),
        circle_violations=int(np.sum(~(circ_margin > 0))),
        floor_agreement=float(floor_ok.mean()),
    )
