"""Grids, sampled fields, discrete derivatives and norms.

Two spatial settings are supported: the truncated line [-L, L] sampled at
n + 1 points including both endpoints, and the unit circle R/Z sampled at
n points x_j = j/n (the duplicate point x = 1 is dropped).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np

TRUNCATION_TOL = 1e-6
MIN_POINTS = 16


@dataclass(frozen=True)
class Line:
    half_length: float

    def __post_init__(self):
        if not (np.isfinite(self.half_length) and self.half_length > 0):
            raise ValueError(f"half_length must be positive, got {self.half_length}")

    @property
    def length(self) -> float:
        return 2.0 * self.half_length


@dataclass(frozen=True)
class Circle:
    @property
    def length(self) -> float:
        return 1.0


Domain = Union[Line, Circle]


@dataclass(frozen=True)
class Grid:
    domain: Domain
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise ValueError(f"grid needs an integer n >= {MIN_POINTS}, got {self.n}")

    @property
    def periodic(self) -> bool:
        return isinstance(self.domain, Circle)

    @property
    def dx(self) -> float:
        return self.domain.length / self.n

    @property
    def size(self) -> int:
        """Number of stored samples."""
        return self.n if self.periodic else self.n + 1

    @property
    def x(self) -> np.ndarray:
        j = np.arange(self.size)
        if self.periodic:
            return j * self.dx
        return -self.domain.half_length + j * self.dx

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        w = np.full(self.size, self.dx)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.dx
        return w

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers 2*pi*k for the rfft layout (circle only)."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=1.0 / self.n)


def line_grid(half_length: float, n: int) -> Grid:
    return Grid(Line(float(half_length)), int(n))


def circle_grid(n: int) -> Grid:
    return Grid(Circle(), int(n))


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a real function on a grid. Immutable after construction."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not self.grid.periodic:
            edge = max(abs(v[0]), abs(v[-1]))
            if edge > TRUNCATION_TOL:
                warnings.warn(
                    f"|u(+-L)| = {edge:.3g} exceeds truncation tolerance {TRUNCATION_TOL:g}",
                    stacklevel=3,
                )

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, np.broadcast_to(func(grid.x), (grid.size,)))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.size))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    def __len__(self):
        return self.grid.size


# --- derivatives ----------------------------------------------------------

def _diff_line(v: np.ndarray, dx: float, order: int) -> np.ndarray:
    d = np.empty_like(v)
    if order == 2:
        d[1:-1] = (v[2:] - v[:-2]) / (2 * dx)
        d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dx)
        d[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * dx)
        return d
    if order != 4:
        raise ValueError(f"difference order must be 2 or 4, got {order}")
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * dx)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * dx)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * dx)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * dx)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * dx)
    return d


def _diff_circle(v: np.ndarray, grid: Grid) -> np.ndarray:
    vh = np.fft.rfft(v)
    ik = 1j * grid.wavenumbers
    if grid.n % 2 == 0:
        ik[-1] = 0.0  # Nyquist mode has no odd-derivative partner
    return np.fft.irfft(ik * vh, n=grid.n)


def diff(values: np.ndarray, grid: Grid, order: int = 4) -> np.ndarray:
    """Array-level first derivative; see :func:`derivative`."""
    if grid.periodic:
        return _diff_circle(values, grid)
    return _diff_line(values, grid.dx, order)


def derivative(u: Field, order: int = 4) -> Field:
    """d/dx of a field: spectral on the circle, centred differences on the line.

    ``order`` (2 or 4) selects the line stencil; boundary rows use one-sided
    stencils of the same order.
    """
    return Field(u.grid, diff(u.values, u.grid, order))


def momentum(u: Field, order: int = 4) -> Field:
    """y = u - u_xx."""
    g = u.grid
    if g.periodic:
        k = g.wavenumbers
        return Field(g, np.fft.irfft((1.0 + k**2) * np.fft.rfft(u.values), n=g.n))
    d2 = diff(diff(u.values, g, order), g, order)
    return Field(g, u.values - d2)


# --- norms ----------------------------------------------------------------

def integrate(values: np.ndarray, grid: Grid) -> float:
    return float(np.dot(grid.weights, values))


def norm_l2(u: Field) -> float:
    return float(np.sqrt(integrate(u.values**2, u.grid)))


def norm_sup(u: Field) -> float:
    return float(np.max(np.abs(u.values)))


def norm_h1(u: Field, order: int = 4) -> float:
    ux = diff(u.values, u.grid, order)
    return float(np.sqrt(integrate(u.values**2 + ux**2, u.grid)))


# --- snapshot files -------------------------------------------------------

def write_csv(u: Field, path) -> None:
    """Write ``x,u`` rows with 17 significant digits (exact double round trip)."""
    data = np.column_stack([u.x, u.values])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,u", comments="")


def read_csv(path, grid: Grid) -> Field:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    if header != "x,u":
        raise ValueError(f"{path}: expected header 'x,u', got {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape != (grid.size, 2):
        raise ValueError(f"{path}: {data.shape[0]} rows do not match grid of {grid.size} points")
    if not np.allclose(data[:, 0], grid.x, rtol=0, atol=1e-9 * grid.domain.length):
        raise ValueError(f"{path}: x column does not match the grid")
    return Field(grid, data[:, 1])
