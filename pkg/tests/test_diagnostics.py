import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chlab.diagnostics import (
    DiagnosticsSeries,
    Verdict,
    decay_rate,
    energy,
    find_vanishing_intervals,
    flux_density,
    fprime_identity_residual,
    max_slope,
    uc_probe,
)
from chlab.errors import DegenerateWindow, DomainError, IntervalOutsideDomain
from chlab.fields import Field, circle_grid, diff, line_grid
from chlab.kernels import convolution_oracle, solver_for
from chlab.model import BFamily, from_registry

from conftest import periodic_bump, smooth_bump

CH = BFamily(2.0)


def oracle_gap(m, u, a, b):
    """F(b) - F(a) by direct quadrature of the derivative kernel against f."""
    f = Field(u.grid, flux_density(m, u))
    _, dconv = convolution_oracle(f, points=[a, b])
    return dconv[1] - dconv[0]


# --- functionals -------------------------------------------------------------

def test_energy_values():
    assert energy(Field.zeros(line_grid(5, 64))) == 0.0
    g = circle_grid(128)
    u = Field.from_function(g, lambda x: np.sin(2 * np.pi * x))
    assert energy(u) == pytest.approx((1 + 4 * np.pi**2) / 2, rel=1e-12)
    assert energy(u) == pytest.approx(20.239, abs=1e-3)


def test_peakon_energy_and_slope_converge():
    e_err, s_err = [], []
    for n in (1024, 2048, 4096):
        u = Field.from_function(line_grid(20, n), lambda x: np.exp(-np.abs(x)))
        e_err.append(abs(energy(u) - 2))
        s_err.append(abs(max_slope(u) - 1))
    assert e_err[0] > e_err[1] > e_err[2] and e_err[2] < 5e-3
    # first order at the kink: (1 - e^{-2h})/(2h) = 1 - h + O(h^2)
    assert s_err[0] > s_err[1] > s_err[2]
    assert s_err[2] < 1.05 * line_grid(20, 4096).dx


def test_max_slope_values():
    assert max_slope(Field(circle_grid(32), np.full(32, 2.0))) < 1e-12
    u = Field.from_function(circle_grid(256), lambda x: np.sin(2 * np.pi * x))
    assert max_slope(u) == pytest.approx(2 * np.pi, rel=1e-12)


def test_energy_reflection_translation_invariance():
    g = circle_grid(128)
    u = Field.from_function(g, lambda x: np.exp(np.sin(2 * np.pi * x)) * np.cos(4 * np.pi * x))
    e = energy(u)
    assert energy(u.with_values(np.roll(u.values, 17))) == pytest.approx(e, rel=1e-13)
    assert energy(u.with_values(np.roll(u.values[::-1], 1))) == pytest.approx(e, rel=1e-13)
    gl = line_grid(10, 400)
    v = Field.from_function(gl, lambda x: np.exp(-(x - 1) ** 2))
    assert energy(v.with_values(v.values[::-1])) == pytest.approx(energy(v), rel=1e-13)
    shifted = np.concatenate([np.zeros(20), v.values[:-20]])
    assert energy(v.with_values(shifted)) == pytest.approx(energy(v), rel=1e-12)


def test_series_requires_increasing_time():
    s = DiagnosticsSeries()
    u = Field.zeros(circle_grid(16))
    s.record(0.0, u)
    with pytest.raises(ValueError):
        s.record(0.0, u)


# --- decay rate ------------------------------------------------------------

def test_decay_rate_exact_exponential():
    g = line_grid(20, 2000)
    u = Field.from_function(g, lambda x: np.exp(-np.abs(x) / 2))
    fit = decay_rate(u, (5, 15))
    assert fit.theta == pytest.approx(0.5, abs=1e-10)
    assert fit.residual < 1e-10


def test_decay_rate_peakon_tail():
    u = Field.from_function(line_grid(30, 3000), lambda x: np.exp(-np.abs(x - 1)))
    assert decay_rate(u, (5, 25)).theta == pytest.approx(1.0, abs=1e-10)


def test_decay_rate_errors():
    g = line_grid(20, 200)
    with pytest.raises(DegenerateWindow):
        decay_rate(Field.from_function(g, lambda x: 1e-15 * np.exp(-x**2)), (5, 15))
    with pytest.raises(DomainError):
        decay_rate(Field.zeros(circle_grid(32)), (0.1, 0.2))
    with pytest.raises(ValueError):
        decay_rate(Field.zeros(g), (15, 5))


# --- vanishing intervals ------------------------------------------------------

def test_vanishing_intervals_zero_field():
    g = line_grid(5, 100)
    assert find_vanishing_intervals(Field.zeros(g), 1e-8, 0.5) == [(-5.0, 5.0)]
    assert find_vanishing_intervals(Field.zeros(circle_grid(64)), 1e-8, 0.1) == [(0.0, 1.0)]


def test_vanishing_intervals_peakon_tails():
    g = line_grid(40, 8000)
    u = Field.from_function(g, lambda x: np.exp(-np.abs(x)))
    ivs = find_vanishing_intervals(u, 1e-8, 1.0)
    edge = np.log(1e8)  # 18.42...
    assert len(ivs) == 2
    (a1, b1), (a2, b2) = ivs
    assert a1 == -40.0 and b2 == 40.0
    assert b1 == pytest.approx(-edge, abs=2 * g.dx)
    assert a2 == pytest.approx(edge, abs=2 * g.dx)


def test_vanishing_intervals_sine_circle_empty():
    u = Field.from_function(circle_grid(256), lambda x: np.sin(2 * np.pi * x))
    # max(|sin|, 2 pi |cos|) never drops below 2 pi / sqrt(1 + 4 pi^2)
    bound = np.maximum(np.abs(u.values), np.abs(diff(u.values, u.grid))).min()
    assert bound >= 2 * np.pi / np.sqrt(1 + 4 * np.pi**2) - 1e-3
    assert find_vanishing_intervals(u, 1e-3, 0.02) == []


def test_vanishing_intervals_wrap_on_circle():
    g = circle_grid(256)
    u = Field.from_function(g, lambda x: periodic_bump(x, 0.2, 0.6))
    # spectral leakage from the compact bump is ~5e-4 at this resolution
    ivs = find_vanishing_intervals(u, 1e-3, 0.05)
    assert len(ivs) == 1
    a, b = ivs[0]
    # the bump is flatter than eps just inside its support
    assert 0.55 <= a < 1.0 and 1.0 < b <= 1.25


def test_vanishing_intervals_min_width_guard():
    with pytest.raises(ValueError):
        find_vanishing_intervals(Field.zeros(line_grid(1, 100)), 1e-8, 0.01)


# --- probe ------------------------------------------------------------------

@pytest.mark.parametrize("grid, iv", [(line_grid(10, 256), (-2.0, 3.0)), (circle_grid(128), (0.2, 0.7))])
def test_probe_zero_field(grid, iv):
    rep = uc_probe(CH, Field.zeros(grid), iv)
    assert rep.F_a == rep.F_b == 0.0 and rep.f_mass == 0.0
    assert rep.verdict is Verdict.CONSISTENT_WITH_ZERO


def test_probe_line_bump_to_the_right():
    g = line_grid(15, 4096)
    a, b = -2.0, 1.0
    u = Field.from_function(g, lambda x: 0.8 * smooth_bump(x, b + 1, b + 2))
    rep = uc_probe(CH, u, (a, b))
    assert rep.verdict is Verdict.STRICT_INEQUALITY
    assert rep.gap > 0
    assert rep.gap == pytest.approx(oracle_gap(CH, u, a, b), rel=1e-3)
    assert rep.max_u_on_interval == 0.0


def test_probe_circle_bump():
    g = circle_grid(1024)
    a, b = 0.2, 0.5
    u = Field.from_function(g, lambda x: 0.5 * periodic_bump(x, b + 0.05, 0.95))
    rep = uc_probe(CH, u, (a, b))
    assert rep.verdict is Verdict.STRICT_INEQUALITY
    assert rep.gap == pytest.approx(oracle_gap(CH, u, a, b), rel=1e-3)


def test_probe_general_model():
    m = from_registry("burgers", "h1_density")
    g = line_grid(10, 1024)
    u = Field.from_function(g, lambda x: smooth_bump(x, -6, -3))
    rep = uc_probe(m, u, (0.0, 2.0))
    assert rep.verdict is Verdict.STRICT_INEQUALITY
    assert rep.gap == pytest.approx(oracle_gap(m, u, 0.0, 2.0), rel=1e-3)


def test_probe_interval_errors():
    with pytest.raises(IntervalOutsideDomain):
        uc_probe(CH, Field.zeros(line_grid(5, 64)), (-6.0, 0.0))
    with pytest.raises(IntervalOutsideDomain):
        uc_probe(CH, Field.zeros(line_grid(5, 64)), (1.0, 1.0))
    with pytest.raises(IntervalOutsideDomain):
        uc_probe(CH, Field.zeros(circle_grid(64)), (0.1, 1.5))


def test_probe_inconclusive_when_tolerance_straddled():
    g = line_grid(10, 512)
    u = Field.from_function(g, lambda x: smooth_bump(x, 4, 6))
    rep = uc_probe(CH, u, (-2.0, 0.0), ineq_tol=1.0)
    assert rep.verdict is Verdict.INCONCLUSIVE


def test_probe_report_dict():
    g = line_grid(10, 512)
    u = Field.from_function(g, lambda x: smooth_bump(x, 4, 6))
    d = uc_probe(CH, u, (-2.0, 0.0), t_star=0.5).to_dict()
    assert d["verdict"] == "StrictInequalityWitness" and d["t_star"] == 0.5
    assert set(d) >= {"interval", "F_a", "F_b", "f_mass", "max_u_on_interval", "gap"}


def _random_bump_field(grid, rng, a, b):
    x = grid.x
    u = np.zeros(grid.size)
    if grid.periodic:
        lo, hi = b + 0.02, a + 1 - 0.02
        for _ in range(rng.integers(1, 4)):
            c = rng.uniform(lo, hi)
            w = rng.uniform(0.01, min(c - lo, hi - c, 0.2) + 0.01)
            w = min(w, c - lo, hi - c)
            if w > 0.005:
                u += rng.uniform(-1, 1) * periodic_bump(x, c - w, c + w)
    else:
        L = grid.domain.half_length
        for side in (0, 1):
            lo, hi = (-L + 1, a - 0.1) if side == 0 else (b + 0.1, L - 1)
            if hi - lo < 0.5:
                continue
            c = rng.uniform(lo + 0.2, hi - 0.2)
            w = min(rng.uniform(0.2, 2.0), c - lo, hi - c)
            u += rng.uniform(-1, 1) * smooth_bump(x, c - w, c + w)
    return Field(grid, u)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_strict_monotonicity_and_equality_bound(seed, periodic):
    rng = np.random.default_rng(seed)
    if periodic:
        g = circle_grid(512)
        a = rng.uniform(0.05, 0.6)
        b = rng.uniform(a + 0.05, 0.9)
    else:
        g = line_grid(12, 2048)
        a = rng.uniform(-6, 2)
        b = rng.uniform(a + 0.5, 6)
    u = _random_bump_field(g, rng, a, b)
    rep = uc_probe(CH, u, (a, b))
    if rep.f_mass < 1e-6:
        return
    ref = oracle_gap(CH, u, a, b)
    assert rep.gap >= 0.5 * ref > 0
    assert rep.gap <= rep.f_mass * (1 + 1e-6)
    # F is non-decreasing where f vanishes
    F = solver_for(g).grad_inverse(flux_density(CH, u))
    x = g.x if not periodic else a + np.mod(g.x - a, 1.0)
    inside = (x > a) & (x < b)
    dF = diff(F, g)[inside]
    assert np.all(dF >= -1e-10)


# --- F' identity --------------------------------------------------------------

def test_fprime_residual_zero_and_circle():
    assert fprime_identity_residual(CH, Field.zeros(circle_grid(64)), (0.1, 0.9)) == 0.0
    g = circle_grid(256)
    u = Field.from_function(g, lambda x: 0.4 * np.cos(2 * np.pi * x) + 0.2 * np.sin(6 * np.pi * x))
    assert fprime_identity_residual(CH, u, (0.1, 0.9)) <= 1e-9


def test_fprime_residual_line_second_order():
    res = []
    for n in (512, 1024, 2048):
        g = line_grid(12, n)
        u = Field.from_function(g, lambda x: np.exp(-x**2) * (1 + 0.5 * np.sin(2 * x)))
        res.append(fprime_identity_residual(CH, u, (-3.0, 3.0)))
    assert res[0] / res[1] > 3.5 and res[1] / res[2] > 3.5


# --- verdict stability under refinement ----------------------------------------

@pytest.mark.parametrize("case", ["zero", "line", "circle"])
def test_verdict_invariant_under_refinement(case):
    verdicts = []
    for k in (1, 2):
        if case == "zero":
            u, iv = Field.zeros(line_grid(10, 256 * k)), (-1.0, 1.0)
        elif case == "line":
            g = line_grid(10, 512 * k)
            u, iv = Field.from_function(g, lambda x: smooth_bump(x, 3, 4)), (0.0, 2.0)
        else:
            g = circle_grid(256 * k)
            u, iv = Field.from_function(g, lambda x: periodic_bump(x, 0.6, 0.9)), (0.2, 0.5)
        verdicts.append(uc_probe(CH, u, iv).verdict)
    assert verdicts[0] == verdicts[1]
