import warnings

import numpy as np
import pytest

from chlab.fields import Field, Grid


def rel_l2(a, b, grid: Grid) -> float:
    w = grid.weights
    return float(np.sqrt(np.dot(w, (a - b) ** 2) / np.dot(w, b * b)))


def smooth_bump(x, lo, hi):
    """C-infinity bump supported on (lo, hi), peak 1."""
    out = np.zeros_like(x)
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    s = (x - c) / r
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def periodic_bump(x, lo, hi):
    """Bump on the arc (lo, hi) of the unit circle; hi may exceed 1."""
    shifted = lo + np.mod(x - lo, 1.0)
    return smooth_bump(shifted, lo, hi)


@pytest.fixture(autouse=True)
def _quiet_truncation():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=r"\|u\(\+-L\)\|")
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance report ----------------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def _report(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
