"""Scenario files (TOML, fixed schema) and the initial-condition registry."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .fields import Field, Grid, circle_grid, line_grid, read_csv
from .integrator import SolverConfig
from .model import BFamily, ModelSpec, from_registry
from .peakons import PeakonState, multipeakon_field

SCHEMA_VERSION = 1


def _peakon(g: Grid, c: float = 1.0, x0: float = 0.0) -> np.ndarray:
    return c * np.exp(-np.abs(g.x - x0))


def _multipeakon(g: Grid, q: list, p: list) -> np.ndarray:
    return multipeakon_field(PeakonState(q, p), g).values


def _gaussian(g: Grid, center: float = 0.0, width: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    if g.periodic:
        r = (g.x - center + 0.5) % 1.0 - 0.5
    else:
        r = g.x - center
    return amplitude * np.exp(-((r / width) ** 2))


def _odd_gaussian(g: Grid, amplitude: float = 1.0, width: float = 1.0) -> np.ndarray:
    x = g.x / width
    return -amplitude * x * np.exp(-(x**2))


def _cosine(g: Grid, k: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    # period-1 wave on the circle; angular wavenumber k on the line
    scale = 2.0 * np.pi if g.periodic else 1.0
    return amplitude * np.cos(scale * k * g.x)


def _decay_profile(g: Grid, theta: float, amplitude: float = 1.0) -> np.ndarray:
    """amplitude * sech(theta x): smooth, with both tails O(exp(-theta |x|))."""
    return amplitude / np.cosh(theta * g.x)


# profile name -> (builder, required keys, optional keys)
PROFILES: dict[str, tuple[Callable[..., np.ndarray], set, set]] = {
    "zero": (lambda g: np.zeros(g.size), set(), set()),
    "peakon": (_peakon, set(), {"c", "x0"}),
    "multipeakon": (_multipeakon, {"q", "p"}, set()),
    "gaussian": (_gaussian, set(), {"center", "width", "amplitude"}),
    "odd_gaussian": (_odd_gaussian, set(), {"amplitude", "width"}),
    "cosine": (_cosine, set(), {"k", "amplitude"}),
    "decay_profile": (_decay_profile, {"theta"}, {"amplitude"}),
    "file": (None, {"path"}, set()),
}


@dataclass
class ProbeConfig:
    eps: float = 1e-8
    min_width: Optional[float] = None
    mass_tol: Optional[float] = None
    ineq_tol: float = 1e-12


@dataclass
class PeakonConfig:
    dt: float = 1e-3
    compare_pde: bool = False


@dataclass
class Scenario:
    model: ModelSpec
    grid: Grid
    initial: dict
    solver: SolverConfig
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    peakon: PeakonConfig = field(default_factory=PeakonConfig)
    output_dir: Path = Path("out")
    source: Optional[Path] = None

    def initial_field(self) -> Field:
        spec = dict(self.initial)
        name = spec.pop("profile")
        if name == "file":
            path = Path(spec["path"])
            if self.source is not None and not path.is_absolute():
                path = self.source.parent / path
            return read_csv(path, self.grid)
        builder = PROFILES[name][0]
        return Field(self.grid, builder(self.grid, **spec))

    def peakon_state(self) -> PeakonState:
        spec = self.initial
        if spec["profile"] == "peakon":
            return PeakonState([spec.get("x0", 0.0)], [spec.get("c", 1.0)])
        if spec["profile"] == "multipeakon":
            return PeakonState(spec["q"], spec["p"])
        raise ConfigError(f"initial.profile {spec['profile']!r} is not a peakon profile")


# --- parsing --------------------------------------------------------------

_TOP_KEYS = {"schema_version", "model", "b", "g", "h",
             "domain", "initial", "solver", "probe", "peakon", "output"}
_SECTION_KEYS = {
    "domain": {"kind", "half_length", "n"},
    "solver": {"t_end", "dt", "cfl", "dt_max", "dealias", "snapshot_every", "blowup_threshold"},
    "probe": {"eps", "min_width", "mass_tol", "ineq_tol"},
    "peakon": {"dt", "compare_pde"},
    "output": {"dir"},
}


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _section(raw: dict, name: str, required: bool = False) -> dict:
    if name not in raw:
        if required:
            raise ConfigError(f"missing required section [{name}]")
        return {}
    table = raw[name]
    if not isinstance(table, dict):
        raise ConfigError(f"'{name}' must be a table")
    _reject_unknown(table, _SECTION_KEYS[name], f"[{name}]")
    return table


def _wrap(where: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_scenario(raw: dict[str, Any], source: Optional[Path] = None) -> Scenario:
    _reject_unknown(raw, _TOP_KEYS, "top level")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")

    kind = raw.get("model", "b-family")
    if kind == "b-family":
        if "g" in raw or "h" in raw:
            raise ConfigError("keys g/h are only valid with model = \"general\"")
        model = _wrap("b", lambda: BFamily(float(raw.get("b", 2.0))))
    elif kind == "general":
        if "b" in raw:
            raise ConfigError("key b is only valid with model = \"b-family\"")
        if "g" not in raw or "h" not in raw:
            raise ConfigError("model = \"general\" needs both g and h")
        model = _wrap("model", from_registry, raw["g"], raw["h"])
    else:
        raise ConfigError(f"model must be \"b-family\" or \"general\", got {kind!r}")

    dom = _section(raw, "domain", required=True)
    if "n" not in dom:
        raise ConfigError("[domain]: missing key n")
    dkind = dom.get("kind", "line")
    if dkind == "line":
        grid = _wrap("[domain]", line_grid, dom.get("half_length", 20.0), dom["n"])
    elif dkind == "circle":
        if "half_length" in dom:
            raise ConfigError("[domain]: half_length is not used on the circle")
        grid = _wrap("[domain]", circle_grid, dom["n"])
    else:
        raise ConfigError(f"[domain].kind must be \"line\" or \"circle\", got {dkind!r}")

    if "initial" not in raw or not isinstance(raw["initial"], dict):
        raise ConfigError("missing required section [initial]")
    initial = dict(raw["initial"])
    profile = initial.get("profile")
    if profile not in PROFILES:
        raise ConfigError(f"[initial].profile {profile!r} not in {sorted(PROFILES)}")
    _, req, opt = PROFILES[profile]
    _reject_unknown(initial, req | opt | {"profile"}, "[initial]")
    missing = req - set(initial)
    if missing:
        raise ConfigError(f"[initial]: profile {profile!r} needs {', '.join(sorted(missing))}")
    if profile in ("multipeakon", "peakon") and grid.periodic:
        raise ConfigError("[initial]: peakon profiles need a line domain")

    sol = _section(raw, "solver", required=True)
    if "t_end" not in sol:
        raise ConfigError("[solver]: missing key t_end")
    solver = _wrap("[solver]", SolverConfig, **sol)

    probe = _wrap("[probe]", ProbeConfig, **_section(raw, "probe"))
    if probe.min_width is not None and probe.min_width < 4 * grid.dx:
        raise ConfigError(f"[probe].min_width must be >= 4*dx = {4 * grid.dx:g}")
    peakon = _wrap("[peakon]", PeakonConfig, **_section(raw, "peakon"))
    out = _section(raw, "output").get("dir", "out")
    scen = Scenario(model, grid, initial, solver, probe, peakon, Path(out), source)
    if profile != "file":
        _wrap("[initial]", scen.initial_field)
    return scen


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return parse_scenario(raw, source=path)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
