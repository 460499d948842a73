"""Scenario configuration: a single JSON document."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import SystemParams
from .errors import ConfigError
from .teleportation import BlochAngles

SCENARIOS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "validate", "sweep")
AXIS_VARIABLES = ("kt", "t", "g", "k", "g_over_k", "theta", "phi", "vartheta", "varphi")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Axis:
    """One grid axis: either ``points`` evenly spaced values on [min, max] or explicit ``values``."""

    variable: str
    min: float | None = None
    max: float | None = None
    points: int | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.variable not in AXIS_VARIABLES:
            raise ConfigError(f"unknown grid variable {self.variable!r}; expected one of {AXIS_VARIABLES}")
        if self.values is not None:
            if len(self.values) == 0:
                raise ConfigError(f"axis {self.variable!r} has an empty value list")
            if not all(math.isfinite(v) for v in self.values):
                raise ConfigError(f"axis {self.variable!r} has non-finite values")
            return
        if self.min is None or self.max is None or self.points is None:
            raise ConfigError(f"axis {self.variable!r} needs min, max and points (or values)")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError(f"axis {self.variable!r} bounds must be finite")
        if self.points < 2:
            raise ConfigError(f"axis {self.variable!r} needs at least 2 points, got {self.points}")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.variable!r} needs min < max, got [{self.min}, {self.max}]")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        return np.linspace(self.min, self.max, self.points)

    def describe(self) -> str:
        if self.values is not None:
            return f"{self.variable} in {{{', '.join(repr(v) for v in self.values)}}}"
        return f"{self.variable} in [{self.min!r}, {self.max!r}] x {self.points}"

    def to_dict(self) -> dict:
        if self.values is not None:
            return {"variable": self.variable, "values": list(self.values)}
        return {"variable": self.variable, "min": self.min, "max": self.max, "points": self.points}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: SystemParams = field(default_factory=SystemParams)
    grid: tuple[Axis, ...] = ()
    t: float | None = None
    input: BlochAngles = field(default_factory=lambda: BlochAngles(math.pi / 2, 0.0))
    metrics: tuple[str, ...] = ()
    fock_dim: int | None = None
    tol: float = 1e-10
    seed: int = 0
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.fock_dim is not None and self.fock_dim < 1:
            raise ConfigError(f"fock_dim must be a positive integer, got {self.fock_dim}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        names = [a.variable for a in self.grid]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate grid variables: {names}")
        if "kt" in names and "t" in names:
            raise ConfigError("use either kt or t as the time axis, not both")


_CONFIG_KEYS = {"scenario", "params", "grid", "t", "input", "metric", "metrics", "fock_dim",
                "tol", "seed", "output_path", "format"}


def _number(raw, name):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{name} must be a number, got {raw!r}")
    return float(raw)


def _axis(raw) -> Axis:
    if not isinstance(raw, dict) or "variable" not in raw:
        raise ConfigError(f"grid axis must be an object with a 'variable' key, got {raw!r}")
    extra = set(raw) - {"variable", "min", "max", "points", "values"}
    if extra:
        raise ConfigError(f"unknown grid axis keys {sorted(extra)}")
    name = raw["variable"]
    values = raw.get("values")
    if values is not None:
        if not isinstance(values, list):
            raise ConfigError(f"values for axis {name!r} must be a list")
        return Axis(name, values=tuple(_number(v, f"{name} value") for v in values))
    points = raw.get("points")
    if points is not None and (isinstance(points, bool) or not isinstance(points, int)):
        raise ConfigError(f"points for axis {name!r} must be an integer")
    return Axis(
        name,
        min=None if raw.get("min") is None else _number(raw["min"], f"{name}.min"),
        max=None if raw.get("max") is None else _number(raw["max"], f"{name}.max"),
        points=points,
    )


def config_from_dict(data: dict, scenario: str | None = None) -> ScenarioConfig:
    """Build a config from parsed JSON; ``scenario`` (from the command line) must agree with the file."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    file_scenario = data.get("scenario")
    if scenario is not None and file_scenario is not None and scenario != file_scenario:
        raise ConfigError(f"command line asks for {scenario!r} but config declares {file_scenario!r}")
    scenario = scenario or file_scenario
    if scenario is None:
        raise ConfigError("no scenario given")

    raw_params = data.get("params", {})
    if not isinstance(raw_params, dict):
        raise ConfigError("params must be an object")
    bad = set(raw_params) - {"g", "k", "theta", "phi"}
    if bad:
        raise ConfigError(f"unknown params keys {sorted(bad)}")
    try:
        params = SystemParams(**{k: _number(v, k) for k, v in raw_params.items()})
        raw_in = data.get("input", {})
        if not isinstance(raw_in, dict) or set(raw_in) - {"vartheta", "varphi"}:
            raise ConfigError("input must be an object with vartheta/varphi")
        inp = BlochAngles(_number(raw_in.get("vartheta", math.pi / 2), "vartheta"),
                          _number(raw_in.get("varphi", 0.0), "varphi"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    raw_grid = data.get("grid", [])
    if not isinstance(raw_grid, list):
        raise ConfigError("grid must be a list of axes")
    metrics = data.get("metrics", [])
    if "metric" in data:
        metrics = [data["metric"]] + list(metrics)
    if isinstance(metrics, str):
        metrics = [metrics]
    if not all(isinstance(m, str) for m in metrics):
        raise ConfigError("metrics must be names")

    fock_dim = data.get("fock_dim")
    if fock_dim is not None and (isinstance(fock_dim, bool) or not isinstance(fock_dim, int)):
        raise ConfigError("fock_dim must be an integer")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    t = data.get("t")
    if t is not None:
        t = _number(t, "t")
        if t < 0:
            raise ConfigError("t must be non-negative")
    return ScenarioConfig(
        scenario=scenario,
        params=params,
        grid=tuple(_axis(a) for a in raw_grid),
        t=t,
        input=inp,
        metrics=tuple(metrics),
        fock_dim=fock_dim,
        tol=_number(data.get("tol", 1e-10), "tol"),
        seed=seed,
        output_path=data.get("output_path"),
        format=data.get("format", "csv"),
    )


def load_config(path: str | Path | None, scenario: str | None = None) -> ScenarioConfig:
    if path is None:
        return config_from_dict({}, scenario)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(data, scenario)
