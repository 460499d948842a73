"""Figure datasets and free-form parameter sweeps."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Callable

import numpy as np

from . import metrics as M
from . import teleportation as T
from .config import Axis, ScenarioConfig
from .dynamics import SystemParams, scalar_profile
from .errors import ConfigError, JCLabError
from .states import joint_state
from .teleportation import BlochAngles


def _needs_t(fn):
    def wrapped(p, t, inp):
        if t is None:
            raise ConfigError("this metric needs a time: add a kt or t axis, or set 't' in the config")
        return fn(p, t, inp)
    return wrapped


def _probs(p, t):
    return T.channel_probabilities_closed_form(p, t)


METRICS: dict[str, Callable[[SystemParams, float | None, BlochAngles], float]] = {
    "alpha_imag": _needs_t(lambda p, t, i: scalar_profile(p, t).alpha.imag),
    "f": _needs_t(lambda p, t, i: scalar_profile(p, t).f),
    "x": _needs_t(lambda p, t, i: scalar_profile(p, t).x),
    "concurrence": _needs_t(lambda p, t, i: M.concurrence_closed_form(p, t)),
    "concurrence_wootters": _needs_t(lambda p, t, i: M.concurrence(joint_state(p, t))),
    "entanglement_of_formation": _needs_t(
        lambda p, t, i: M.entanglement_of_formation(min(1.0, M.concurrence_closed_form(p, t)))),
    "bell_max": _needs_t(lambda p, t, i: M.bell_max_closed_form(p, t)),
    "bell_max_horodecki": _needs_t(lambda p, t, i: M.bell_max(joint_state(p, t))),
    "linear_entropy_joint": _needs_t(lambda p, t, i: M.linear_entropies_closed_form(p, t).joint),
    "linear_entropy_atom": _needs_t(lambda p, t, i: M.linear_entropies_closed_form(p, t).atom),
    "linear_entropy_field": _needs_t(lambda p, t, i: M.linear_entropies_closed_form(p, t).field),
    "p0": _needs_t(lambda p, t, i: _probs(p, t).p0),
    "p1": _needs_t(lambda p, t, i: _probs(p, t).p1),
    "p2": _needs_t(lambda p, t, i: _probs(p, t).p2),
    "p3": _needs_t(lambda p, t, i: _probs(p, t).p3),
    "fidelity_p0": _needs_t(lambda p, t, i: T.fidelity_p0_closed_form(_probs(p, t), i.vartheta)),
    "average_fidelity_p0": _needs_t(lambda p, t, i: T.average_fidelity_p0(p, t)),
    "optimal_fidelity_p0": _needs_t(lambda p, t, i: T.optimal_fidelity(_probs(p, t).max, 2)),
    "output_concurrence_p1": _needs_t(lambda p, t, i: T.output_concurrence_closed_form(_probs(p, t), i.vartheta)),
    "fidelity_p1": _needs_t(lambda p, t, i: T.fidelity_p1_closed_form(_probs(p, t), i.vartheta)),
    "optimal_fidelity_p1": _needs_t(lambda p, t, i: T.optimal_fidelity(_probs(p, t).max ** 2, 4)),
    "average_fidelity_p1": _needs_t(lambda p, t, i: T.average_fidelity_p1(_probs(p, t))),
    "optimal_fidelity_p1_literal": _needs_t(lambda p, t, i: T.optimal_fidelity_p1_literal(p, t)),
    "bell_death_time": lambda p, t, i: M.bell_death_time(p),
    "bell_death_kt": lambda p, t, i: M.bell_death_time(p) * p.k,
}


@dataclass(frozen=True)
class Figure:
    axes: tuple[Axis, ...]
    metrics: tuple[str, ...]
    constants: tuple[tuple[str, float], ...] = ()


_KT = Axis("kt", 0.0, 6.0, 301)
FIGURES = {
    "fig1": Figure((Axis("kt", 0.0, 6.0, 101), Axis("g", 0.1, 2.0, 101)), ("concurrence",)),
    "fig2": Figure((_KT,), ("concurrence", "bell_max"), (("classical_bound", 2.0),)),
    "fig3": Figure((_KT,), ("linear_entropy_joint", "linear_entropy_atom", "linear_entropy_field")),
    "fig4": Figure((_KT,), ("optimal_fidelity_p0", "average_fidelity_p0"),
                   (("classical_fidelity", T.CLASSICAL_ONE_QUBIT),)),
    "fig5": Figure((Axis("kt", 0.0, 6.0, 101), Axis("theta", 0.0, math.pi, 101)), ("output_concurrence_p1",)),
    "fig6": Figure((_KT,), ("optimal_fidelity_p1", "optimal_fidelity_p1_literal"),
                   (("classical_fidelity", T.CLASSICAL_TWO_QUBIT),)),
}


@dataclass(frozen=True)
class Dataset:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]]
    axes: tuple[Axis, ...]
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def resolve_point(base: SystemParams, t: float | None, inp: BlochAngles,
                  names: tuple[str, ...], coords) -> tuple[SystemParams, float | None, BlochAngles]:
    """Apply grid coordinates to the base parameters, input and time."""
    values = dict(zip(names, (float(c) for c in coords)))
    changes = {k: values[k] for k in ("g", "k", "theta", "phi") if k in values}
    try:
        params = base.with_(**changes)
        if "g_over_k" in values:
            if params.k == 0:
                raise ConfigError("g_over_k axis needs k > 0")
            params = params.with_(g=values["g_over_k"] * params.k)
        if "vartheta" in values or "varphi" in values:
            inp = BlochAngles(values.get("vartheta", inp.vartheta), values.get("varphi", inp.varphi))
    except ValueError as exc:
        raise ConfigError(f"grid point {values}: {exc}") from None
    if "kt" in values:
        if params.k == 0:
            raise ConfigError("kt axis needs k > 0; use a t axis when k = 0")
        t = values["kt"] / params.k
    elif "t" in values:
        t = values["t"]
    if t is not None and t < 0:
        raise ConfigError(f"negative time at grid point {values}")
    return params, t, inp


def _evaluate_row(base: SystemParams, t: float | None, inp: BlochAngles, names: tuple[str, ...],
                  metric_names: tuple[str, ...], constants: tuple[tuple[str, float], ...], coords):
    params, tt, i = resolve_point(base, t, inp, names, coords)
    out = []
    for name in metric_names:
        value = float(METRICS[name](params, tt, i))
        if not math.isfinite(value):
            raise JCLabError(f"{name} is not finite at {dict(zip(names, coords))}")
        out.append(value)
    return tuple(float(c) for c in coords) + tuple(out) + tuple(v for _, v in constants)


def thread_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("JCLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"JCLAB_THREADS must be an integer, got {env!r}") from None
    return 1


def parallel_map(func, items, threads: int = 1) -> list:
    """``map`` over a process pool; results keep the order of ``items``."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(it) for it in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def build_dataset(config: ScenarioConfig, axes: tuple[Axis, ...], metric_names: tuple[str, ...],
                  constants: tuple[tuple[str, float], ...] = (), threads: int = 1) -> Dataset:
    if not axes:
        raise ConfigError("grid is empty")
    unknown = [m for m in metric_names if m not in METRICS]
    if unknown:
        raise ConfigError(f"unknown metric(s) {unknown}; available: {sorted(METRICS)}")
    if not metric_names:
        raise ConfigError("no metric requested")
    names = tuple(a.variable for a in axes)
    grid = list(itertools.product(*(a.grid() for a in axes)))
    func = partial(_evaluate_row, config.params, config.t, config.input, names, metric_names, constants)
    rows = parallel_map(func, grid, threads)
    columns = names + metric_names + tuple(n for n, _ in constants)
    meta = {
        "scenario": config.scenario,
        "params": {"g": config.params.g, "k": config.params.k,
                   "theta": config.params.theta, "phi": config.params.phi},
        "input": {"vartheta": config.input.vartheta, "varphi": config.input.varphi},
        "t": config.t,
        "grid": [a.to_dict() for a in axes],
    }
    return Dataset(columns, rows, axes, meta)


def run_scenario(config: ScenarioConfig, threads: int = 1) -> Dataset:
    """Dataset for one of the figure scenarios, or for ``sweep``."""
    if config.scenario == "sweep":
        if not config.grid:
            raise ConfigError("sweep needs a non-empty grid")
        if len(config.grid) > 2:
            raise ConfigError("sweep supports one or two grid axes")
        return build_dataset(config, config.grid, config.metrics, threads=threads)
    if config.scenario not in FIGURES:
        raise ConfigError(f"{config.scenario!r} is not a dataset scenario")
    fig = FIGURES[config.scenario]
    axes = config.grid or fig.axes
    return build_dataset(config, axes, fig.metrics, fig.constants, threads=threads)


def sweep(config: ScenarioConfig, threads: int = 1) -> Dataset:
    return run_scenario(replace(config, scenario="sweep"), threads)


# -- output ----------------------------------------------------------------

def format_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ds.columns)
    for row in ds.rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else str(v) for v in row])
    return buf.getvalue()


def format_json(ds: Dataset) -> str:
    doc = dict(ds.meta)
    doc["columns"] = list(ds.columns)
    doc["rows"] = [list(r) for r in ds.rows]
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_dataset(ds: Dataset, path: str | Path, fmt: str = "csv") -> Path:
    path = Path(path)
    text = format_csv(ds) if fmt == "csv" else format_json(ds)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def summarize(ds: Dataset) -> list[str]:
    """Human-readable lines: grid, row count, and extrema of each metric column."""
    lines = [f"scenario: {ds.meta.get('scenario')}",
             "grid: " + "; ".join(a.describe() for a in ds.axes),
             f"rows: {len(ds.rows)}"]
    n_axes = len(ds.axes)
    for j, name in enumerate(ds.columns[n_axes:], start=n_axes):
        col = np.array([r[j] for r in ds.rows])
        k = int(np.argmax(col))
        at = ", ".join(f"{ds.columns[i]}={ds.rows[k][i]:.6g}" for i in range(n_axes))
        lines.append(f"{name}: min={col.min():.6g} max={col.max():.6g} (at {at})")
    scenario = ds.meta.get("scenario")
    if scenario in ("fig2",):
        p = SystemParams(**ds.meta["params"])
        try:
            lines.append(f"bell_death_kt: {M.bell_death_time(p) * p.k:.10g}")
        except (JCLabError, ValueError) as exc:
            lines.append(f"bell_death_kt: n/a ({exc})")
    if scenario in ("fig4", "fig6"):
        metric = "optimal_fidelity_p0" if scenario == "fig4" else "optimal_fidelity_p1"
        bound = ds.column("classical_fidelity")[0]
        above = ds.column(ds.axes[0].variable)[ds.column(metric) > bound]
        if above.size:
            lines.append(f"{metric} > {bound:.6g} for {ds.axes[0].variable} in "
                         f"[{above.min():.6g}, {above.max():.6g}] ({above.size} grid points)")
        else:
            lines.append(f"{metric} never exceeds {bound:.6g} on this grid")
    return lines
