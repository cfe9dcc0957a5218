"""Named, self-contained reproductions of the reference figures.

Each scenario produces deterministic CSV tables, static SVG plots and a
summary of the headline metrics (optimal drive ratios, maximal squeezing,
Bogoliubov occupancies). Re-running an identical spec yields byte-identical
files: there is no randomness anywhere in the pipeline, floats are formatted
with a fixed precision, and the SVG backend is configured with a fixed hash
salt and no date metadata.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields as dataclass_fields, replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

import numpy as np  # noqa: E402

from . import dispersive_system as disp  # noqa: E402
from . import linear_system as lin  # noqa: E402
from .errors import DomainError  # noqa: E402
from .gaussian import SqueezingTrace, VACUUM_VARIANCE, wigner_gaussian  # noqa: E402

plt.rcParams["svg.hashsalt"] = "magsq"

SCENARIO_NAMES = ("fig2", "fig3", "fig5", "fig6")

_FIG6_PHASES = (0.5 * math.pi, 0.0, 0.2 * math.pi, 0.92 * math.pi)
_FIG6_PANELS = ("a", "b", "c", "d")
_FIG3_TEMPERATURES = (0.01, 0.5, 1.0)


@dataclass(frozen=True)
class ScenarioSpec:
    """A named scenario with optional parameter overrides.

    ``overrides`` patch the model parameter set (dataclass field names);
    ``schedule`` patches the protocol schedule (fig6 only). Wigner grids use
    ``wigner_points`` samples per axis over +/- ``wigner_halfwidth`` vacuum
    standard deviations.
    """

    name: str
    overrides: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    wigner_points: int = 201
    wigner_halfwidth: float = 5.0

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise DomainError(
                f"unknown scenario {self.name!r}; expected one of {SCENARIO_NAMES}"
            )


@dataclass(frozen=True)
class ScenarioResult:
    """Tables (CSV text), figures (SVG bytes) and summary metrics."""

    name: str
    tables: dict
    figures: dict
    summary: dict


def _worker_count() -> int:
    env = os.environ.get("MAGSQ_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _map_ordered(fn, items):
    """Apply fn across items with a bounded pool, merging in input order."""
    items = list(items)
    workers = min(_worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(value: float) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    return f"{value:.12g}"


def _table(columns: dict) -> str:
    """Render named columns as CSV with a header row (deterministic)."""
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    length = arrays[0].size if arrays else 0
    lines = [",".join(names)]
    for i in range(length):
        lines.append(",".join(_fmt(arr[i]) for arr in arrays))
    return "\n".join(lines) + "\n"


def _wigner_table(q_axis, p_axis, density) -> str:
    """Matrix CSV with the q and p axis vectors prepended: the header row
    carries the p axis, the first column the q axis."""
    lines = ["q\\p," + ",".join(_fmt(p) for p in p_axis)]
    for i, q in enumerate(q_axis):
        lines.append(_fmt(q) + "," + ",".join(_fmt(w) for w in density[i]))
    return "\n".join(lines) + "\n"


def _save_svg(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _line_svg(x, series: dict, xlabel: str, ylabel: str) -> bytes:
    fig, ax = plt.subplots(figsize=(4.8, 3.4), constrained_layout=True)
    styles = ("-", "--", "-.", ":")
    for k, (label, y) in enumerate(series.items()):
        ax.plot(x, y, styles[k % len(styles)], label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(frameon=False, fontsize=8)
    ax.grid(alpha=0.3)
    return _save_svg(fig)


def _wigner_svg(q_axis, p_axis, density, xlabel: str, ylabel: str) -> bytes:
    fig, ax = plt.subplots(figsize=(4.0, 3.4), constrained_layout=True)
    mesh = ax.pcolormesh(q_axis, p_axis, density.T, cmap="viridis", shading="auto",
                         rasterized=False)
    fig.colorbar(mesh, ax=ax, label="W(q, p)")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_aspect("equal")
    return _save_svg(fig)


def _wigner_axes(spec: ScenarioSpec):
    half = spec.wigner_halfwidth * math.sqrt(VACUUM_VARIANCE)
    axis = np.linspace(-half, half, spec.wigner_points)
    return axis, axis.copy()


def _ratio_grid(values_fn, coarse_step=0.02, fine_step=0.005,
                window=0.06, upper=0.99) -> np.ndarray:
    """Two-pass ratio grid: coarse everywhere, fine around each maximum
    reported by ``values_fn`` (one value array per coarse grid)."""
    coarse = np.round(np.arange(0.0, upper + 1e-12, coarse_step), 10)
    value_sets = values_fn(coarse)
    pieces = [coarse]
    for values in value_sets:
        center = float(coarse[int(np.nanargmax(values))])
        lo = max(0.0, center - window)
        hi = min(upper, center + window)
        pieces.append(np.round(np.arange(lo, hi + 1e-12, fine_step), 10))
    return np.unique(np.concatenate(pieces))


def sweep(params, parameter: str, grid) -> SqueezingTrace:
    """Steady metrics along one parameter axis.

    ``params`` is either a linear or a dispersive parameter set; the swept
    ``parameter`` must be one of its field names. Linear systems report the
    steady mechanical-displacement and magnon-phase squeezing; dispersive
    systems report the step-1 mechanical squeezing. Unstable points are
    marked NaN with ``extras["stable"]`` False, never dropped.
    """
    names = {f.name for f in dataclass_fields(params)}
    if parameter not in names:
        raise DomainError(f"unknown parameter path {parameter!r} for {type(params).__name__}")
    grid = np.asarray(grid, dtype=float)
    if grid.size and np.any(np.diff(grid) <= 0):
        raise DomainError("sweep grid must be strictly increasing")

    if isinstance(params, lin.LinearOmmParams):
        labels = ("mech_q", "magnon_Y")

        def metrics(value):
            report = lin.steady_state(replace(params, **{parameter: float(value)}))
            cov = report.state.cov
            return ((cov[lin.IDX_MECH_Q, lin.IDX_MECH_Q],
                     cov[lin.IDX_MAGNON_Y, lin.IDX_MAGNON_Y]),
                    report.n_bogoliubov, report.margin)
    elif isinstance(params, disp.DispersiveOmmParams):
        labels = ("mech_q",)

        def metrics(value):
            report = disp.step1_steady(replace(params, **{parameter: float(value)}))
            cov = report.state.cov
            return ((cov[disp.IDX_MECH_Q, disp.IDX_MECH_Q],),
                    report.n_bogoliubov, report.margin)
    else:
        raise DomainError(f"unsupported parameter set {type(params).__name__}")

    variances = np.full((grid.size, len(labels)), np.nan)
    n_bog = np.full(grid.size, np.nan)
    margins = np.full(grid.size, np.nan)
    stable = np.zeros(grid.size, dtype=bool)

    def evaluate(i):
        try:
            return metrics(grid[i])
        except Exception:
            return None

    for i, outcome in enumerate(_map_ordered(evaluate, range(grid.size))):
        if outcome is None:
            continue
        variances[i], n_bog[i], margins[i] = outcome[0], outcome[1], outcome[2]
        stable[i] = True
    return SqueezingTrace.from_variances(
        axis=grid, labels=labels, variances=variances,
        axis_label=parameter,
        extras={"n_bogoliubov": n_bog, "margin": margins, "stable": stable},
        meta={"parameter": parameter},
    )


def _scenario_fig2(spec: ScenarioSpec) -> ScenarioResult:
    params = lin.LinearOmmParams(**spec.overrides)

    def coarse_values(coarse):
        trace = lin.squeezing_vs_ratio(params, coarse)
        return [trace.column("magnon_Y")]

    grid = _ratio_grid(coarse_values)
    trace = lin.squeezing_vs_ratio(params, grid)
    optimum = lin.optimal_ratio(params)
    report = lin.steady_state(params)  # Wigner panels at the default ratio

    q_axis, p_axis = _wigner_axes(spec)
    w_mech = wigner_gaussian(report.state, 1, q_axis, p_axis)
    w_magnon = wigner_gaussian(report.state, 2, q_axis, p_axis)

    s_b = trace.column("mech_q")
    s_m = trace.column("magnon_Y")
    tables = {
        "fig2a.csv": _table({
            "ratio_gplus_over_gminus": trace.axis,
            "mech_q_variance": trace.column("mech_q", db=False),
            "s_mech_db": s_b,
        }),
        "fig2b.csv": _table({
            "ratio_gplus_over_gminus": trace.axis,
            "magnon_Y_variance": trace.column("magnon_Y", db=False),
            "s_magnon_db": s_m,
        }),
        "fig2c.csv": _wigner_table(q_axis, p_axis, w_mech),
        "fig2d.csv": _wigner_table(q_axis, p_axis, w_magnon),
    }
    figures = {
        "fig2a.svg": _line_svg(trace.axis, {"mechanical": s_b},
                               "coupling ratio G+/G-", "mechanical squeezing S_b [dB]"),
        "fig2b.svg": _line_svg(trace.axis, {"magnon": s_m},
                               "coupling ratio G+/G-", "magnon squeezing S_m [dB]"),
        "fig2c.svg": _wigner_svg(q_axis, p_axis, w_mech, "q", "p"),
        "fig2d.svg": _wigner_svg(q_axis, p_axis, w_magnon, "X_m", "Y_m"),
    }
    summary = {
        "optimal_ratio": optimum["ratio"],
        "s_magnon_max_db": optimum["s_magnon_db"],
        "s_mech_max_db": float(np.nanmax(s_b)),
        "wigner_ratio": params.ratio,
        "s_mech_at_wigner_ratio_db": report.s_mech_db,
        "s_magnon_at_wigner_ratio_db": report.s_magnon_db,
    }
    return ScenarioResult("fig2", tables, figures, summary)


def _scenario_fig3(spec: ScenarioSpec) -> ScenarioResult:
    base = lin.LinearOmmParams(**spec.overrides)
    param_sets = [replace(base, temperature=t) for t in _FIG3_TEMPERATURES]

    def coarse_values(coarse):
        traces = _map_ordered(
            lambda p: lin.squeezing_vs_ratio(p, coarse), param_sets)
        return [t.column("magnon_Y") for t in traces]

    grid = _ratio_grid(coarse_values)
    traces = _map_ordered(lambda p: lin.squeezing_vs_ratio(p, grid), param_sets)
    optima = _map_ordered(lin.optimal_ratio, param_sets)

    columns_s = {"ratio_gplus_over_gminus": grid}
    columns_n = {"ratio_gplus_over_gminus": grid}
    summary = {}
    for temperature, trace, optimum, params in zip(
            _FIG3_TEMPERATURES, traces, optima, param_sets):
        tag = _fmt(temperature)
        columns_s[f"s_magnon_db_T{tag}K"] = trace.column("magnon_Y")
        columns_n[f"n_bogoliubov_T{tag}K"] = trace.extras["n_bogoliubov"]
        at_opt = lin.steady_state(replace(params, ratio=optimum["ratio"]))
        summary[f"optimal_ratio_T{tag}K"] = optimum["ratio"]
        summary[f"s_magnon_max_db_T{tag}K"] = optimum["s_magnon_db"]
        summary[f"n_bogoliubov_at_optimum_T{tag}K"] = at_opt.n_bogoliubov

    series_s = {f"T = {t} K": columns_s[f"s_magnon_db_T{_fmt(t)}K"]
                for t in _FIG3_TEMPERATURES}
    series_n = {f"T = {t} K": columns_n[f"n_bogoliubov_T{_fmt(t)}K"]
                for t in _FIG3_TEMPERATURES}
    tables = {"fig3a.csv": _table(columns_s), "fig3b.csv": _table(columns_n)}
    figures = {
        "fig3a.svg": _line_svg(grid, series_s, "coupling ratio G+/G-",
                               "magnon squeezing S_m [dB]"),
        "fig3b.svg": _line_svg(grid, series_n, "coupling ratio G+/G-",
                               "Bogoliubov occupancy N_B"),
    }
    return ScenarioResult("fig3", tables, figures, summary)


def _scenario_fig5(spec: ScenarioSpec) -> ScenarioResult:
    params = disp.DispersiveOmmParams(**spec.overrides)

    def coarse_values(coarse):
        trace = sweep(params, "ratio", coarse)
        return [trace.column("mech_q")]

    grid = _ratio_grid(coarse_values, upper=0.995)
    trace = sweep(params, "ratio", grid)
    report = disp.step1_steady(params)  # Wigner panel at the default ratio

    q_axis, p_axis = _wigner_axes(spec)
    w_mech = wigner_gaussian(report.state, 1, q_axis, p_axis)

    s_b = trace.column("mech_q")
    k = int(np.nanargmax(s_b))
    tables = {
        "fig5a.csv": _table({
            "ratio_gplus_over_gminus": grid,
            "mech_q_variance": trace.column("mech_q", db=False),
            "s_mech_db": s_b,
        }),
        "fig5b.csv": _wigner_table(q_axis, p_axis, w_mech),
        "fig5c.csv": _table({
            "ratio_gplus_over_gminus": grid,
            "n_bogoliubov": trace.extras["n_bogoliubov"],
        }),
    }
    figures = {
        "fig5a.svg": _line_svg(grid, {"mechanical": s_b},
                               "coupling ratio G+/G-", "mechanical squeezing S_b [dB]"),
        "fig5b.svg": _wigner_svg(q_axis, p_axis, w_mech, "q", "p"),
        "fig5c.svg": _line_svg(grid, {"Bogoliubov": trace.extras["n_bogoliubov"]},
                               "coupling ratio G+/G-", "Bogoliubov occupancy N_B"),
    }
    summary = {
        "s_mech_max_db": float(s_b[k]),
        "ratio_at_max": float(grid[k]),
        "wigner_ratio": params.ratio,
        "s_mech_at_wigner_ratio_db": report.s_mech_db,
        "n_bogoliubov_at_wigner_ratio": report.n_bogoliubov,
        "min_mech_variance_at_wigner_ratio": float(np.min(np.diag(report.state.cov)[2:])),
    }
    return ScenarioResult("fig5", tables, figures, summary)


def _scenario_fig6(spec: ScenarioSpec) -> ScenarioResult:
    params = disp.DispersiveOmmParams(**spec.overrides)
    base_schedule = disp.ProtocolSchedule(**spec.schedule)

    def run(phase: float):
        schedule = replace(base_schedule, switch_off_phase=phase)
        return disp.run_protocol(params, schedule, include_full=True)

    results = _map_ordered(run, _FIG6_PHASES)

    tables = {}
    figures = {}
    maxima_rwa = []
    maxima_full = []
    for panel, phase, result in zip(_FIG6_PANELS, _FIG6_PHASES, results):
        t = result.trace_rwa.axis
        s_rwa = result.trace_rwa.column("magnon_Y")
        s_full = result.trace_full.column("magnon_Y")
        tables[f"fig6{panel}.csv"] = _table({
            "time_s": t,
            "magnon_Y_variance_rwa": result.trace_rwa.column("magnon_Y", db=False),
            "s_magnon_db_rwa": s_rwa,
            "magnon_Y_variance_full": result.trace_full.column("magnon_Y", db=False),
            "s_magnon_db_full": s_full,
        })
        figures[f"fig6{panel}.svg"] = _line_svg(
            t * 1e6,
            {"rotating-wave": s_rwa, "full": s_full},
            "time since magnon drive on [us]",
            f"magnon squeezing S_m [dB] (switch-off phase {phase / math.pi:.2f} pi)",
        )
        maxima_rwa.append(result.trace_rwa.meta["s_m_max"])
        maxima_full.append(result.trace_full.meta["s_m_max"])

    maxima_rwa = np.array(maxima_rwa)
    maxima_full = np.array(maxima_full)
    summary = {
        "s_magnon_max_db": float(maxima_rwa.max()),
        "t_of_max_s": results[int(np.argmax(maxima_rwa))].trace_rwa.meta["t_max"],
        "phase_spread_db": float(maxima_rwa.max() - maxima_rwa.min()),
        "rwa_full_max_gap_db": float(np.max(np.abs(maxima_rwa - maxima_full))),
        "s_mech_step1_db": results[0].step1.s_mech_db,
        "n_bogoliubov_step1": results[0].step1.n_bogoliubov,
        "rabi_rad_per_s": abs(complex(params.rabi)),
        "horizon_s": results[0].horizon,
    }
    for panel, phase, s_max in zip(_FIG6_PANELS, _FIG6_PHASES, maxima_rwa):
        summary[f"s_magnon_max_db_panel_{panel}"] = float(s_max)
    return ScenarioResult("fig6", tables, figures, summary)


_RUNNERS = {
    "fig2": _scenario_fig2,
    "fig3": _scenario_fig3,
    "fig5": _scenario_fig5,
    "fig6": _scenario_fig6,
}


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Execute one named scenario and return its tables, figures and summary."""
    return _RUNNERS[spec.name](spec)


def export(result: ScenarioResult, directory) -> dict:
    """Write all payloads plus a manifest with SHA-256 hashes.

    File names are fixed by the scenario; the manifest (JSON, sorted keys)
    lists every file with its hash and size, making rerun comparisons a
    single file diff.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payloads = {name: text.encode("utf-8") for name, text in result.tables.items()}
    payloads.update(result.figures)
    manifest = {"scenario": result.name, "summary": result.summary, "files": {}}
    for name in sorted(payloads):
        data = payloads[name]
        (directory / name).write_bytes(data)
        manifest["files"][name] = {
            "sha256": hashlib.sha256(data).hexdigest(),
            "bytes": len(data),
        }
    manifest_text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (directory / "manifest.json").write_text(manifest_text, encoding="utf-8")
    return manifest
