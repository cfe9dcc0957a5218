"""Command-line front end.

Subcommands
-----------
steady      steady-state squeezing report for a linear-coupling config
protocol    two-step transient-squeezing run for a dispersive config
sweep       steady metrics along one parameter axis, CSV output
wigner      phase-space density of the squeezed mode, matrix CSV output
reproduce   run one of the named scenarios (fig2, fig3, fig5, fig6)
validate    check a config file without computing anything

Configs are JSON. Frequencies and rates are given as nu = omega / 2pi in
fields suffixed ``_hz`` (the convention every value is quoted in) and are
converted to angular units at this boundary. Omitted fields fall back to the
built-in defaults of the chosen model, so ``{"model": "linear"}`` is a
complete config. Exit codes: 0 success, 2 usage/schema error, 3 physical
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import scenarios
from . import dispersive_system as disp
from . import linear_system as lin
from .errors import MagsqError
from .gaussian import wigner_gaussian
from .quantities import TWO_PI

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3

_COMMON_PARAM_PROPS = {
    "wavelength_m": {"type": "number"},
    "omega_mech_hz": {"type": "number"},
    "omega_magnon_hz": {"type": "number"},
    "kappa_cav_hz": {"type": "number"},
    "kappa_magnon_hz": {"type": "number"},
    "gamma_mech_hz": {"type": "number"},
    "g0_hz": {"type": "number"},
    "g_minus_hz": {"type": "number"},
    "ratio": {"type": "number"},
    "temperature_K": {"type": "number"},
    "drive_power_minus_W": {"type": "number"},
    "drive_power_plus_W": {"type": "number"},
}

_SCHEMAS = {
    "linear": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "model": {"const": "linear"},
            "params": {
                "type": "object",
                "additionalProperties": False,
                "properties": {**_COMMON_PARAM_PROPS,
                               "g_magnomech_hz": {"type": "number"}},
            },
        },
        "required": ["model"],
    },
    "dispersive": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "model": {"const": "dispersive"},
            "params": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    **_COMMON_PARAM_PROPS,
                    "g_dispersive_hz": {"type": "number"},
                    "rabi_hz": {"type": "number"},
                    "rabi_phase_rad": {"type": "number"},
                    "magnon_detuning_hz": {"type": "number"},
                },
            },
            "schedule": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "switch_off_phase_rad": {"type": "number"},
                    "interlude_s": {"type": "number"},
                    "step2_horizon_s": {"type": "number"},
                    "sample_count": {"type": "integer"},
                },
            },
        },
        "required": ["model"],
    },
}

# config key -> (dataclass field, 2pi conversion applied)
_FIELD_MAP = {
    "wavelength_m": ("wavelength", False),
    "omega_mech_hz": ("omega_mech", True),
    "omega_magnon_hz": ("omega_magnon", True),
    "kappa_cav_hz": ("kappa_cav", True),
    "kappa_magnon_hz": ("kappa_magnon", True),
    "gamma_mech_hz": ("gamma_mech", True),
    "g0_hz": ("g0", True),
    "g_magnomech_hz": ("g_magnomech", True),
    "g_dispersive_hz": ("g_dispersive", True),
    "g_minus_hz": ("g_minus", True),
    "ratio": ("ratio", False),
    "temperature_K": ("temperature", False),
    "magnon_detuning_hz": ("magnon_detuning", True),
}


class ConfigSchemaError(ValueError):
    """Structural config problem (exit code 2)."""


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigSchemaError(f"cannot read config {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSchemaError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigSchemaError(f"config {path} must be a JSON object")
    return data


def parse_config(path: str):
    """Load, schema-check and convert a config file.

    Returns
    -------
    (params, schedule)
        ``params`` is a LinearOmmParams or DispersiveOmmParams;
        ``schedule`` a ProtocolSchedule for dispersive configs, else None.

    Raises
    ------
    ConfigSchemaError
        On structural problems (missing model, unknown keys, wrong types).
    MagsqError subclasses / ValueError
        On physical-invariant violations (mapped to exit code 3).
    """
    data = _load_json(path)
    model = data.get("model")
    if model not in _SCHEMAS:
        raise ConfigSchemaError(
            f"config field 'model' must be 'linear' or 'dispersive', got {model!r}"
        )
    validator = Draft202012Validator(_SCHEMAS[model])
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ConfigSchemaError(f"config field {where}: {first.message}")

    raw = dict(data.get("params") or {})
    powers = (raw.pop("drive_power_minus_W", None), raw.pop("drive_power_plus_W", None))
    if (powers[0] is None) != (powers[1] is None):
        raise ConfigSchemaError(
            "drive_power_minus_W and drive_power_plus_W must be given together"
        )
    if powers[0] is not None and ("g_minus_hz" in raw or "ratio" in raw):
        raise ConfigSchemaError(
            "give either drive powers or (g_minus_hz, ratio), not both"
        )
    rabi_hz = raw.pop("rabi_hz", None)
    rabi_phase = raw.pop("rabi_phase_rad", None)
    if rabi_phase is not None and rabi_hz is None:
        raise ConfigSchemaError("rabi_phase_rad requires rabi_hz")

    kwargs = {}
    for key, value in raw.items():
        field, uses_2pi = _FIELD_MAP[key]
        kwargs[field] = TWO_PI * value if uses_2pi else value

    if model == "linear":
        if powers[0] is not None:
            params = lin.LinearOmmParams.from_drive_powers(powers[0], powers[1], **kwargs)
        else:
            params = lin.LinearOmmParams(**kwargs)
        return params, None

    if powers[0] is not None:
        raise ConfigSchemaError("drive powers for the dispersive model are not "
                                "supported; give g_minus_hz and ratio")
    if rabi_hz is not None:
        phase = rabi_phase or 0.0
        kwargs["rabi"] = TWO_PI * rabi_hz * complex(math.cos(phase), math.sin(phase))
    params = disp.DispersiveOmmParams(**kwargs)
    sched_raw = data.get("schedule") or {}
    schedule = disp.ProtocolSchedule(
        switch_off_phase=sched_raw.get("switch_off_phase_rad", 0.0),
        interlude=sched_raw.get("interlude_s"),
        step2_horizon=sched_raw.get("step2_horizon_s"),
        sample_count=sched_raw.get("sample_count", 1200),
    )
    return params, schedule


def _load_params(args, required_model=None):
    if args.config:
        params, schedule = parse_config(args.config)
    else:
        params, schedule = lin.LinearOmmParams(), None
        if required_model == "dispersive":
            params, schedule = disp.DispersiveOmmParams(), disp.ProtocolSchedule()
    actual = "linear" if isinstance(params, lin.LinearOmmParams) else "dispersive"
    if required_model and actual != required_model:
        raise ConfigSchemaError(
            f"this subcommand requires a {required_model} config, got {actual}"
        )
    if actual == "dispersive" and schedule is None:
        schedule = disp.ProtocolSchedule()
    return params, schedule


def _cmd_validate(args) -> int:
    params, schedule = parse_config(args.config)
    model = "linear" if isinstance(params, lin.LinearOmmParams) else "dispersive"
    print(f"config OK: model={model} "
          f"ratio={params.ratio:g} g_minus={params.g_minus / TWO_PI:g} Hz "
          f"T={params.temperature:g} K")
    return EXIT_OK


def _cmd_steady(args) -> int:
    params, _ = _load_params(args, required_model="linear")
    report = lin.steady_state(params)
    print(f"S_b={report.s_mech_db:.4f} dB  S_m={report.s_magnon_db:.4f} dB  "
          f"N_B={report.n_bogoliubov:.4f}  margin={report.margin:.6e} rad/s  (stable)")
    return EXIT_OK


def _cmd_protocol(args) -> int:
    params, schedule = _load_params(args, required_model="dispersive")
    result = disp.run_protocol(params, schedule, include_full=args.full)
    print(f"step1: S_b={result.step1.s_mech_db:.4f} dB  "
          f"N_B={result.step1.n_bogoliubov:.4f}")
    line = (f"step2: S_m_max={result.s_m_max:.4f} dB at t={result.t_max:.6e} s "
            f"(horizon {result.horizon:.6e} s)")
    if result.trace_full is not None:
        line += f"  full-model S_m_max={result.trace_full.meta['s_m_max']:.4f} dB"
    print(line)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        columns = {
            "time_s": result.trace_rwa.axis,
            "magnon_Y_variance_rwa": result.trace_rwa.column("magnon_Y", db=False),
            "s_magnon_db_rwa": result.trace_rwa.column("magnon_Y"),
        }
        if result.trace_full is not None:
            columns["magnon_Y_variance_full"] = result.trace_full.column("magnon_Y", db=False)
            columns["s_magnon_db_full"] = result.trace_full.column("magnon_Y")
        (outdir / "protocol_trace.csv").write_text(
            scenarios._table(columns), encoding="utf-8")
        print(f"wrote {outdir / 'protocol_trace.csv'}", file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    params, _ = _load_params(args)
    grid = np.linspace(args.start, args.stop, args.num)
    trace = scenarios.sweep(params, args.param, grid)
    columns = {args.param: trace.axis}
    for label in trace.labels:
        columns[f"{label}_variance"] = trace.column(label, db=False)
        columns[f"{label}_squeezing_db"] = trace.column(label)
    columns["n_bogoliubov"] = trace.extras["n_bogoliubov"]
    columns["stable"] = trace.extras["stable"]
    headline = trace.labels[-1]
    values = trace.column(headline)
    if np.any(np.isfinite(values)):
        k = int(np.nanargmax(values))
        print(f"max {headline} squeezing {values[k]:.4f} dB at "
              f"{args.param}={trace.axis[k]:.6g}")
    else:
        print("no stable points on the requested grid")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "sweep.csv").write_text(scenarios._table(columns), encoding="utf-8")
        print(f"wrote {outdir / 'sweep.csv'}", file=sys.stderr)
    return EXIT_OK


def _cmd_wigner(args) -> int:
    params, _ = _load_params(args)
    if isinstance(params, lin.LinearOmmParams):
        state = lin.steady_state(params).state
        mode = {"mech": 1, "magnon": 2}.get(args.mode)
    else:
        state = disp.step1_steady(params).state
        mode = {"mech": 1}.get(args.mode)
        if args.mode == "magnon":
            raise ConfigSchemaError(
                "the dispersive step-1 state has no magnon mode; use mode=mech"
            )
    half = args.halfwidth * math.sqrt(0.5)
    axis = np.linspace(-half, half, args.points)
    density = wigner_gaussian(state, mode, axis, axis)
    print(f"wigner peak {float(density.max()):.6f} at mode {args.mode} "
          f"(grid {args.points}x{args.points}, +/-{args.halfwidth} vacuum sigma)")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        name = f"wigner_{args.mode}.csv"
        (outdir / name).write_text(
            scenarios._wigner_table(axis, axis, density), encoding="utf-8")
        print(f"wrote {outdir / name}", file=sys.stderr)
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    spec = scenarios.ScenarioSpec(name=args.figure)
    result = scenarios.run_scenario(spec)
    manifest = scenarios.export(result, args.out)
    for key in sorted(result.summary):
        print(f"{key} = {result.summary[key]:.6g}")
    print(f"wrote {len(manifest['files']) + 1} files to {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magsq",
        description="Gaussian-dynamics simulator for optomagnomechanical "
                    "magnon squeezing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON config file (defaults used if omitted)")

    p = sub.add_parser("steady", help="linear-model steady-state report")
    add_config(p)
    p.set_defaults(fn=_cmd_steady)

    p = sub.add_parser("protocol", help="dispersive two-step protocol run")
    add_config(p)
    p.add_argument("--full", action="store_true",
                   help="also integrate without the rotating-wave approximation")
    p.add_argument("--out", help="directory for the trace CSV")
    p.set_defaults(fn=_cmd_protocol)

    p = sub.add_parser("sweep", help="sweep one parameter and report squeezing")
    add_config(p)
    p.add_argument("--param", required=True, help="parameter field name (e.g. ratio)")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--num", type=int, default=50)
    p.add_argument("--out", help="directory for sweep.csv")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("wigner", help="Wigner density of the squeezed mode")
    add_config(p)
    p.add_argument("--mode", choices=("mech", "magnon"), default="mech")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--halfwidth", type=float, default=5.0,
                   help="half width in vacuum standard deviations")
    p.add_argument("--out", help="directory for the matrix CSV")
    p.set_defaults(fn=_cmd_wigner)

    p = sub.add_parser("reproduce", help="run a named reference scenario")
    p.add_argument("figure", choices=scenarios.SCENARIO_NAMES)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_reproduce)

    p = sub.add_parser("validate", help="check a config file")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigSchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MagsqError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
