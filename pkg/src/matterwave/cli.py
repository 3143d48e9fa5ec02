"""Command-line scenario runner.

Commands
--------
trace     sample exact densities (and optional approximations) on a grid
delay     measure delay times over a list of modulation wavenumbers
validate  run the analytic invariant suite
oracle    run the Crank-Nicolson comparison

Units are fixed: eV, Angstrom, ps, 1/Angstrom.  Every CSV embeds its full
configuration in '#' comment lines; the data section is deterministic for
a given configuration.  Exit codes: 0 success, 1 validation failure,
2 configuration error, 3 numerical failure.

The environment variable MW_THREADS caps the worker fan-out of the delay
sweep (results are aggregated in input order either way).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, analysis, asymptotics, oracle, solver, validate
from .constants import PhysicsConstants
from .model import DeltaWell, ModulatedPacket, PoleError, load_config

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


# Figure-reproduction presets: caption parameters of the standard scenario
# (delta strength 4.27 eV A, incidence energy 0.08 eV); windows are chosen
# to show the named feature at those parameters in this unit system.
_K_STANDARD_DK = "k"  # sentinel: dk equal to the carrier k

TRACE_PRESETS = {
    "fig2a": dict(potential="delta", lam=4.27, energy=0.08, dk=0.0, fixed_x=0.0,
                  t_min=1e-4, t_max=0.1, samples=20001),
    "fig2b": dict(potential="delta", lam=4.27, energy=0.08, dk=0.001, fixed_x=0.0,
                  t_min=1e-4, t_max=0.1, samples=20001),
    "fig3a": dict(potential="delta", lam=4.27, energy=0.08, dk=0.0001, fixed_x=0.0,
                  t_min=1e-3, t_max=50.0, samples=200001),
    "fig3b": dict(potential="delta", lam=4.27, energy=0.08, dk=0.0005, fixed_x=0.0,
                  t_min=1e-3, t_max=50.0, samples=200001),
    "fig3c": dict(potential="delta", lam=4.27, energy=0.08, dk=0.001, fixed_x=0.0,
                  t_min=1e-3, t_max=50.0, samples=200001),
    "fig3d": dict(potential="delta", lam=4.27, energy=0.08, dk=0.001, fixed_x=0.0,
                  t_min=1e-3, t_max=50.0, samples=200001, beats=True),
    "fig4": dict(potential="delta", lam=4.27, energy=0.08, dk=0.0005, fixed_x=1e8,
                 t_min=58000.0, t_max=61500.0, samples=140001, components=True),
    "fig5a": dict(potential="delta", lam=4.27, energy=0.08, dk=0.0005, fixed_x=1e8,
                  t_min=62800.0, t_max=63000.0, samples=20001, two_level=True),
    "fig5b": dict(potential="delta", lam=4.27, energy=0.08, dk=_K_STANDARD_DK,
                  fixed_x=1e8, t_min=30700.0, t_max=30900.0, samples=200001,
                  two_level=True),
    "fig6": dict(potential="delta", lam=4.27, energy=0.08, dk=0.02, fixed_x=1000.0,
                 t_min=0.3, t_max=1.0, samples=14001, with_free=True),
}

DELAY_PRESETS = {
    "fig7": dict(lam=4.27, energy=0.08, x=1000.0,
                 dk_list=[1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2,
                          3e-2, 5e-2, 7e-2, 1e-1, _K_STANDARD_DK]),
}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path, header_obj: dict, columns: dict):
    """CSV with a JSON provenance comment and 17-digit LF-terminated body."""
    names = list(columns)
    rows = len(columns[names[0]])
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="\n")
    try:
        out.write("# config: " + json.dumps(header_obj, sort_keys=True) + "\n")
        out.write("# library: matterwave " + __version__ + "\n")
        out.write(",".join(names) + "\n")
        for i in range(rows):
            out.write(",".join(_fmt(columns[n][i]) for n in names) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _constants_dict(c: PhysicsConstants) -> dict:
    return {"hbar_eV_ps": c.hbar, "hbar_over_m_A2_ps": c.hbar_over_m,
            "hbar2_over_2m_eV_A2": c.hbar2_over_2m}


def _build_model(args) -> tuple:
    cfg = {}
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    constants = PhysicsConstants.for_mass_ratio(
        cfg.get("mass_ratio", 1.0), hbar=cfg.get("hbar_eV_ps", PhysicsConstants().hbar))
    energy = args.energy if args.energy is not None else cfg.get("energy_eV", 0.08)
    dk = args.dk if args.dk is not None else cfg.get("dk_invA", 0.0)
    lam = args.lam if args.lam is not None else cfg.get("lambda_eV_A", 4.27)
    if energy <= 0:
        raise ConfigError("energy must be positive")
    k = constants.wavenumber(energy)
    if isinstance(dk, str):
        if dk != "k":
            raise ConfigError("dk must be a number or the literal 'k'")
        dk = k
    if not 0.0 <= dk <= k:
        raise ConfigError(f"dk must lie in [0, k] = [0, {k:.6g}]")
    packet = ModulatedPacket(k=k, dk=dk, constants=constants)
    well = None
    if getattr(args, "potential", "delta") == "delta":
        if lam <= 0:
            raise ConfigError("lambda must be positive for the delta well")
        well = DeltaWell(lam, constants)
    return constants, packet, well


def _apply_preset(args, presets: dict):
    if not getattr(args, "preset", None):
        return args
    if args.preset not in presets:
        raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(presets)}")
    for key, value in presets[args.preset].items():
        attr = {"lam": "lam", "energy": "energy", "dk": "dk"}.get(key, key)
        if getattr(args, attr, None) in (None, False):
            setattr(args, attr, value)
    return args


def cmd_trace(args) -> int:
    args = _apply_preset(args, TRACE_PRESETS)
    if args.samples is None:
        args.samples = 20001
    constants, packet, well = _build_model(args)
    if (args.fixed_x is None) == (args.fixed_t is None):
        raise ConfigError("exactly one of --fixed-x / --fixed-t is required")
    if args.samples < 2:
        raise ConfigError("samples must be >= 2")

    if args.fixed_x is not None:
        lo = args.t_min if args.t_min is not None else 1e-4
        hi = args.t_max
        if hi is None:
            raise ConfigError("--t-max is required for a time trace")
        axis, fixed = "t", float(args.fixed_x)
        if fixed < 0:
            raise ConfigError("fixed x must be >= 0 (transmission region)")
    else:
        lo = args.x_min if args.x_min is not None else 0.0
        hi = args.x_max
        if hi is None:
            raise ConfigError("--x-max is required for a space trace")
        axis, fixed = "x", float(args.fixed_t)
        if fixed <= 0:
            raise ConfigError("fixed t must be positive")
    if not lo < hi:
        raise ConfigError("grid bounds must satisfy min < max")
    if axis == "t" and lo <= 0:
        raise ConfigError("time grid must start after the release at t = 0")
    grid = np.linspace(lo, hi, args.samples)

    if well is None:
        trace = solver.free_density_trace(packet, grid, fixed, axis=axis)
    else:
        trace = solver.delta_density_trace(well, packet, grid, fixed, axis=axis,
                                           components=args.components)
    columns = {("t_ps" if axis == "t" else "x_A"): grid, "rho": trace.rho}
    if args.components and trace.has_components:
        columns["rho_plus"] = trace.rho_plus
        columns["rho_minus"] = trace.rho_minus
        columns["rho_int"] = trace.rho_int
    if args.with_free and well is not None:
        free = solver.free_density_trace(packet, grid, fixed, axis=axis)
        columns["rho_free"] = free.rho
    if args.beats:
        if well is None or axis != "t" or fixed != 0.0:
            raise ConfigError("--beats needs the delta potential and a time trace at x = 0")
        columns["rho_approx"] = asymptotics.rho_beats_x0(grid, well, packet)
    if args.two_level:
        tx = None if well is None else well.transmission
        xs = fixed if axis == "t" else grid
        ts = grid if axis == "t" else fixed
        columns["rho_two_level"] = np.broadcast_to(
            asymptotics.rho_two_level(xs, ts, packet, tx), grid.shape).copy()

    header = {"command": "trace", "potential": args.potential,
              "lambda_eV_A": None if well is None else well.lam,
              "energy_eV": constants.energy(packet.k), "k_invA": packet.k,
              "dk_invA": packet.dk, "axis": axis, "fixed": fixed,
              "grid": [lo, hi, args.samples], "constants": _constants_dict(constants),
              "outputs": sorted(set(columns) - {"t_ps", "x_A"})}
    _write_csv(args.out, header, columns)
    return EXIT_OK


def _delay_row(well, packet_base, dk, x, samples):
    packet = ModulatedPacket(packet_base.k, dk, packet_base.constants)
    try:
        report = analysis.delay_time_measured(well, packet, x, n_samples=samples)
        return report, "ok"
    except analysis.FrontNotFoundError as exc:
        return None, f"front_not_found: {exc}"


def cmd_delay(args) -> int:
    args = _apply_preset(args, DELAY_PRESETS)
    constants, packet, well = _build_model(args)
    if well is None:
        raise ConfigError("delay measurement requires the delta potential")
    dks = args.dk_list
    if not dks:
        raise ConfigError("at least one dk value is required (--dk-list)")
    dks = [packet.k if isinstance(d, str) else float(d) for d in dks]
    for d in dks:
        if not 0.0 <= d <= packet.k:
            raise ConfigError(f"dk = {d} outside [0, k]")
    x = args.x
    if x is None or x <= 0:
        raise ConfigError("a positive measurement position --x is required")

    max_workers = int(os.environ.get("MW_THREADS", "0")) or min(8, len(dks)) or 1
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(lambda d: _delay_row(well, packet, d, x, args.samples), dks))

    warn_count = sum(1 for _, status in rows if status != "ok")
    columns = {"dk": [], "t_delta": [], "t_f": [], "delta_t_measured": [],
               "delta_t_analytic": [], "t_phi": []}
    reports = []
    for dk, (report, status) in zip(dks, rows):
        columns["dk"].append(dk)
        if report is None:
            pk = ModulatedPacket(packet.k, dk, constants)
            columns["t_delta"].append(np.nan)
            columns["t_f"].append(np.nan)
            columns["delta_t_measured"].append(np.nan)
            columns["delta_t_analytic"].append(analysis.delay_time_analytic(well, pk))
            columns["t_phi"].append(analysis.phase_time(well, pk.k).value)
            reports.append({"dk": dk, "status": status})
        else:
            columns["t_delta"].append(report.t_delta)
            columns["t_f"].append(report.t_f)
            columns["delta_t_measured"].append(report.delta_t_measured)
            columns["delta_t_analytic"].append(report.delta_t_analytic)
            columns["t_phi"].append(report.t_phi)
            entry = {"dk": dk, "status": "ok"}
            entry.update(json.loads(report.to_json()))
            reports.append(entry)

    header = {"command": "delay", "lambda_eV_A": well.lam,
              "energy_eV": constants.energy(packet.k), "k_invA": packet.k,
              "x_A": x, "samples": args.samples, "dk_list": dks,
              "constants": _constants_dict(constants), "warnings": warn_count}
    _write_csv(args.out, header, columns)
    if args.report:
        with open(args.report, "w", newline="\n") as fh:
            json.dump({"config": header, "rows": reports}, fh, sort_keys=True, indent=1)
            fh.write("\n")
    if warn_count:
        print(f"warning: {warn_count} of {len(dks)} rows had no measurable front",
              file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validate.run_invariant_suite(inject_fault=args.inject_fault)
    payload = {"library": __version__, "n_failed": sum(not r.passed for r in results),
               "checks": [r.as_dict() for r in results]}
    text = json.dumps(payload, sort_keys=True, indent=1)
    if args.out in (None, "-"):
        print(text)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}: residual {r.residual:.3e} (tolerance {r.tolerance:.0e})",
              file=sys.stderr)
    return EXIT_OK if payload["n_failed"] == 0 else EXIT_VALIDATION


def cmd_oracle(args) -> int:
    constants, packet, well = _build_model(args)
    kwargs = {}
    for name in ("dx", "dt", "x_min", "x_max", "t_final", "probe_x"):
        value = getattr(args, name)
        if value is not None:
            kwargs[name] = value
    if args.potential == "free":
        report = oracle.free_modulated_run(packet, **kwargs)
    else:
        report = oracle.delta_well_run(well, packet, **kwargs)

    header = {"command": "oracle", "case": args.potential,
              "constants": _constants_dict(constants), **report.params}
    _write_csv(args.out, header, {"t_ps": report.times, "rho_numeric": report.rho_numeric,
                                  "rho_analytic": report.rho_analytic})
    summary = {"rel_l2": report.rel_l2, "max_abs_diff": report.max_abs_diff,
               "norm_drift_per_step": report.norm_drift_per_step, "params": report.params}
    text = json.dumps(summary, sort_keys=True, indent=1)
    if args.report:
        with open(args.report, "w", newline="\n") as fh:
            fh.write(text + "\n")
    print(text, file=sys.stderr)
    return EXIT_OK


def _add_model_options(p, potential_choices=("delta", "free")):
    p.add_argument("--potential", choices=potential_choices, default="delta")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="delta-well strength in eV A (default 4.27)")
    p.add_argument("--energy", type=float, default=None,
                   help="incidence energy in eV (default 0.08)")
    p.add_argument("--dk", type=_dk_value, default=None,
                   help="modulation wavenumber in 1/A, or the literal 'k'")
    p.add_argument("--config", default=None, help="JSON configuration file")


def _dk_value(text):
    if text == "k":
        return "k"
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matterwave",
        description="Transient densities, beats and delay times of modulated "
                    "cut-off matter waves (units: eV, A, ps)")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pt = sub.add_parser("trace", help="sample a density trace to CSV")
    _add_model_options(pt)
    pt.add_argument("--preset", default=None,
                    help=f"figure preset: {', '.join(sorted(TRACE_PRESETS))}")
    pt.add_argument("--fixed-x", dest="fixed_x", type=float, default=None)
    pt.add_argument("--fixed-t", dest="fixed_t", type=float, default=None)
    pt.add_argument("--t-min", dest="t_min", type=float, default=None)
    pt.add_argument("--t-max", dest="t_max", type=float, default=None)
    pt.add_argument("--x-min", dest="x_min", type=float, default=None)
    pt.add_argument("--x-max", dest="x_max", type=float, default=None)
    pt.add_argument("--samples", type=int, default=None)
    pt.add_argument("--components", action="store_true",
                    help="emit the rho_plus/rho_minus/rho_int split")
    pt.add_argument("--with-free", dest="with_free", action="store_true",
                    help="add the free-propagation density column")
    pt.add_argument("--beats", action="store_true",
                    help="add the quantum-beat approximation column (x = 0)")
    pt.add_argument("--two-level", dest="two_level", action="store_true",
                    help="add the asymptotic two-level density column")
    pt.add_argument("--out", default=None, help="output CSV (default stdout)")
    pt.set_defaults(func=cmd_trace)

    pd = sub.add_parser("delay", help="delay-time sweep over dk values")
    _add_model_options(pd, potential_choices=("delta",))
    pd.add_argument("--preset", default=None,
                    help=f"presets: {', '.join(sorted(DELAY_PRESETS))}")
    pd.add_argument("--x", type=float, default=None, help="measurement position in A")
    pd.add_argument("--dk-list", dest="dk_list", type=_dk_value, nargs="+", default=None)
    pd.add_argument("--samples", type=int, default=6001,
                    help="time samples per trace in the front window")
    pd.add_argument("--out", default=None, help="output CSV (default stdout)")
    pd.add_argument("--report", default=None, help="optional JSON report path")
    pd.set_defaults(func=cmd_delay)

    pv = sub.add_parser("validate", help="run the invariant suite")
    pv.add_argument("--out", default=None, help="JSON report path (default stdout)")
    pv.add_argument("--inject-fault", dest="inject_fault", default=None,
                    choices=validate.FAULT_MODES,
                    help="testing hook: perturb one evaluator and expect failure")
    pv.set_defaults(func=cmd_validate)

    po = sub.add_parser("oracle", help="Crank-Nicolson comparison run")
    _add_model_options(po)
    po.add_argument("--probe-x", dest="probe_x", type=float, default=None)
    po.add_argument("--t-final", dest="t_final", type=float, default=None)
    po.add_argument("--dx", type=float, default=None)
    po.add_argument("--dt", type=float, default=None)
    po.add_argument("--x-min", dest="x_min", type=float, default=None)
    po.add_argument("--x-max", dest="x_max", type=float, default=None)
    po.add_argument("--out", default=None, help="output CSV (default stdout)")
    po.add_argument("--report", default=None, help="optional JSON summary path")
    po.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the config-error contract
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (PoleError, OverflowError, FloatingPointError,
            analysis.FrontNotFoundError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, oracle.InfeasibleDomainError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
