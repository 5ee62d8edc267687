"""Command-line harness: single runs, sweeps and verification scenarios.

Exit codes: 0 success, 2 config error, 3 numerical blow-up,
4 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import export_csv, fit_decay_rate, write_summary
from .config import parse_config
from .dynamics import ModelParams, SimulationConfig, simulate
from .errors import BlowUpError, ConfigError, ConstructionError, KSObsError
from .injection import build_injection, monotonicity_check, sym_part_extremes
from .sensing import (
    REFERENCE_EIGHTHS,
    ReferenceSet,
    cps_closed_form,
    cps_numeric,
    export_matrix_csv,
    leading_block,
    output_matrices,
    sensor_points,
    validate_reference_set,
)
from .spectral import SpectralState, spectrum

log = logging.getLogger("ksobs")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_VERIFY = 4

CPS_RTOL = 1e-6
DECAY_RATIO = 1e-3
WORKERS_ENV = "KSOBS_WORKERS"

_SUBCOMMAND_SCENARIOS = {
    "simulate": ("observe", ("free", "observe")),
    "sweep": ("sweep-lambda", ("sweep-lambda", "sweep-S")),
    "cps-verify": ("cps-verify", ("cps-verify",)),
    "validate-sensors": ("sensors-validate", ("sensors-validate",)),
}


def _initial_state(value, N):
    if value == "standard":
        return None
    c = np.zeros(N)
    c[: len(value)] = value
    return SpectralState(c)


def simulation_config(spec, lambda_gain=None, S=None):
    params = ModelParams(spec.nu2, spec.nu1, spec.nu0, spec.variant)
    sensors = sensor_points(spec.reference, spec.S if S is None else S)
    return SimulationConfig(
        params=params,
        sensors=sensors,
        N=spec.N,
        dt=spec.dt,
        t_end=spec.t_end,
        grid_M=spec.grid_M,
        lambda_gain=spec.lambda_gain if lambda_gain is None else lambda_gain,
        initial_nominal=_initial_state(spec.initial_nominal, spec.N),
        initial_estimate=_initial_state(spec.initial_estimate, spec.N),
        keep_states=False,
    )


def summarize(ts, window=None):
    """Decay fit plus terminal/initial ratio of the V-norm error."""
    n0, n1 = ts.norm_V[0], ts.norm_V[-1]
    ratio = float(n1 / n0) if n0 > 0 else 0.0
    try:
        fit = fit_decay_rate(ts.t, ts.norm_V, window)
        rate, rsq = fit.rate, fit.rsq
    except KSObsError:
        rate, rsq = float("nan"), float("nan")
    decay = rate > 0 and ratio < DECAY_RATIO
    return {"rate": rate, "rsq": rsq, "final_over_initial": ratio, "verdict": "decay" if decay else "no decay"}


def _run_one(spec, lambda_gain, S, path):
    cfg = simulation_config(spec, lambda_gain=lambda_gain, S=S)
    table = spectrum(cfg.N, cfg.params.nu2)
    matrices = output_matrices(cfg.sensors, table)
    inj = None
    if lambda_gain > 0:
        inj = build_injection(matrices, lambda_gain, cfg.params.nu2, exact_projection=spec.exact_projection)
    try:
        ts = simulate(cfg, inj)
    except BlowUpError as exc:
        if exc.series is not None:
            export_csv(exc.series, path)
        return {"blowup": True, "time": exc.time, "norm": exc.norm}
    export_csv(ts, path)
    return {"blowup": False, **summarize(ts, spec.fit_window)}


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_many(spec, jobs):
    n = _workers()
    if n == 1 or len(jobs) == 1:
        return [_run_one(spec, *job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        futures = [pool.submit(_run_one, spec, *job) for job in jobs]
        return [f.result() for f in futures]


def _scenario_simulate(spec, out):
    res = _run_one(spec, spec.lambda_gain, spec.S, out / "run.csv")
    if res["blowup"]:
        print(f"blow-up at t={res['time']:.6g} (max |coefficient| {res['norm']:.6g})")
        return EXIT_BLOWUP
    row = {"lambda": spec.lambda_gain, **res}
    write_summary([row], out / "summary.csv", ["lambda", "rate", "rsq", "final_over_initial", "verdict"])
    print(f"lambda={spec.lambda_gain:.6g} rate={res['rate']:.6g} rsq={res['rsq']:.4f} "
          f"final/initial={res['final_over_initial']:.6g} -> {res['verdict']}")
    return EXIT_OK


def _scenario_sweep(spec, out):
    if spec.scenario == "sweep-lambda":
        jobs = [(lam, spec.S, out / f"run_lambda_{i:03d}.csv") for i, lam in enumerate(spec.lambda_list)]
        key, keys = "lambda", [j[0] for j in jobs]
    else:
        jobs = [(spec.lambda_gain, S, out / f"run_S_{S:03d}.csv") for S in spec.S_list]
        key, keys = "S", [j[1] for j in jobs]
    results = _run_many(spec, jobs)
    rows, blown = [], False
    for k, res in zip(keys, results):
        if res["blowup"]:
            blown = True
            rows.append({key: k, "rate": float("nan"), "rsq": float("nan"), "final_over_initial": float("nan")})
        else:
            rows.append({key: k, **res})
    write_summary(rows, out / "summary.csv", [key, "rate", "rsq", "final_over_initial"])
    for r in rows:
        print(f"{key}={r[key]:.6g} rate={r['rate']:.6g} rsq={r['rsq']:.4f} final/initial={r['final_over_initial']:.6g}")
    return EXIT_BLOWUP if blown else EXIT_OK


def _scenario_cps(spec, out):
    rows, ok = [], True
    for S in spec.S_list:
        sensors = sensor_points(REFERENCE_EIGHTHS, S)
        table = spectrum(max(spec.N, 4 * S), spec.nu2)
        closed = cps_closed_form(S, spec.nu2)
        numeric = cps_numeric(sensors, table)
        rel = abs(numeric - closed) / closed
        ok &= rel < CPS_RTOL
        rows.append({"S": S, "closed_form": closed, "numeric": numeric, "rel_err": rel})
        print(f"S={S} closed={closed:.17g} numeric={numeric:.17g} rel_err={rel:.3e}")
    write_summary(rows, out / "cps.csv", ["S", "closed_form", "numeric", "rel_err"])
    return EXIT_OK if ok else EXIT_VERIFY


def _scenario_sensors(spec, out):
    report = validate_reference_set(ReferenceSet(tuple(spec.reference), d=1))
    print(f"reference {spec.reference}: {report.verdict} (rank {report.rank}/{report.size})")
    sensors = sensor_points(spec.reference, spec.S)
    matrices = output_matrices(sensors, spectrum(max(spec.N, sensors.S_sigma), spec.nu2))
    export_matrix_csv(matrices.E_plain, out / "E_plain.csv")
    export_matrix_csv(matrices.E_weighted, out / "E_weighted.csv")
    cond = float(np.linalg.cond(leading_block(matrices)))
    print(f"S={spec.S} S_sigma={sensors.S_sigma} cond(leading block)={cond:.3e}")
    ok = report.admissible
    try:
        inj = build_injection(matrices, 1.0, spec.nu2)
    except ConstructionError as exc:
        print(f"Lambda: not buildable: {exc}")
        return EXIT_VERIFY
    export_matrix_csv(inj.Lambda, out / "Lambda.csv")
    lo, hi = sym_part_extremes(matrices, inj.scale)
    rng = np.random.default_rng(spec.seed)
    worst = min(monotonicity_check(inj, w) / (w @ w) for w in rng.standard_normal((200, sensors.S_sigma)))
    print(f"Lambda: eig(L+L^T) in [{lo:.6g}, {hi:.6g}], min monotonicity margin {worst:.3e}")
    ok &= worst >= -1e-9
    return EXIT_OK if ok else EXIT_VERIFY


def run(spec):
    """Execute one scenario; return the process exit code."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if spec.scenario in ("free", "observe"):
            return _scenario_simulate(spec, out)
        if spec.scenario in ("sweep-lambda", "sweep-S"):
            return _scenario_sweep(spec, out)
        if spec.scenario == "cps-verify":
            return _scenario_cps(spec, out)
        return _scenario_sensors(spec, out)
    except ConstructionError as exc:
        print(f"error ({spec.scenario}): {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except BlowUpError as exc:
        print(f"error ({spec.scenario}): {exc}", file=sys.stderr)
        return EXIT_BLOWUP


def build_parser():
    parser = argparse.ArgumentParser(prog="ksobs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMAND_SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    default, allowed = _SUBCOMMAND_SCENARIOS[args.command]
    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    overrides = list(args.overrides)
    if args.out:
        overrides.append(f"output_dir={args.out}")
    try:
        spec = parse_config(text, overrides)
    except ConfigError as exc:
        if exc.key != "scenario" or "required" not in str(exc):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        spec = None
    if spec is None:
        try:
            spec = parse_config(text, [f"scenario={default}"] + overrides)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    if spec.scenario not in allowed:
        print(f"config error: scenario: {spec.scenario!r} does not belong to '{args.command}'", file=sys.stderr)
        return EXIT_CONFIG
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
