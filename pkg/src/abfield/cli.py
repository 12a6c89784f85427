"""Command-line front end: ``abfield analytic|simulate|null-check|sweep|convergence``.

Reports are JSON with 17 significant digits; time series and tables are CSV.
Errors print a single ``error: ...`` line and exit 2 (configuration) or 3
(numerical failure).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analytic import QuadratureError, consistency_report
from .branches import PhaseSamplingError, gaussian_visibility_model
from .propagator import BoundaryError, GridError
from .scenarios import run_scenario, triggered_null_scenario
from .units import (ConfigError, SimulationConfig, config_from_dict, config_to_dict,
                    dump_config, load_config, to_natural_units)

SCHEMA_VERSION = "1"
SERIES_COLUMNS = ["t", "re_overlap", "im_overlap", "visibility", "rel_phase", "entropy",
                  "mean_x_L", "mean_x_R", "mean_p_L", "mean_p_R"]
SWEEP_COLUMNS = ["value", "phi_ab", "simulated_phase", "visibility_sim", "visibility_model",
                 "phase_error"]
CONVERGENCE_COLUMNS = ["points", "dt", "simulated_phase", "phase_error", "phase_change",
                       "norm_drift"]


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return json.dumps(x)


def to_json(obj, indent=0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        obj = obj.item()
    return fmt(obj)


def config_digest(cfg: SimulationConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()


def read_config(path) -> SimulationConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return load_config(text)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _record(command, cfg, report):
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "config_digest": config_digest(cfg), "report": report}


# -- subcommands ------------------------------------------------------------------

def cmd_analytic(args):
    cfg = read_config(args.config)
    if cfg.experiment == "null_check":
        raise ConfigError("experiment: analytic needs an electric or magnetic config")
    report = consistency_report(cfg.setup, cfg.constants).as_dict()
    print(to_json(report))
    return 0


def cmd_simulate(args):
    cfg = read_config(args.config)
    t0 = time.perf_counter()
    run = run_scenario(cfg)
    wall = time.perf_counter() - t0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series = run.series
    rows = zip(*(series[c] for c in SERIES_COLUMNS))
    write_csv(out / "series.csv", SERIES_COLUMNS, rows)
    report = dataclasses.replace(run.report, series_path="series.csv").as_dict()
    command = f"simulate --config {args.config}"
    text = to_json(_record(command, cfg, report)) + "\n"
    (out / "report.json").write_text(text)
    (out / "run.json").write_text(to_json({**_record(command, cfg, None), "wall_time": wall}) + "\n")
    sys.stdout.write(text)
    return 0


def cmd_null_check(args):
    cfg = read_config(args.config)
    if cfg.experiment != "null_check":
        raise ConfigError("experiment: null-check needs a null_check config")
    s = to_natural_units(cfg.setup, cfg.scaling)
    k = to_natural_units(cfg.constants, cfg.scaling)
    report = triggered_null_scenario(s.r, s.Q, k)
    text = to_json(_record(f"null-check --config {args.config}", cfg, report)) + "\n"
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "null_check.json").write_text(text)
    sys.stdout.write(text)
    return 0


def _point_config(cfg: SimulationConfig, param: str, value: float) -> SimulationConfig:
    doc = config_to_dict(cfg)
    if param == "sigma0":
        doc["sigma0"] = value
    elif param in doc["setup"]:
        doc["setup"][param] = value
    else:
        raise ConfigError(f"sweep: unknown parameter '{param}'")
    if cfg.experiment == "electric":
        doc["mirror"].pop("d", None)
    return config_from_dict(doc)


def sweep_row(cfg: SimulationConfig, value: float):
    """One table row; visibilities are per source (one charge or one cylinder)."""
    run = run_scenario(cfg)
    res = run.branches[0]
    a, b = res.moments_L[-1], res.moments_R[-1]
    model = gaussian_visibility_model(a.mean_x - b.mean_x, a.mean_p - b.mean_p, cfg.sigma0)
    rep = run.report
    return [value, rep.analytic.phi_ab, rep.simulated_phase, abs(res.final_overlap), model,
            rep.phase_error]


def _sweep_job(job):
    doc, value = job
    return sweep_row(config_from_dict(doc), value)


def cmd_sweep(args):
    cfg = read_config(args.config)
    if not args.values:
        raise ConfigError("sweep: values list is empty")
    points = [_point_config(cfg, args.param, v) for v in args.values]
    jobs = [(config_to_dict(p), v) for p, v in zip(points, args.values)]
    rows = _fan_out(_sweep_job, jobs, args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"sweep_{args.param}.csv", SWEEP_COLUMNS, rows)
    sys.stdout.write(csv_text(SWEEP_COLUMNS, rows))
    return 0


def _convergence_job(job):
    doc = job
    cfg = config_from_dict(doc)
    run = run_scenario(cfg)
    drift = max(abs(s.norm() - 1.0) for r in run.branches for s in (r.final_L, r.final_R))
    return run.report.simulated_phase, run.report.phase_error, drift


def cmd_convergence(args):
    cfg = read_config(args.config)
    if not args.grids or not args.dts:
        raise ConfigError("convergence: grids and dts must be non-empty")
    doc = config_to_dict(cfg)
    jobs, keys = [], []
    for n in args.grids:
        for dt in sorted(args.dts, reverse=True):
            d = json.loads(json.dumps(doc))
            d["grid"]["points"] = n
            d["dt"] = dt
            config_from_dict(d)
            jobs.append(d)
            keys.append((n, dt))
    results = _fan_out(_convergence_job, jobs, args.jobs)
    rows, prev = [], {}
    for (n, dt), (phase, err, drift) in zip(keys, results):
        change = abs(phase - prev[n]) if n in prev else None
        prev[n] = phase
        rows.append([n, dt, phase, err, change, drift])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "convergence.csv", CONVERGENCE_COLUMNS, rows)
    sys.stdout.write(csv_text(CONVERGENCE_COLUMNS, rows))
    return 0


def _fan_out(fn, jobs, n_jobs):
    if n_jobs <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"error: usage: {message}\n")


def build_parser():
    p = _Parser(prog="abfield", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON configuration document")
        sp.add_argument("--out", default="./out", help="output directory (default ./out)")

    sp = sub.add_parser("analytic", help="closed-form phases, shifts and identity residual")
    common(sp)
    sp.set_defaults(func=cmd_analytic)

    sp = sub.add_parser("simulate", help="run the electric or magnetic scenario")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("null-check", help="field residuals of the triggered-charge setup")
    common(sp)
    sp.set_defaults(func=cmd_null_check)

    sp = sub.add_parser("sweep", help="scan one parameter (sigma0 or a setup field)")
    common(sp)
    sp.add_argument("--param", required=True)
    sp.add_argument("--values", type=_floats, default=[], help="comma-separated values")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("convergence", help="phase error and norm drift over grids and steps")
    common(sp)
    sp.add_argument("--grids", type=_ints, default=[])
    sp.add_argument("--dts", type=_floats, default=[])
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ConfigError, GridError, ValueError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except (BoundaryError, PhaseSamplingError, QuadratureError, RuntimeError) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
