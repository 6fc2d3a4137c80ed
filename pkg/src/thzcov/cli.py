"""Command-line driver: analytic curves, Monte Carlo estimates and their comparison.

Every CSV written with ``--out`` gets a sibling ``<out>.manifest.json`` that
records the scenario, the command line and the seed; ``rerun <manifest>``
reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .coverage import SWEEP_VARIABLES, apply_sweep_value, coverage_2d_baseline, evaluate
from .hitting import Environment, HittingModel, hitting_prob_horizontal
from .montecarlo import estimate_coverage, estimate_hitting
from .propagation import InfeasibleLinkError
from .scenario import ConfigError, KTable, Scenario, dump_scenario, load_scenario, parse_config
from .specfun import QuadratureError, SpecialFunctionError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 2, 3, 4

DEFAULT_TRIALS = 10_000
DEFAULT_SEED = 1


@dataclass(frozen=True)
class Preset:
    description: str
    kind: str                  # "coverage", "coverage-2d" or "hitting"
    sweep: str | None          # "var=lo:hi:step"; None means derived at run time
    x00: float = 6.0
    environment: str = "indoor"
    r_t: float | None = None


PRESETS: dict[str, Preset] = {
    "fig5": Preset("hitting probability vs AP-user distance, R_T = 12.2 m", "hitting",
                   "x_i0=1:30:1", r_t=12.2),
    "fig6": Preset("hitting probability vs AP-user distance, R_T from tau", "hitting",
                   "x_i0=1:35:1"),
    "fig7-indoor": Preset("coverage vs serving distance, typical indoor", "coverage", "x00=1:12:0.5"),
    "fig7-open": Preset("coverage vs serving distance, open office", "coverage", "x00=1:12:0.5",
                        environment="open-office"),
    "fig7-2d": Preset("coverage vs serving distance, height-agnostic baseline", "coverage-2d",
                      "x00=1:12:0.5"),
    "fig8": Preset("coverage vs SINR threshold at x00 = 6 m", "coverage", "tau_db=0:6:0.5"),
    "fig9": Preset("coverage vs main-lobe gain moved from UE to AP, x00 = 10 m", "coverage",
                   "gain_split_db=-5:5:1", x00=10.0),
    "fig10": Preset("coverage vs carrier frequency (needs --k-table)", "coverage", None),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# sweep parsing
# ---------------------------------------------------------------------------

def parse_sweep(text: str) -> tuple[str, list[float]]:
    """``var=lo:hi:step`` to ``(var, grid)``; the grid includes ``hi`` when it lands on it."""
    try:
        var, rng = text.split("=", 1)
        lo, hi, step = (float(v) for v in rng.split(":"))
    except ValueError:
        raise UsageError(f"bad --sweep {text!r}; expected var=lo:hi:step") from None
    var = var.strip()
    if var not in SWEEP_VARIABLES + ("x_i0",):
        raise UsageError(f"unknown sweep variable {var!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and step > 0.0 and hi >= lo):
        raise UsageError("sweep needs finite lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return var, [lo + i * step for i in range(n)]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class Job:
    command: str
    scenario: Scenario
    kind: str
    variable: str
    grid: list[float]
    x00: float
    environment: str
    trials: int
    seed: int
    r_t: float | None
    tolerance: float | None


def _analytic_row(job: Job, value: float) -> list[float]:
    s = job.scenario
    if job.kind == "hitting":
        m = HittingModel.from_scenario(s, job.environment)
        vertical = float(m.vertical(value))
        horizontal = hitting_prob_horizontal(m.phi_ah)
        return [horizontal * vertical, vertical, horizontal]
    sv, xv = apply_sweep_value(s, job.variable, value, job.x00)
    if job.kind == "coverage-2d":
        r = coverage_2d_baseline(xv, sv, environment=job.environment)
        return [r.p_c, r.p_c_los, r.lambda_near, r.lambda_far, evaluate(xv, sv, job.environment).p_c]
    r = evaluate(xv, sv, job.environment)
    return [r.p_c, r.p_c_los, r.lambda_near, r.lambda_far]


def _analytic_header(kind: str) -> list[str]:
    if kind == "hitting":
        return ["p_hit", "p_hit_vertical", "p_hit_horizontal"]
    if kind == "coverage-2d":
        return ["p_c", "p_c_los", "lambda_near", "lambda_far", "p_c_3d"]
    return ["p_c", "p_c_los", "lambda_near", "lambda_far"]


def _mc_row(job: Job, value: float) -> list:
    if job.kind == "hitting":
        e = estimate_hitting(job.scenario, value, job.trials, job.seed, job.environment)
    else:
        sv, xv = apply_sweep_value(job.scenario, job.variable, value, job.x00)
        e = estimate_coverage(sv, xv, job.trials, job.seed, job.environment)
    return [e.mean, e.half_width, e.trials, e.rejected]


MC_HEADER = ["mc_mean", "mc_ci95", "trials", "rejected_associations"]


def run(job: Job) -> tuple[str, list[str]]:
    """CSV text and summary lines for one command."""
    rows = []
    summary: list[str] = []
    worst = (0.0, math.nan)
    ordering_ok = True
    for v in job.grid:
        if job.command == "analyze":
            rows.append([v] + _analytic_row(job, v))
        elif job.command == "simulate":
            rows.append([v] + _mc_row(job, v))
        else:
            a = _analytic_row(job, v)
            m = _mc_row(job, v)
            err = abs(a[0] - m[0])
            if err > worst[0] or math.isnan(worst[1]):
                worst = (err, v)
            if job.kind == "coverage-2d" and a[0] > a[-1]:
                ordering_ok = False
            rows.append([v] + a + m + [err])
    if job.command == "analyze":
        header = ["sweep_value"] + _analytic_header(job.kind)
    elif job.command == "simulate":
        header = ["sweep_value"] + MC_HEADER
    else:
        header = ["sweep_value"] + _analytic_header(job.kind) + MC_HEADER + ["abs_error"]
        verdict = "PASS" if job.tolerance is None or worst[0] <= job.tolerance else "FAIL"
        tol = "none" if job.tolerance is None else f"{job.tolerance:g}"
        summary.append(f"max |analytic - MC| = {worst[0]:.6g} at {job.variable} = {worst[1]:g}; "
                       f"tolerance {tol}: {verdict}")
        if job.kind == "coverage-2d":
            summary.append(f"2D baseline <= 3D analysis at every point: {'yes' if ordering_ok else 'no'}")
    return _csv(header, rows), summary


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thzcov", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (("analyze", "analytic coverage or hitting curve"),
                            ("simulate", "Monte Carlo estimates"),
                            ("compare", "analytic and Monte Carlo side by side")):
        c = sub.add_parser(name, help=help_text)
        c.add_argument("--config", help="scenario file (key = value)")
        c.add_argument("--preset", choices=sorted(PRESETS))
        c.add_argument("--sweep", help="var=lo:hi:step, var in " + ", ".join(SWEEP_VARIABLES + ("x_i0",)))
        c.add_argument("--x00", type=float, help="serving distance (m) for non-distance sweeps")
        c.add_argument("--env", default=None, help="indoor | open-office")
        c.add_argument("--k-table", help="CSV of frequency (Hz), K (1/m)")
        c.add_argument("--out", help="CSV destination; a manifest is written next to it")
        if name != "analyze":
            c.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
            c.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if name == "compare":
            c.add_argument("--tolerance", type=float, default=None)
    sub.add_parser("preset-list", help="list the figure presets")
    r = sub.add_parser("rerun", help="repeat the run recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out", help="override the CSV destination")
    return p


def _resolve(args) -> Job:
    s = load_scenario(args.config) if args.config else Scenario().with_exact_db_gains()
    if args.k_table:
        s = s.replace(**{"propagation.k_table": KTable.load(args.k_table)})
    preset = PRESETS[args.preset] if args.preset else None
    kind = preset.kind if preset else "coverage"
    env = args.env or (preset.environment if preset else "indoor")
    try:
        env = Environment.parse(env).value
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    r_t = preset.r_t if preset else None
    if r_t is not None and s.r_t_override is None:
        s = s.replace(r_t_override=r_t)
    x00 = args.x00 if args.x00 is not None else (preset.x00 if preset else 6.0)
    sweep_text = args.sweep or (preset.sweep if preset else None)
    if sweep_text is None and preset is not None and args.preset == "fig10":
        table = s.propagation.k_table
        if table is None:
            raise ConfigError("preset fig10 needs --k-table (or k_abs_table in the config)")
        lo, hi = table.frequencies[0] / 1e12, table.frequencies[-1] / 1e12
        sweep_text = f"f_thz={lo!r}:{hi!r}:{(hi - lo) / 20.0!r}"
    if sweep_text is None:
        variable, grid = ("x_i0" if kind == "hitting" else "x00"), [x00]
    else:
        variable, grid = parse_sweep(sweep_text)
    if (variable == "x_i0") != (kind == "hitting"):
        raise UsageError("x_i0 sweeps go with hitting presets only")
    if kind == "coverage-2d" and variable != "x00":
        raise UsageError("the 2D baseline preset sweeps x00 only")
    trials = getattr(args, "trials", DEFAULT_TRIALS)
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    seed = getattr(args, "seed", DEFAULT_SEED)
    if seed < 0 or seed >= 2 ** 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    return Job(args.command, s, kind, variable, sorted(grid), x00, env, trials, seed, r_t,
                   getattr(args, "tolerance", None))


def _manifest(job: Job, argv: list[str], duration: float, out: str) -> dict:
    return {
        "tool": "thzcov",
        "version": __version__,
        "command": job.command,
        "argv": argv,
        "scenario": dump_scenario(job.scenario),
        "kind": job.kind,
        "sweep": {"variable": job.variable, "grid": job.grid},
        "x00": job.x00,
        "environment": job.environment,
        "seed": job.seed,
        "trials": job.trials if job.command != "analyze" else 0,
        "tolerance": job.tolerance,
        "output": out,
        "duration_s": duration,
    }


def _job_from_manifest(m: dict) -> Job:
    s = parse_config(m["scenario"])
    return Job(m["command"], s, m["kind"], m["sweep"]["variable"],
                   [float(v) for v in m["sweep"]["grid"]], float(m["x00"]), m["environment"],
                   max(int(m["trials"]), 1), int(m["seed"]), s.r_t_override, m.get("tolerance"))


def _emit(job: Job, out: str | None, argv: list[str]) -> int:
    t0 = time.perf_counter()
    text, summary = run(job)
    duration = time.perf_counter() - t0
    if out:
        path = Path(out)
        path.write_text(text, encoding="utf-8")
        manifest = _manifest(job, argv, duration, str(path))
        Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n",
                                                       encoding="utf-8")
    else:
        sys.stdout.write(text)
    for line in summary:
        print(line, file=sys.stderr)
    if job.command == "compare" and summary and summary[0].endswith("FAIL"):
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "preset-list":
            for name in sorted(PRESETS):
                pr = PRESETS[name]
                print(f"{name:12s} {pr.kind:12s} {pr.sweep or '(from K table)':22s} {pr.description}")
            return EXIT_OK
        if args.command == "rerun":
            try:
                m = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read manifest: {exc}") from exc
            return _emit(_job_from_manifest(m), args.out or m.get("output"), m.get("argv", []))
        job = _resolve(args)
        return _emit(job, args.out, argv)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleLinkError, SpecialFunctionError, QuadratureError, FloatingPointError,
            ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
