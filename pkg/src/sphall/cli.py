"""Command-line front end: run one experiment and write a JSON report.

Exit status: 0 when every criterion passes, 1 on a numeric failure or a
failed criterion, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, experiments, specfun
from .errors import SphallError

SCHEMA = "report-v1"

COMMANDS = ("zeros", "specfun-check", "eisenstein", "hall-oracle", "shuffle-check", "mellin-check", "wheel-scan")

DEFAULT_TOL = {
    "zeros": 1e-6,
    "specfun-check": 1e-9,
    "eisenstein": 1e-6,
    "hall-oracle": 1e-8,
    "shuffle-check": 1e-8,
    "mellin-check": 1e-6,
    "wheel-scan": 1e4,  # minimum accepted rank gap
}


class ConfigError(Exception):
    pass


# ----------------------------------------------------------------- parsing helpers


def parse_tau(text: str) -> complex:
    try:
        x, y = (float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"--tau expects 'x,y', got {text!r}") from None
    if y <= 0:
        raise ConfigError("--tau needs y > 0")
    return complex(x, y)


def parse_complex_list(text: str) -> list:
    """'0;1+1j;-2j' (or comma separated) -> list of complex numbers."""
    parts = [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]
    try:
        return [complex(p.replace("i", "j")) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot read complex values from {text!r}") from None


def parse_float_list(text: str) -> list:
    try:
        return [float(p) for p in text.replace(";", ",").split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot read numbers from {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="main tolerance of the command")
    common.add_argument("--out", help="write the JSON report here (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent cases")
    common.add_argument("--zero-cache", help="zero ordinate cache file (read if present, else written)")
    common.add_argument("--human", action="store_true", help="indented JSON")

    parser = argparse.ArgumentParser(prog="sphall", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sphall {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", parents=[common], help="ordinates of zeros of zeta*(1/2 + it)")
    p.add_argument("--range", nargs=2, type=float, default=[0.0, 30.0], metavar=("T_MIN", "T_MAX"))
    p.add_argument("--step", type=float, default=0.05)

    sub.add_parser("specfun-check", parents=[common], help="functional equations on a fixed grid")

    p = sub.add_parser("eisenstein", parents=[common], help="E(tau, s) and its constant term")
    p.add_argument("--tau", default="0,1", help="x,y")
    p.add_argument("--s", default="2", help="complex exponent, Re s > 1")
    p.add_argument("--heights", default="0.7,1.3,2.0", help="y values for the constant term")

    p = sub.add_parser("hall-oracle", parents=[common], help="Hall product of characters vs E(tau, s)")
    p.add_argument("--tau", action="append", help="x,y (repeatable; default i and 0.3+1.1i)")
    p.add_argument("--differences", default="2.5,3", help="values of t1 - t2")
    p.add_argument("--degree-floor", type=float, default=1e-3)

    p = sub.add_parser("shuffle-check", parents=[common], help="shuffle axioms and quadratic relations")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--with-ch", action="store_true", help="also run the lattice-side homomorphism check (~2 min)")
    p.add_argument("--ch-tol", type=float, default=1e-4)

    p = sub.add_parser("mellin-check", parents=[common], help="Riemann formula and Mellin round trips")
    p.add_argument("--mellin-tol", type=float, default=1e-10, help="forward quadrature tolerance")
    p.add_argument("--contour-T", type=float, default=40.0)
    p.add_argument("--contour-nodes", type=int, default=801)

    p = sub.add_parser("wheel-scan", parents=[common], help="cohomology of the hexagon complex near a zero")
    p.add_argument("--zero-index", type=int, default=0)
    p.add_argument("--grid", default="0;1+1j", help="common shifts c, e.g. '0;1+1j;-2j'")
    p.add_argument("--offsets", default="0.1,-0.1")
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.add_argument("--random", type=int, default=0, help="also test this many random wheel-free matrices")
    p.add_argument("--coincident", action="store_true",
                   help="also report dims as two points approach each other (nothing asserted)")
    return parser


# ----------------------------------------------------------------- JSON


def to_jsonable(obj):
    """Complex -> {re, im}; numpy scalars and arrays -> Python; non-finite floats -> strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(obj.real)), "im": to_jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


# ----------------------------------------------------------------- commands


def _zero_cache(path):
    if path and os.path.exists(path):
        cache = specfun.ZetaZeroCache.read(path)
        if not cache.verify():
            raise SphallError(f"zero cache {path} failed verification")
        return cache
    cache = specfun.ZetaZeroCache.compute(t_max=60.0)
    if path:
        cache.write(path)
    return cache


def _run_zeros(args, tol, config):
    t_min, t_max = args.range
    if not (0 <= t_min < t_max):
        raise ConfigError("--range needs 0 <= T_MIN < T_MAX")
    if args.step <= 0:
        raise ConfigError("--step must be positive")
    config.update({"range": [t_min, t_max], "step": args.step})
    out = experiments.zeta_zero_scan(t_min, t_max, args.step, tol)
    if args.zero_cache:
        specfun.ZetaZeroCache(out["ordinates"], tol).write(args.zero_cache)
    return out


def _run_specfun(args, tol, config):
    return experiments.functional_equation_grid(tol)


def _run_eisenstein(args, tol, config):
    tau = parse_tau(args.tau)
    s = parse_complex_list(args.s)
    if len(s) != 1 or s[0].real <= 1:
        raise ConfigError("--s must be one complex number with Re s > 1")
    heights = parse_float_list(args.heights)
    if any(y <= 0 for y in heights):
        raise ConfigError("--heights must be positive")
    config.update({"tau": tau, "s": s[0], "heights": heights})
    return experiments.eisenstein_report(tau, s[0], tol, tuple(heights))


def _run_hall(args, tol, config):
    taus = [parse_tau(t) for t in args.tau] if args.tau else [complex(0, 1), complex(0.3, 1.1)]
    diffs = parse_float_list(args.differences)
    if any(d <= 1 for d in diffs):
        raise ConfigError("--differences must exceed 1")
    config.update({"taus": taus, "differences": diffs, "degree_floor": args.degree_floor})

    def one(tau):
        return experiments.hall_eisenstein_bridge(tol, (tau,), tuple(diffs), degree_floor=args.degree_floor)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        parts = list(pool.map(one, taus))
    rows = [r for part in parts for r in part["rows"]]
    worst = max(r["relative_deviation"] for r in rows)
    return {"rows": rows, "criteria": [experiments.criterion("hall_vs_eisenstein", worst, tol)]}


def _run_shuffle(args, tol, config):
    if args.trials < 1:
        raise ConfigError("--trials must be positive")
    config.update({"trials": args.trials, "with_ch": args.with_ch, "ch_tol": args.ch_tol})
    axioms = experiments.shuffle_axioms(args.seed, args.trials, tol)
    quad = experiments.quadratic_relations(tol)
    out = {"axioms": axioms, "quadratic_relations": quad,
           "criteria": axioms["criteria"] + quad["criteria"]}
    if args.with_ch:
        ch = experiments.ch_homomorphism(args.ch_tol)
        out["ch_homomorphism"] = ch
        out["criteria"] = out["criteria"] + ch["criteria"]
    return out


def _run_mellin(args, tol, config):
    if args.contour_T <= 0 or args.contour_nodes < 16 or args.mellin_tol <= 0:
        raise ConfigError("contour and quadrature settings must be positive (nodes >= 16)")
    config.update({"mellin_tol": args.mellin_tol, "contour_T": args.contour_T,
                   "contour_nodes": args.contour_nodes})
    riemann = experiments.riemann_formula(tol, args.contour_T, args.contour_nodes, args.mellin_tol)
    roundtrip = experiments.mellin_roundtrip(min(tol, 1e-9), args.contour_T, args.contour_nodes)
    return {"riemann": riemann, "roundtrip": roundtrip,
            "criteria": riemann["criteria"] + roundtrip["criteria"]}


def _run_wheel(args, tol, config):
    grid = parse_complex_list(args.grid)
    offsets = parse_float_list(args.offsets)
    if not grid:
        raise ConfigError("--grid is empty")
    if any(o == 0 for o in offsets):
        raise ConfigError("--offsets must be nonzero")
    cache = _zero_cache(args.zero_cache)
    if not 0 <= args.zero_index < len(cache.ordinates):
        raise ConfigError(f"--zero-index must lie in 0..{len(cache.ordinates) - 1}")
    config.update({"zero_index": args.zero_index, "grid": grid, "offsets": offsets,
                   "rank_tol": args.rank_tol, "random": args.random, "coincident": args.coincident})

    def one(c):
        return experiments.wheel_scan(args.zero_index, (c,), tuple(offsets), cache, args.rank_tol, tol)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        parts = list(pool.map(one, grid))
    out = {
        "rho": parts[0]["rho"], "c": grid,
        "dims": [d for p in parts for d in p["dims"]],
        "ranks": [r for p in parts for r in p["ranks"]],
        "singular_value_gaps": [g for p in parts for g in p["singular_value_gaps"]],
        "rows": [r for p in parts for r in p["rows"]],
        "criteria": [],
    }
    for name in ("wheel_dims_not_331", "perturbed_dims_not_100"):
        bad = sum(c["value"] for p in parts for c in p["criteria"] if c["name"] == name)
        out["criteria"].append(experiments.criterion(name, bad, 0.5))
    gap = min(c["value"] for p in parts for c in p["criteria"] if c["name"] == "min_rank_gap")
    out["criteria"].append(experiments.criterion("min_rank_gap", gap, tol, passed=gap > tol))
    if args.random:
        stats = experiments.wheel_free_statistics(args.seed, args.random, rank_tol=args.rank_tol)
        out["wheel_free"] = stats
        out["criteria"] += stats["criteria"]
    if args.coincident:
        out["coincident"] = [experiments.coincident_point_scan(c, rank_tol=args.rank_tol) for c in grid]
    return out


RUNNERS = {
    "zeros": _run_zeros,
    "specfun-check": _run_specfun,
    "eisenstein": _run_eisenstein,
    "hall-oracle": _run_hall,
    "shuffle-check": _run_shuffle,
    "mellin-check": _run_mellin,
    "wheel-scan": _run_wheel,
}


def _strip_timing(obj):
    """Remove wall-clock fields so the numeric payload replays byte for byte."""
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def run(args) -> tuple:
    """Execute one parsed command. Returns (report, exit_code)."""
    tol = DEFAULT_TOL[args.command] if args.tol is None else args.tol
    if not tol > 0:
        raise ConfigError("--tol must be positive")
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    config = {"command": args.command, "tolerances": {"tol": tol}, "seed": args.seed,
              "output_path": args.out, "zero_cache": args.zero_cache}
    t0 = time.perf_counter()
    errors = []
    outputs = {}
    try:
        outputs = RUNNERS[args.command](args, tol, config)
    except ConfigError:
        raise
    except (SphallError, ArithmeticError, ValueError) as exc:
        errors.append({"type": type(exc).__name__, "message": str(exc)})
    criteria = outputs.pop("criteria", []) if outputs else []
    passed = not errors and bool(criteria) and all(c["passed"] for c in criteria)
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "config": config,
        "outputs": _strip_timing(outputs),
        "criteria": criteria,
        "errors": errors,
        "passed": passed,
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    return to_jsonable(report), 0 if passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    try:
        report, code = run(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"sphall: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2 if args.human else None, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
