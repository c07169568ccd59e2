"""Command-line front end: ``khavinson {constant, sweep, conjecture, verify}``.

Every command emits one output record as JSON (default) or CSV.  Exit codes:
0 success, 1 a verification suite failed, 2 usage error, 3 numerical failure.
Diagnostics go to stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__, _backend
from . import analysis
from .errors import AccuracyError, DomainError
from .kernels import ProblemPoint, canonicalize
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, sphere_quadrature
from .representations import Method, c_halfspace, evaluate

CSV_COLUMNS = ("command", "n", "rho", "tau", "method", "value", "err_est", "seed")
SUITES = ("zero_integral", "km_inequality", "p1_inequality", "ineq_rho", "extremal_lemma",
          "hypergeometric", "cross_methods")
METHODS = ("auto",) + tuple(m.value for m in Method if m is not Method.HALFSPACE)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- serialization -----------------------------------------------------------------

def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(record: dict) -> str:
    """JSON with every float written to 17 significant digits (lossless round trip)."""
    return _encode(record)


def to_csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    seed = record["metadata"].get("seed")
    for r in record["results"]:
        cells = [record["command"], r.get("n", ""), r.get("rho", ""), r.get("tau", ""),
                 f"{r['method']}/{r['name']}", r["value"], r["err_est"],
                 "" if seed is None else seed]
        w.writerow([fmt_float(c) if isinstance(c, float) else c for c in cells])
    return buf.getvalue()


def _result(name, value, err_est=0.0, method="", n=None, rho=None, tau=None, **extra) -> dict:
    out = {"name": name, "method": method, "value": float(value), "err_est": float(err_est)}
    for k, v in (("n", n), ("rho", rho), ("tau", tau)):
        if v is not None:
            out[k] = v
    out.update(extra)
    return out


def _record(command: str, inputs: dict, results: list, cfg: QuadratureConfig,
            seed: Optional[int] = None, summary: Optional[dict] = None) -> dict:
    rec = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "metadata": {
            "seed": seed,
            "tolerances": {"rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol,
                           "max_depth": cfg.max_depth},
            "version": __version__,
            "backend": _backend.name,
        },
    }
    if summary is not None:
        rec["summary"] = summary
    return rec


# --- argument helpers --------------------------------------------------------------

def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                            max_depth=DEFAULT_CONFIG.max_depth)


def _check_finite(results):
    for r in results:
        if not math.isfinite(r["value"]):
            raise AccuracyError(f"non-finite result for {r['name']}", value=r["value"])


# --- commands ----------------------------------------------------------------------

def cmd_constant(args) -> tuple:
    cfg = _cfg(args)
    vector_mode = args.x is not None or args.ell is not None
    if vector_mode and (args.x is None or args.ell is None):
        raise UsageError("--x and --ell must be given together")
    if vector_mode and (args.n is not None or args.rho is not None or args.tau is not None):
        raise UsageError("--x/--ell cannot be combined with --n/--rho/--tau")

    if args.domain == "halfspace":
        if vector_mode or args.rho is not None:
            raise UsageError("the half-space constant takes only --n and --tau")
        if args.method not in ("auto", "final"):
            raise UsageError("the half-space constant has a single evaluation method")
        if args.n is None:
            raise UsageError("--n is required")
        tau = 0.0 if args.tau is None else args.tau
        cv = c_halfspace(args.n, tau, cfg)
        results = [_result("C", cv.value, cv.err_est, "halfspace", args.n, 1.0, tau)]
        inputs = {"domain": "halfspace", "n": args.n, "tau": tau}
        _check_finite(results)
        return _record("constant", inputs, results, cfg), EXIT_OK

    if vector_mode:
        pp = canonicalize(args.x, args.ell)
        inputs = {"domain": "ball", "x": list(args.x), "ell": list(args.ell)}
    else:
        if args.n is None or args.rho is None:
            raise UsageError("--n and --rho are required (or --x and --ell)")
        pp = ProblemPoint(args.n, args.rho, 0.0 if args.tau is None else args.tau)
        inputs = {"domain": "ball", "n": pp.n, "rho": pp.rho, "tau": pp.tau}

    method = args.method
    if method == "auto":
        method = "final" if pp.n >= 3 else "sphere_oracle"
    inputs["method"] = method
    samples = None
    seed = None
    if method in ("sphere_oracle", "moebius") and (args.seed is not None or pp.n >= 4):
        seed = 0 if args.seed is None else args.seed
        samples = sphere_quadrature(pp.n, args.samples, seed=seed, mode="monte_carlo")
    cv = evaluate(pp, method, cfg, samples)
    results = [_result("C", cv.value, cv.err_est, method, pp.n, pp.rho, pp.tau)]
    if pp.rho < 1.0:
        f = 1.0 - pp.rho
        results.append(_result("Cscript", cv.value / f, cv.err_est / f, method,
                               pp.n, pp.rho, pp.tau))
    _check_finite(results)
    return _record("constant", inputs, results, cfg, seed), EXIT_OK


def _sweep_results(rep) -> list:
    out = [_result("sample", v, 0.0, "final", rep.n, rep.rho, t) for t, v in rep.samples]
    out.append(_result("argmax", rep.argmax_value, 0.0, "final", rep.n, rep.rho, rep.argmax_tau))
    out.append(_result("radial", rep.radial_value, 0.0, "final", rep.n, rep.rho, 0.0))
    out.append(_result("tangential", rep.tangential_value, 0.0, "final", rep.n, rep.rho,
                       rep.samples[-1][0]))
    return out


def cmd_sweep(args) -> tuple:
    cfg = _cfg(args)
    rep = analysis.sweep_tau(args.n, args.rho, args.grid, cfg)
    results = _sweep_results(rep)
    _check_finite(results)
    summary = {"argmax_tau": rep.argmax_tau, "argmax_value": rep.argmax_value,
               "conjecture_holds": rep.conjecture_holds}
    inputs = {"n": args.n, "rho": args.rho, "grid": args.grid}
    return _record("sweep", inputs, results, cfg, summary=summary), EXIT_OK


def cmd_conjecture(args) -> tuple:
    cfg = _cfg(args)
    reps = analysis.conjecture_scan(args.n, args.rho_list, cfg, args.grid)
    results = []
    for rep in reps:
        results.append(_result("argmax", rep.argmax_value, 0.0, "final", rep.n, rep.rho,
                               rep.argmax_tau))
        results.append(_result("radial", rep.radial_value, 0.0, "final", rep.n, rep.rho, 0.0))
    _check_finite(results)
    summary = {
        "verdicts": [{"rho": r.rho, "conjecture_holds": r.conjecture_holds} for r in reps],
        "empirical_threshold": analysis.empirical_threshold(reps),
    }
    inputs = {"n": args.n, "rho_list": list(args.rho_list), "grid": args.grid}
    return _record("conjecture", inputs, results, cfg, summary=summary), EXIT_OK


def _run_suite(args, cfg) -> list:
    suite = args.suite
    ns = args.n
    if suite == "zero_integral":
        grid = analysis.standard_grid(ns=ns or analysis.GRID_N)
        return [analysis.verify_zero_integral(grid, cfg)]
    if suite == "km_inequality":
        y = np.linspace(-args.M, args.M, args.points)
        return [analysis.verify_km_inequality(n, y) for n in (ns or range(3, 9))]
    if suite == "p1_inequality":
        z = np.linspace(-args.M, args.M, args.points)
        return [analysis.verify_p1_inequality(n, z) for n in (ns or range(3, 9))]
    if suite == "ineq_rho":
        out = []
        for n in (ns or [3]):
            K = args.K if args.K is not None else (3 * n - 2) / 4.0
            out.append(analysis.verify_ineq_rho(n, args.rho, K, args.M, args.points, cfg))
        return out
    if suite == "extremal_lemma":
        out = []
        for n in (ns or [3]):
            a = args.a if args.a is not None else (3 * n - 2) / 4.0
            out.append(analysis.verify_extremal_lemma(n, a, args.b, cfg))
        return out
    if suite == "hypergeometric":
        return analysis.verify_hypergeometric(seed=args.seed if args.seed is not None else 7)
    if suite == "cross_methods":
        grid = analysis.standard_grid(ns=ns or analysis.GRID_N)
        return analysis.verify_cross_methods(grid, cfg, monte_carlo=not args.no_monte_carlo,
                                             seed=args.seed if args.seed is not None else 0)
    raise UsageError(f"unknown suite {suite!r}")


def cmd_verify(args) -> tuple:
    cfg = _cfg(args)
    reports = _run_suite(args, cfg)
    results = [_result(r.name, r.worst_residual, 0.0, args.suite, all_pass=r.all_pass,
                       points=len(r.grid), notes=r.notes)
               for r in reports]
    ok = all(r.all_pass for r in reports)
    inputs = {"suite": args.suite}
    if args.n:
        inputs["n"] = list(args.n)
    return (_record("verify", inputs, results, cfg, args.seed, summary={"all_pass": ok}),
            EXIT_OK if ok else EXIT_FAIL)


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khavinson",
                                description="Sharp gradient constants for bounded harmonic functions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--rel-tol", type=float, default=DEFAULT_CONFIG.rel_tol)
        sp.add_argument("--abs-tol", type=float, default=DEFAULT_CONFIG.abs_tol)

    c = sub.add_parser("constant", help="evaluate C(x; ell)")
    common(c)
    c.add_argument("--domain", choices=("ball", "halfspace"), default="ball")
    c.add_argument("--n", type=int)
    c.add_argument("--rho", type=float)
    c.add_argument("--tau", type=float)
    c.add_argument("--x", type=_floats, help="comma-separated point in the ball")
    c.add_argument("--ell", type=_floats, help="comma-separated unit direction")
    c.add_argument("--method", choices=METHODS, default="auto")
    c.add_argument("--seed", type=int, help="Monte Carlo seed (sphere routes)")
    c.add_argument("--samples", type=int, default=1_000_000)
    c.set_defaults(func=cmd_constant)

    s = sub.add_parser("sweep", help="C over a tau grid with refined argmax")
    common(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--grid", type=int, default=33)
    s.set_defaults(func=cmd_sweep)

    j = sub.add_parser("conjecture", help="radial-maximum verdicts over several rho")
    common(j)
    j.add_argument("--n", type=int, required=True)
    j.add_argument("--rho-list", type=_floats, required=True)
    j.add_argument("--grid", type=int, default=33)
    j.set_defaults(func=cmd_conjecture)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--n", type=_ints, help="dimension or comma-separated dimensions")
    v.add_argument("--rho", type=float, default=1.0, help="ineq_rho only")
    v.add_argument("--K", type=float, help="ineq_rho only; default (3n-2)/4")
    v.add_argument("--M", type=float, default=20.0, help="half-width of the z or y grid")
    v.add_argument("--points", type=int, default=401)
    v.add_argument("--a", type=float, help="extremal_lemma only; default (3n-2)/4")
    v.add_argument("--b", type=float, default=1.0, help="extremal_lemma only")
    v.add_argument("--seed", type=int)
    v.add_argument("--no-monte-carlo", action="store_true", help="cross_methods only")
    v.set_defaults(func=cmd_verify)
    return p


def _diag(kind: str, exc: BaseException):
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse already printed usage
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        record, code = args.func(args)
    except (UsageError, DomainError) as e:
        _diag("usage", e)
        return EXIT_USAGE
    except (AccuracyError, FloatingPointError, ZeroDivisionError, OverflowError) as e:
        _diag("numerical", e)
        return EXIT_NUMERIC
    out = to_csv(record) if args.format == "csv" else dumps(record) + "\n"
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
