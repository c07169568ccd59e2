"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--repeat 5] [--json out.json]

Each kernel is run on identical inputs under both backends; the table shows
the best-of-``repeat`` wall time per backend and how far apart the two
results are.
"""

import argparse
import json
import math
import time

import numpy as np

from khavinson import _backend
from khavinson.kernels import ProblemPoint
from khavinson.quadrature import sphere_quadrature
from khavinson.representations import c_double2, c_final


def _cases():
    pp = ProblemPoint(4, 0.9, 0.6)
    z = np.linspace(-5.0, 5.0, 2001)
    rule = sphere_quadrature(4, 1_000_000, seed=1)
    x, ell = pp.point(), pp.direction()
    y = 0.5 * x
    return {
        "p_rho_many (2001 z, n=4, rho=0.9)":
            lambda: _backend.p_rho_many(z, 4, 0.9, 1e-10, 1e-12, 40)[0],
        "oracle_abs_sum (1e6 points, n=4)":
            lambda: np.array(_backend.oracle_abs_sum(rule.points, rule.weights, x, ell)),
        "moebius_abs_sum (1e6 points, n=4)":
            lambda: np.array(_backend.moebius_abs_sum(rule.points, rule.weights, x, ell)),
        "poisson_sign_sum (1e6 points, n=4)":
            lambda: np.array([_backend.poisson_sign_sum(rule.points, rule.weights, y, x, ell)]),
        "c_final (n=5, rho=0.99, tau=0.7)":
            lambda: np.array([c_final(ProblemPoint(5, 0.99, 0.7)).value]),
        "c_double2 (n=3, rho=0.7, tau=0.7)":
            lambda: np.array([c_double2(ProblemPoint(3, 0.7, 0.7)).value]),
    }


def _best(fn, repeat):
    out, best = None, math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(repeat: int = 5):
    if "compiled" not in _backend.AVAILABLE:
        raise SystemExit("compiled kernels are not built; nothing to compare")
    previous = _backend.name
    rows = []
    try:
        for label, fn in _cases().items():
            _backend.use("compiled")
            tc, vc = _best(fn, repeat)
            _backend.use("python")
            tp, vp = _best(fn, repeat)
            scale = np.maximum(np.abs(vp), 1e-300)
            rows.append({"kernel": label, "compiled_s": tc, "python_s": tp,
                         "speedup": tp / tc, "max_rel_diff": float(np.max(np.abs(vc - vp) / scale))})
    finally:
        _backend.use(previous)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'kernel':40s} {'compiled':>10s} {'python':>10s} {'speedup':>8s} {'rel diff':>9s}")
    for r in rows:
        print(f"{r['kernel']:40s} {r['compiled_s']:10.4f} {r['python_s']:10.4f} "
              f"{r['speedup']:8.1f} {r['max_rel_diff']:9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
