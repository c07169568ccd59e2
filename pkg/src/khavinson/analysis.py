"""Direction sweeps with the radial-maximum verdict, plus the inequality verifiers."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .kernels import HALF_PI, P1_closed, P_rho, P_script, ProblemPoint
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_t_weight
from .representations import c_final, c_halfspace
from .special import t_weight_moment0, t_weight_moment2

ANGLE_TOL = 1e-3
REL_TOL = 1e-7
GOLDEN_TOL = 1e-6
INEQ_TOL = 1e-12
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def thread_count() -> int:
    """Worker cap from ``KHAV_THREADS`` (default: number of CPUs, at most 8)."""
    raw = os.environ.get("KHAV_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise DomainError(f"KHAV_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(8, os.cpu_count() or 1))


def pmap(fn: Callable, items: Sequence):
    """``list(map(fn, items))``, possibly threaded; results keep input order."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SweepReport:
    n: int
    rho: float
    samples: tuple  # ((tau, C), ...) on the uniform grid
    argmax_tau: float
    argmax_value: float
    radial_value: float
    tangential_value: float
    conjecture_holds: bool
    angle_tol: float = ANGLE_TOL
    rel_tol: float = REL_TOL

    @property
    def profile_spread(self) -> float:
        vals = [v for _, v in self.samples]
        return max(vals) - min(vals)


@dataclass(frozen=True)
class VerificationReport:
    name: str
    grid: tuple
    residuals: tuple  # slack per grid point; negative means violated
    worst_residual: float
    all_pass: bool
    passes: tuple = field(default=(), repr=False)
    notes: str = ""


def _report(name, grid, residuals, passes, notes="") -> VerificationReport:
    residuals = tuple(float(r) for r in residuals)
    passes = tuple(bool(p) for p in passes)
    worst = min(residuals) if residuals else math.nan
    return VerificationReport(name, tuple(grid), residuals, worst, all(passes), passes, notes)


# --- direction sweep ------------------------------------------------------------

def _constant(n: int, rho: float, tau: float, cfg: QuadratureConfig) -> float:
    if rho == 1.0:
        return c_halfspace(n, tau, cfg).value
    return c_final(ProblemPoint(n, rho, tau), cfg).value


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Golden-section maximization of a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are candidates too, so a maximum sitting on the boundary
    is returned exactly.  Returns ``(x, f(x))``.
    """
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    cand = [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))]
    # ties go to the smaller angle
    return max(cand, key=lambda p: (p[1], -p[0]))


def sweep_tau(n: int, rho: float, grid_size: int = 33, cfg: QuadratureConfig = DEFAULT_CONFIG,
              angle_tol: float = ANGLE_TOL, rel_tol: float = REL_TOL) -> SweepReport:
    """Evaluate ``C(rho e1; ell_tau)`` on a uniform grid and refine the maximizer.

    Values within ``rel_tol`` of the largest sample count as ties and the
    smallest such angle is taken as the grid maximizer.  Golden-section
    refinement then runs on the neighbouring bracket; its result replaces
    the grid point only when it is larger by more than that tolerance.
    """
    if n < 3:
        raise DomainError("sweep_tau needs n >= 3")
    if not 0.0 <= rho <= 1.0:
        raise DomainError("rho must lie in [0, 1]")
    if grid_size < 9:
        raise DomainError("grid_size must be at least 9")
    taus = np.linspace(0.0, HALF_PI, grid_size)
    taus[-1] = HALF_PI
    vals = pmap(lambda t: _constant(n, rho, float(t), cfg), taus)
    vmax = max(vals)
    k = next(i for i, v in enumerate(vals) if v >= vmax - rel_tol * abs(vmax))
    best_tau, best_val = float(taus[k]), float(vals[k])

    lo = float(taus[max(k - 1, 0)])
    hi = float(taus[min(k + 1, grid_size - 1)])
    g_tau, g_val = golden_max(lambda t: _constant(n, rho, t, cfg), lo, hi)
    if g_val > best_val + rel_tol * abs(best_val):
        best_tau, best_val = g_tau, g_val
    best_val = max(best_val, vmax)

    radial, tangential = float(vals[0]), float(vals[-1])
    holds = best_tau <= angle_tol and best_val <= radial * (1.0 + rel_tol)
    return SweepReport(n, float(rho), tuple(zip(map(float, taus), map(float, vals))),
                       best_tau, best_val, radial, tangential, holds, angle_tol, rel_tol)


def conjecture_scan(n: int, rho_list: Sequence[float], cfg: QuadratureConfig = DEFAULT_CONFIG,
                    grid_size: int = 33) -> list:
    return [sweep_tau(n, float(r), grid_size, cfg) for r in rho_list]


def empirical_threshold(reports: Sequence[SweepReport]) -> Optional[float]:
    """Smallest listed ``rho`` from which the verdict is true for every larger listed ``rho``."""
    ordered = sorted(reports, key=lambda r: r.rho)
    thr = None
    for rep in reversed(ordered):
        if not rep.conjecture_holds:
            break
        thr = rep.rho
    return thr


def boundary_deviation(n: int, rho: float, grid_size: int = 33,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``max_tau |C(rho e1; ell_tau) - C_halfspace(ell_tau)|`` over a uniform grid."""
    taus = np.linspace(0.0, HALF_PI, grid_size)
    taus[-1] = HALF_PI

    def dev(t):
        t = float(t)
        return abs(c_final(ProblemPoint(n, rho, t), cfg).value - c_halfspace(n, t, cfg).value)

    return max(pmap(dev, taus))


# --- inequalities -----------------------------------------------------------------

def verify_extremal_lemma(n: int, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                          gammas: Optional[Sequence[float]] = None) -> VerificationReport:
    """Check the monotone-function argument behind the radial maximum.

    ``g(gamma) = sqrt((a gamma^2 + b(n-1)) / ((n-1)(1+gamma^2)))``.  With
    ``a <= (n-1) b`` the chain ``h(gamma) <= M0 g(gamma) <= M0 g(0) = h(0)``
    is checked, ``h`` being the weighted integral of ``sqrt(a (gamma t)^2 + b)``
    divided by ``sqrt(1+gamma^2)``.  With ``a > (n-1) b`` only the first link
    holds and ``g`` must increase instead.
    """
    if not (a > 0 and b > 0):
        raise DomainError("verify_extremal_lemma needs a, b > 0")
    if n < 3:
        raise DomainError("verify_extremal_lemma needs n >= 3")
    gam = np.linspace(0.0, 20.0, 201) if gammas is None else np.asarray(gammas, dtype=float)
    grid, res, ok = [], [], []

    m0, e0 = integrate_t_weight(lambda t: np.ones_like(t), n, cfg, full_output=True)
    m2, e2 = integrate_t_weight(lambda t: t * t, n, cfg, full_output=True)
    for label, got, want in (("M0", m0, t_weight_moment0(n)), ("M2", m2, t_weight_moment2(n))):
        r = -abs(got - want) / want
        grid.append(label)
        res.append(r)
        ok.append(r >= -1e-10)

    def g(x):
        return np.sqrt((a * x * x + b * (n - 1)) / ((n - 1) * (1.0 + x * x)))

    gv = g(gam)
    step = np.diff(gv)
    slope = a - (n - 1) * b
    flat_tol = 1e-12
    for i, s in enumerate(step):
        grid.append(f"g[{gam[i]:.6g}->{gam[i + 1]:.6g}]")
        if abs(slope) <= flat_tol * max(a, b):
            res.append(-abs(s))
            ok.append(abs(s) <= flat_tol)
        elif slope < 0:
            res.append(-s)
            ok.append(s < 0)
        else:
            res.append(s)
            ok.append(s > 0)

    def h(x):
        val = integrate_t_weight(lambda t: np.sqrt(a * (x * t) ** 2 + b), n, cfg)
        return val / math.sqrt(1.0 + x * x)

    h0 = h(0.0)
    m0_exact = t_weight_moment0(n)
    for x in gam:
        hx = h(float(x))
        cs = m0_exact * float(g(x)) - hx  # Cauchy-Schwarz link
        grid.append(f"cs[{x:.6g}]")
        res.append(cs)
        ok.append(cs >= -1e-10 * h0)
        if slope <= 0:
            top = h0 - hx
            grid.append(f"chain[{x:.6g}]")
            res.append(top)
            ok.append(top >= -1e-10 * h0)
    return _report("extremal_lemma", grid, res, ok, notes=f"n={n}, a={a}, b={b}")


def verify_km_inequality(n: int, y_grid: Optional[Sequence[float]] = None,
                         tol: float = INEQ_TOL) -> VerificationReport:
    """``P(y)^2 + P(-y)^2 <= (4(n-1)(3n-2) y^2 + 2 n^2) / n^n`` pointwise."""
    if n < 3:
        raise DomainError("verify_km_inequality needs n >= 3")
    y = np.linspace(-10.0, 10.0, 401) if y_grid is None else np.asarray(y_grid, dtype=float)
    lhs = P_script(y, n) ** 2 + P_script(-y, n) ** 2
    rhs = (4.0 * (n - 1) * (3 * n - 2) * y * y + 2.0 * n * n) / float(n) ** n
    slack = np.atleast_1d(rhs - lhs)
    ok = slack >= -tol
    return _report("km_inequality", np.atleast_1d(y), slack, ok, notes=f"n={n}")


def verify_p1_inequality(n: int, z_grid: Optional[Sequence[float]] = None,
                         tol: float = INEQ_TOL) -> VerificationReport:
    """``P1(z) + P1(-z) <= 2 P1(0) sqrt(K z^2 + 1)`` with ``K = (3n-2)/4``.

    Also requires equality at ``z = 0`` and strict inequality for ``|z| >= 0.1``.
    """
    if n < 3:
        raise DomainError("verify_p1_inequality needs n >= 3")
    z = np.linspace(-20.0, 20.0, 401) if z_grid is None else np.asarray(z_grid, dtype=float)
    z = np.atleast_1d(z)
    K = (3 * n - 2) / 4.0
    p0 = P1_closed(0.0, n)
    slack = 2.0 * p0 * np.sqrt(K * z * z + 1.0) - (P1_closed(z, n) + P1_closed(-z, n))
    ok = slack >= -tol
    ok &= np.where(z == 0.0, np.abs(slack) <= tol, True)
    ok &= np.where(np.abs(z) >= 0.1, slack > 0.0, True)
    return _report("p1_inequality", z, slack, ok, notes=f"n={n}, K={K}")


def symmetrized_ratio(z, n: int, rho: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """``F(z) = (P_rho(z) + P_rho(-z)) / (2 P_rho(0))``."""
    pp = ProblemPoint(n, rho)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    vals = P_rho(np.concatenate([z, -z, [0.0]]), pp, cfg)
    m = z.size
    return (vals[:m] + vals[m:2 * m]) / (2.0 * vals[-1])


def verify_ineq_rho(n: int, rho: float, K: float, M: float = 20.0, grid_size: int = 401,
                    cfg: QuadratureConfig = DEFAULT_CONFIG, tol: float = 1e-9) -> VerificationReport:
    """``F(z) <= sqrt(K z^2 + 1)`` on ``[0, M]``; ``tol`` absorbs quadrature noise."""
    if not (K > 0 and M > 0):
        raise DomainError("verify_ineq_rho needs K > 0 and M > 0")
    if n < 3:
        raise DomainError("verify_ineq_rho needs n >= 3")
    z = np.linspace(0.0, M, grid_size)
    slack = np.sqrt(K * z * z + 1.0) - symmetrized_ratio(z, n, rho, cfg)
    return _report("ineq_rho", z, slack, slack >= -tol, notes=f"n={n}, rho={rho}, K={K}")


def second_derivative(n: int, rho: float, h: float = 1e-3,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``F''(0)`` by central differences at ``h`` and ``h/2`` with one Richardson step."""
    if not 1e-5 <= h <= 1e-2:
        raise DomainError("h must lie in [1e-5, 1e-2]")
    f = symmetrized_ratio([h, 0.5 * h], n, rho, cfg)
    d1 = 2.0 * (f[0] - 1.0) / h ** 2
    d2 = 2.0 * (f[1] - 1.0) / (0.5 * h) ** 2
    return float((4.0 * d2 - d1) / 3.0)


def second_derivative_gap(n: int, rho: float, K: float, h: float = 1e-3,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``K - F''(0)``; a positive gap is what the near-boundary argument needs."""
    return K - second_derivative(n, rho, h, cfg)


def first_derivative(n: int, rho: float, h: float = 1e-3,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``(F(h) - F(-h)) / (2h)``; zero up to rounding because ``F`` is even."""
    f = symmetrized_ratio([h, -h], n, rho, cfg)
    return float((f[0] - f[1]) / (2.0 * h))


# --- grid suites shared by the CLI and the acceptance tests -------------------------

GRID_N = (3, 4, 5)
GRID_RHO = (0.0, 0.3, 0.7, 0.9, 0.99)
GRID_TAU = (0.0, math.pi / 6, math.pi / 4, math.pi / 3, HALF_PI)


def standard_grid(ns=GRID_N, rhos=GRID_RHO, taus=GRID_TAU):
    return [(n, r, t) for n in ns for r in rhos for t in taus]


def verify_zero_integral(grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG,
                         rel: float = 1e-9) -> VerificationReport:
    """``|signed integral| <= rel * (integral with |G|)`` at every grid point."""
    from .representations import zero_integral_abs, zero_integral_check

    grid = standard_grid() if grid is None else list(grid)

    def one(p):
        pp = ProblemPoint(*p)
        return rel * zero_integral_abs(pp, cfg) - abs(zero_integral_check(pp, cfg))

    slack = pmap(one, grid)
    return _report("zero_integral", grid, slack, [s >= 0.0 for s in slack])


def random_hyp_params(count: int = 100, seed: int = 7):
    """Parameter sets valid for both 2F1 evaluators: ``c > b > 0``, ``|z| < 1``."""
    from .special import HypParams

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        b = rng.uniform(0.2, 4.0)
        c = b + rng.uniform(0.2, 4.0)
        a = rng.uniform(-3.0, 3.0)
        z = rng.uniform(-0.9, 0.9)
        out.append(HypParams(float(a), float(b), float(c), float(z)))
    return out


QUAD_A = tuple(range(1, 9))
QUAD_B = (-1.0, 0.0, 0.5)
QUAD_Z = tuple(round(0.1 * k, 1) for k in range(10))
J_NS = (3, 4, 5, 6)
J_RHOS = (0.25, 0.5, 0.75)


def verify_hypergeometric(count: int = 100, seed: int = 7, tol_euler: float = 1e-9,
                          tol_quad: float = 1e-9, tol_j: float = 1e-8) -> list:
    """Three reports: Euler integral vs series, quadratic transform, J1/J2 closed forms."""
    from .representations import zero_integral_parts
    from .special import hyp2f1, hyp2f1_quadratic_lhs_rhs

    params = random_hyp_params(count, seed)

    def euler_res(p):
        s = hyp2f1(p, "series")
        e = hyp2f1(p, "euler_integral")
        return tol_euler - abs(e - s) / max(abs(s), 1e-300)

    r1 = pmap(euler_res, params)
    euler = _report("hypergeometric.euler_vs_series",
                    [(p.a, p.b, p.c, p.z) for p in params], r1, [r >= 0 for r in r1])

    qgrid = [(a, b, z) for a in QUAD_A for b in QUAD_B for z in QUAD_Z]
    r2 = []
    for a, b, z in qgrid:
        lhs, rhs = hyp2f1_quadratic_lhs_rhs(float(a), b, z)
        r2.append(tol_quad - abs(lhs - rhs) / max(abs(lhs), 1.0))
    quad = _report("hypergeometric.quadratic_transform", qgrid, r2, [r >= 0 for r in r2])

    jgrid = [(n, r) for n in J_NS for r in J_RHOS]
    r3 = []
    for n, r in jgrid:
        d = zero_integral_parts(n, r)
        r3.append(tol_j - max(abs(d["J1_closed"] - d["J1_quad"]),
                              abs(d["J2_closed"] - d["J2_quad"]),
                              abs(d["J1_euler"] - d["J1_quad"]),
                              abs(d["J2_euler"] - d["J2_quad"])) / abs(d["J1_quad"]))
    jrep = _report("hypergeometric.j_parts", jgrid, r3, [x >= 0 for x in r3])
    return [euler, quad, jrep]


def verify_cross_methods(grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG,
                         tol: float = 1e-6, tol_grid: float = 1e-5, sigmas: float = 4.0,
                         monte_carlo: bool = True, mc_samples: int = 1_000_000,
                         seed: int = 0) -> list:
    """Pairwise agreement of DOUBLE1/DOUBLE2/FINAL, the n = 3 Moebius grid and MC oracles.

    Residuals are slack: ``tol - |difference|`` for deterministic routes,
    ``sigmas - |z-score|`` for Monte Carlo.  ``DOUBLE1`` is skipped at
    ``rho = 1`` (it is not defined there).
    """
    from .quadrature import sphere_quadrature
    from .representations import c_double1, c_double2, c_moebius, c_sphere_oracle

    grid = standard_grid() if grid is None else list(grid)

    def det(p):
        pp = ProblemPoint(*p)
        vals = [c_final(pp, cfg).value, c_double2(pp, cfg).value]
        if pp.rho < 1.0:
            vals.append(c_double1(pp, cfg).value)
        spread = max(vals) - min(vals)
        return tol - spread

    r_det = pmap(det, grid)
    reports = [_report("cross_methods.deterministic", grid, r_det, [r >= 0 for r in r_det])]

    g3 = [p for p in grid if p[0] == 3 and p[1] < 1.0]
    if g3:
        def moeb(p):
            pp = ProblemPoint(*p)
            return tol_grid - abs(c_moebius(pp, cfg).value - c_final(pp, cfg).value)

        r_m = [moeb(p) for p in g3]
        reports.append(_report("cross_methods.moebius_grid", g3, r_m, [r >= 0 for r in r_m]))

    if monte_carlo:
        gmc = [p for p in grid if p[1] < 1.0]
        rules = {}

        def mc(p):
            pp = ProblemPoint(*p)
            if pp.n not in rules:
                rules[pp.n] = sphere_quadrature(pp.n, mc_samples, seed=seed)
            o = c_sphere_oracle(pp, rules[pp.n])
            z = (o.value - c_final(pp, cfg).value) / o.err_est if o.err_est > 0 else 0.0
            return sigmas - abs(z)

        r_mc = [mc(p) for p in gmc]
        reports.append(_report("cross_methods.monte_carlo", gmc, r_mc, [r >= 0 for r in r_mc]))
    return reports
