"""Evaluators for the sharp constant ``C(x; ell) = (1 - |x|) * Cscript(x; ell)``.

Five independent routes are provided, all taking the canonical
``ProblemPoint``:

``SPHERE_ORACLE``
    sphere average of ``|<grad P(x, zeta), ell>|`` (sampled or gridded).
``MOEBIUS_SPHERE``
    the sphere integral obtained after the Moebius change of variables.
``DOUBLE1`` / ``DOUBLE2``
    the two iterated angular integrals.
``FINAL``
    the one-dimensional representation through ``P_rho``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .errors import AccuracyError, DomainError
from .kernels import (
    HALF_PI,
    ProblemPoint,
    P1_closed,
    P_rho,
    kernel_G,
    kernel_G_tilde,
    kernel_R,
    kernel_S,
)
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    SphereRule,
    bracketed_roots,
    integrate,
    integrate_batch,
    integrate_halfline,
    integrate_t_weight,
    sphere_quadrature,
)
from .special import area_ratio, gamma_fn, hyp2f1, HypParams, t_weight_moment0


class Method(enum.Enum):
    SPHERE_ORACLE = "sphere_oracle"
    MOEBIUS_SPHERE = "moebius"
    DOUBLE1 = "double1"
    DOUBLE2 = "double2"
    FINAL = "final"
    HALFSPACE = "halfspace"


@dataclass(frozen=True)
class ConstantValue:
    value: float
    err_est: float
    method: Method
    point: ProblemPoint
    seed: Optional[int] = None

    @property
    def script(self) -> float:
        """``Cscript = C / (1 - rho)``; infinite on the boundary."""
        if self.point.rho >= 1.0:
            return math.inf
        return self.value / (1.0 - self.point.rho)


# default sphere rules, keyed on dimension
ORACLE_GRID_N = {2: 8192, 3: 2048}
MC_SAMPLES = 1_000_000
MC_SEED = 0


def default_rule(n: int, rho: float = 0.0, seed: Optional[int] = None) -> SphereRule:
    """Grid for n = 2, 3 (clustered toward ``e1`` when ``rho`` is large), Monte Carlo otherwise."""
    if n in ORACLE_GRID_N and seed is None:
        grading = 1.0 if rho < 0.5 else 3.0
        return sphere_quadrature(n, ORACLE_GRID_N[n], mode="latlong_grid", grading=grading)
    return sphere_quadrature(n, MC_SAMPLES, seed=MC_SEED if seed is None else seed,
                             mode="monte_carlo")


def _sum_result(s1, s2, rule: SphereRule):
    if rule.mode == "monte_carlo":
        var = max(s2 - s1 * s1, 0.0)
        return s1, math.sqrt(var / len(rule))
    return s1, 0.0


def c_sphere_oracle(pp: ProblemPoint, samples: Optional[SphereRule] = None) -> ConstantValue:
    """``(1 - rho)`` times the sphere average of ``|<grad P(rho e1, zeta), ell_tau>|``.

    For Monte Carlo rules ``err_est`` is one standard error; grids report 0.
    Monte Carlo points are importance-sampled toward ``x`` (see
    :func:`_automorphism_sample`): plain uniform sampling has a heavy-tailed
    integrand near the boundary and its standard error is then unreliable.
    """
    if pp.rho >= 1.0:
        raise DomainError("the sphere oracle needs rho < 1")
    rule = default_rule(pp.n, pp.rho) if samples is None else samples
    if rule.n != pp.n:
        raise DomainError("sphere rule dimension does not match the problem")
    x, ell = pp.point(), pp.direction()
    if rule.mode == "monte_carlo" and pp.rho > 0.0:
        pts, q = _automorphism_sample(rule.points, x)
        s1, _ = _backend.oracle_abs_sum(pts, rule.weights / q, x, ell)
        _, s2 = _backend.oracle_abs_sum(pts, rule.weights / (q * q), x, ell)
    else:
        s1, s2 = _backend.oracle_abs_sum(rule.points, rule.weights, x, ell)
    mean, sem = _sum_result(s1, s2, rule)
    f = 1.0 - pp.rho
    return ConstantValue(f * mean, f * sem, Method.SPHERE_ORACLE, pp, rule.seed)


def _automorphism_sample(eta, x):
    """Push uniform sphere points through the involution ``phi_x`` of the ball.

    ``phi_x(eta) = x + (1 - |x|^2)(x - eta) / |eta - x|^2`` maps the sphere to
    itself; the image points have density ``q = ((1 - |x|^2) / |zeta - x|^2)^(n-1)``
    with respect to ``sigma``, which clusters them where the Poisson gradient peaks.
    """
    n = eta.shape[1]
    r2 = float(x @ x)
    diff = x[None, :] - eta
    d2 = np.einsum("ij,ij->i", diff, diff)
    zeta = x[None, :] + (1.0 - r2) * diff / d2[:, None]
    dz = zeta - x[None, :]
    q = ((1.0 - r2) / np.einsum("ij,ij->i", dz, dz)) ** (n - 1)
    return zeta, q


def c_moebius(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
              samples: Optional[SphereRule] = None) -> ConstantValue:
    """``n/(1+rho)`` times the sphere average of ``|<eta - alpha e1, ell>| |eta - x|^(2-n)``."""
    if pp.rho >= 1.0:
        raise DomainError("the Moebius sphere route needs rho < 1")
    rule = default_rule(pp.n, pp.rho) if samples is None else samples
    if rule.n != pp.n:
        raise DomainError("sphere rule dimension does not match the problem")
    s1, s2 = _backend.moebius_abs_sum(rule.points, rule.weights, pp.point(), pp.direction())
    mean, sem = _sum_result(s1, s2, rule)
    f = pp.n / (1.0 + pp.rho)
    return ConstantValue(f * mean, f * sem, Method.MOEBIUS_SPHERE, pp, rule.seed)


def _need_n3(pp: ProblemPoint):
    if pp.n < 3:
        raise DomainError("the double-integral and final routes need n >= 3")


def _inner_abs(f_signed, lo, hi, roots, cfg):
    """Integrate ``|f_signed|`` row-wise, splitting at the supplied roots."""
    bp = np.asarray(roots, dtype=float).reshape(lo.size, -1)
    vals, errs = integrate_batch(lambda x, i: np.abs(f_signed(x, i)), lo, hi, cfg, breakpoints=bp)
    return vals, errs


def _c_double1_raw(pp: ProblemPoint, tau: float, cfg: QuadratureConfig, signed=False):
    n, rho = pp.n, pp.rho
    st, ct = math.sin(tau), math.cos(tau)
    acc = {"err": 0.0}

    def outer(theta):
        m = theta.size
        A = (np.cos(theta) - pp.alpha) * ct
        B = np.sin(theta) * st

        def g(phi, i):
            return kernel_G_tilde(phi, theta[i], tau, pp) * np.sin(phi) ** (n - 3)

        if signed:
            inner, err = integrate_batch(g, np.zeros(m), np.full(m, math.pi), cfg)
        else:
            roots = bracketed_roots(lambda p: A + B * np.cos(p), np.zeros(m), np.full(m, math.pi))
            inner, err = _inner_abs(g, np.zeros(m), np.full(m, math.pi), roots, cfg)
        weight = kernel_R(theta, pp) * np.sin(theta) ** (n - 2)
        acc["err"] = max(acc["err"], float(np.max(err * weight)))
        return weight * inner

    # kinks of the inner integral sit where |A| = |B|, i.e. cos(theta +- tau) = alpha cos(tau)
    c0 = math.acos(pp.alpha * ct)
    pts = [c0 - tau, c0 + tau, 2 * math.pi - c0 - tau, tau - c0]
    if rho > 0.5:
        pts += [min(k * (1.0 - rho), 0.5) for k in (0.5, 2.0, 8.0)]
    pts = sorted(p for p in pts if 0.0 < p < math.pi)
    value, err = integrate(outer, 0.0, math.pi, cfg, points=pts)
    return value, err + math.pi * acc["err"]


def c_double1(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
              tau: Optional[float] = None) -> ConstantValue:
    """Iterated integral over ``(theta~, phi)``; ``tau`` may override ``pp.tau`` (any angle)."""
    _need_n3(pp)
    if pp.rho >= 1.0:
        raise DomainError("the first double-integral route needs rho < 1")
    t = pp.tau if tau is None else float(tau)
    raw, err = _c_double1_raw(pp, t, cfg)
    pref = 2.0 * area_ratio(pp.n) / (1.0 + pp.rho)
    return ConstantValue(pref * raw, pref * err, Method.DOUBLE1, pp)


def _c_double2_raw(pp: ProblemPoint, tau: float, cfg: QuadratureConfig, signed=False):
    n = pp.n
    st, ct = math.sin(tau), math.cos(tau)
    acc = {"err": 0.0}

    def outer(phi):
        m = phi.size

        def g(theta, i):
            return kernel_G(phi[i], theta, tau, pp) * kernel_S(theta, pp)

        hi = np.full(m, HALF_PI)
        if signed:
            inner, err = integrate_batch(g, np.zeros(m), hi, cfg, breakpoints=_s_breaks(pp, m))
        else:
            cp = np.cos(phi)
            roots = bracketed_roots(
                lambda th: (n * np.cos(th) ** 2 - pp.beta) * ct + n * np.sin(th) * np.cos(th) * cp * st,
                np.zeros(m), hi)
            bp = np.column_stack([roots, _s_breaks(pp, m)])
            inner, err = _inner_abs(g, np.zeros(m), hi, bp, cfg)
        weight = np.sin(phi) ** (n - 3)
        acc["err"] = max(acc["err"], float(np.max(err * weight)))
        return weight * inner

    value, err = integrate(outer, 0.0, math.pi, cfg, points=[HALF_PI])
    return value, err + math.pi * acc["err"]


def _s_breaks(pp: ProblemPoint, m: int):
    # S changes on the scale kappa just below theta = pi/2 when rho is near 1
    if 0.0 < pp.kappa < 0.2:
        pts = [HALF_PI - min(k * pp.kappa, 0.5) for k in (1.0, 8.0)]
    else:
        pts = [math.nan]
    return np.tile(np.asarray(pts), (m, 1))


def c_double2(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
              tau: Optional[float] = None) -> ConstantValue:
    """Iterated integral over ``(phi, theta)`` after halving the polar angle."""
    _need_n3(pp)
    t = pp.tau if tau is None else float(tau)
    raw, err = _c_double2_raw(pp, t, cfg)
    pref = 4.0 * area_ratio(pp.n) / (1.0 + pp.rho)
    return ConstantValue(pref * raw, pref * err, Method.DOUBLE2, pp)


def _radial_factor(n: int, rho: float) -> float:
    return 2.0 ** (n - 1) / (1.0 + rho) ** (n - 1)


def c_final(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ConstantValue:
    """One-dimensional representation; separate closed paths for radial and tangential ``ell``."""
    _need_n3(pp)
    n, rho = pp.n, pp.rho
    scale = _radial_factor(n, rho)
    e1, e2 = 0.5 * n + 1.0, 0.5 * n - 1.0
    k2 = pp.kappa ** 2

    if pp.tau == 0.0:
        b, w0 = pp.beta, pp.w_rho

        def radial(w):
            w2 = w * w
            return b * (w0 * w0 - w2) * w ** (n - 2) / ((1 + w2) ** e1 * (1 + k2 * w2) ** e2)

        val, err = integrate(radial, 0.0, w0, cfg)
        pref = 4.0 / math.sqrt(math.pi) * gamma_fn(0.5 * n) / gamma_fn(0.5 * (n - 1)) * scale
        return ConstantValue(pref * val, pref * err, Method.FINAL, pp)

    if pp.tangential:
        def tangential(w):
            w2 = w * w
            return w ** (n - 1) / ((1 + w2) ** e1 * (1 + k2 * w2) ** e2)

        val, err = integrate_halfline(tangential, cfg, full_output=True)
        pref = 2.0 * n / math.pi * scale
        return ConstantValue(pref * val, pref * err, Method.FINAL, pp)

    gam = pp.gamma
    inner_err = [0.0]

    def sym(t):
        z = gam * np.asarray(t)
        v, e = P_rho(np.concatenate([z, -z]), pp, cfg, full_output=True)
        inner_err[0] = max(inner_err[0], float(np.max(e)))
        return v[: z.size] + v[z.size:]

    val, err = integrate_t_weight(sym, n, cfg, full_output=True)
    pref = 4.0 * area_ratio(n) * scale / math.sqrt(1.0 + gam * gam)
    err += 2.0 * inner_err[0] * t_weight_moment0(n)
    return ConstantValue(pref * val, pref * err, Method.FINAL, pp)


def halfspace_radial(n: int) -> float:
    """Closed-form half-space constant in the normal direction."""
    return (4.0 / math.sqrt(math.pi) * (n - 1) ** (0.5 * (n - 1)) / n ** (0.5 * n)
            * gamma_fn(0.5 * n) / gamma_fn(0.5 * (n - 1)))


HALFSPACE_TANGENTIAL = 2.0 / math.pi


def c_halfspace(n: int, tau: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ConstantValue:
    """Half-space constant ``C(ell)`` (so that ``Cscript(x; ell) = C(ell) / x_n``)."""
    if n < 3:
        raise DomainError("c_halfspace needs n >= 3")
    pp = ProblemPoint(n, 1.0, tau)
    if pp.tangential:
        return ConstantValue(HALFSPACE_TANGENTIAL, 0.0, Method.HALFSPACE, pp)
    gam = pp.gamma

    def sym(t):
        z = gam * np.asarray(t)
        return P1_closed(z, n) + P1_closed(-z, n)

    val, err = integrate_t_weight(sym, n, cfg, full_output=True)
    pref = 4.0 * area_ratio(n) / math.sqrt(1.0 + gam * gam)
    out = ConstantValue(pref * val, pref * err, Method.HALFSPACE, pp)
    if tau == 0.0:
        closed = halfspace_radial(n)
        if abs(out.value - closed) > 1e-10 * closed:
            raise AccuracyError(f"half-space radial value {out.value} disagrees with {closed}",
                                value=out.value)
    return out


def c_zero(n: int) -> float:
    """Constant at the center of the ball, ``(2/sqrt(pi)) Gamma((n+2)/2) / Gamma((n+1)/2)``."""
    if n < 2:
        raise DomainError("c_zero needs n >= 2")
    return 2.0 / math.sqrt(math.pi) * gamma_fn(0.5 * (n + 2)) / gamma_fn(0.5 * (n + 1))


def global_bound(n: int) -> float:
    """Smallest constant valid at every point of the ball; equal to :func:`c_zero`."""
    return c_zero(n)


def evaluate(pp: ProblemPoint, method: Method | str = Method.FINAL,
             cfg: QuadratureConfig = DEFAULT_CONFIG,
             samples: Optional[SphereRule] = None) -> ConstantValue:
    """Dispatch on ``method``."""
    method = Method(method)
    if method is Method.SPHERE_ORACLE:
        return c_sphere_oracle(pp, samples)
    if method is Method.MOEBIUS_SPHERE:
        return c_moebius(pp, cfg, samples)
    if method is Method.DOUBLE1:
        return c_double1(pp, cfg)
    if method is Method.DOUBLE2:
        return c_double2(pp, cfg)
    if method is Method.FINAL:
        return c_final(pp, cfg)
    if method is Method.HALFSPACE:
        return c_halfspace(pp.n, pp.tau, cfg)
    raise DomainError(f"unsupported method {method}")


# --- the vanishing signed integral --------------------------------------------

def zero_integral_check(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        tau: Optional[float] = None) -> float:
    """Signed version of the second double integral; it vanishes for every angle."""
    _need_n3(pp)
    t = pp.tau if tau is None else float(tau)
    return _c_double2_raw(pp, t, cfg, signed=True)[0]


def zero_integral_abs(pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
                      tau: Optional[float] = None) -> float:
    """Same double integral with ``|G|``; the scale for :func:`zero_integral_check`."""
    _need_n3(pp)
    t = pp.tau if tau is None else float(tau)
    return _c_double2_raw(pp, t, cfg)[0]


def zero_integral_parts(n: int, rho: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> dict:
    """The two halves ``J1 = n int cos^2 S`` and ``J2 = beta int S`` three ways.

    ``*_quad`` are direct quadratures, ``*_euler`` the 2F1 forms obtained
    from the Euler integral, ``*_closed`` the final Gamma expressions.
    """
    pp = ProblemPoint(n, rho)
    cfg_fine = cfg.tightened(10.0)
    s_int, _ = integrate(lambda th: kernel_S(th, pp), 0.0, HALF_PI, cfg_fine)
    c_int, _ = integrate(lambda th: np.cos(th) ** 2 * kernel_S(th, pp), 0.0, HALF_PI, cfg_fine)
    rt = 4.0 * rho / (1.0 + rho) ** 2
    g = math.lgamma
    j1_euler = (2.0 ** (n - 3) * n / (1.0 + rho) ** (n - 2)
                * math.exp(g(0.5 * (n - 1)) + g(0.5 * (n + 1)) - g(n))
                * hyp2f1(HypParams(0.5 * n - 1.0, 0.5 * (n - 1), n, rt)))
    j2_euler = (2.0 ** (n - 3) * pp.beta / (1.0 + rho) ** (n - 2)
                * math.exp(2 * g(0.5 * (n - 1)) - g(n - 1))
                * hyp2f1(HypParams(0.5 * n - 1.0, 0.5 * (n - 1), n - 1, rt)))
    closed = 2.0 ** (n - 3) * math.exp(2 * g(0.5 * (n - 1)) - g(n - 1)) * pp.beta
    return {
        "J1_quad": n * c_int,
        "J2_quad": pp.beta * s_int,
        "J1_euler": j1_euler,
        "J2_euler": j2_euler,
        "J1_closed": closed,
        "J2_closed": closed,
    }


# --- extremal boundary data -----------------------------------------------------

def poisson_extension_of_sign(y, pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG,
                              samples: Optional[SphereRule] = None) -> float:
    """``U(y)`` for the boundary data ``sign <grad P(x, zeta), ell>`` at the canonical pair.

    Deterministic adaptive quadrature for n = 2, 3 unless ``samples`` is given.
    """
    y = np.asarray(y, dtype=float)
    x, ell = pp.point(), pp.direction()
    if samples is not None:
        return float(_backend.poisson_sign_sum(samples.points, samples.weights, y, x, ell))
    n = pp.n
    xl = float(x @ ell)
    ry = 1.0 - float(y @ y)
    fac = n * (1.0 - pp.rho ** 2)

    if n == 2:
        def sgn(a):
            zeta = np.column_stack([np.cos(a), np.sin(a)])
            d = x[None, :] - zeta
            return -2.0 * xl * np.einsum("ij,ij->i", d, d) - fac * (d @ ell)

        grid = np.linspace(0.0, 2 * math.pi, 257)
        vals = sgn(grid)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        roots = bracketed_roots(sgn, grid[idx], grid[idx + 1]) if idx.size else []

        def integrand(a):
            zeta = np.column_stack([np.cos(a), np.sin(a)])
            d = y[None, :] - zeta
            return ry / np.einsum("ij,ij->i", d, d) * np.sign(sgn(a)) / (2 * math.pi)

        return integrate(integrand, 0.0, 2 * math.pi, cfg, points=list(roots))[0]

    if n == 3:
        # zeta = (cos th, sin th cos ph, sin th sin ph); the sign field is affine in cos ph
        def outer(th):
            m = th.size
            c_th, s_th = np.cos(th), np.sin(th)
            d2x = 1.0 + pp.rho ** 2 - 2.0 * pp.rho * c_th
            a0 = -2.0 * xl * d2x - fac * (pp.rho - c_th) * ell[0]
            a1 = fac * s_th * ell[1]

            def f(ph, i):
                zeta = np.column_stack([c_th[i], s_th[i] * np.cos(ph), s_th[i] * np.sin(ph)])
                d = y[None, :] - zeta
                pk = ry / np.einsum("ij,ij->i", d, d) ** 1.5
                return pk * np.sign(a0[i] + a1[i] * np.cos(ph))

            roots = bracketed_roots(lambda ph: a0 + a1 * np.cos(ph), np.zeros(m), np.full(m, math.pi))
            roots2 = 2 * math.pi - roots
            bp = np.column_stack([roots, np.full(m, math.pi), roots2])
            v, _ = integrate_batch(f, np.zeros(m), np.full(m, 2 * math.pi), cfg, breakpoints=bp)
            return v * s_th / (4 * math.pi)

        # discontinuities in theta where the sign field vanishes identically in ph
        return integrate(outer, 0.0, math.pi, cfg, points=[HALF_PI])[0]

    raise DomainError("deterministic Poisson extension is implemented for n = 2, 3; pass samples")


def extremal_derivative(pp: ProblemPoint, h: float, samples: Optional[SphereRule] = None,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Central difference of ``U = P[sign <grad P(x, .), ell>]`` along ``ell``.

    Tends to ``Cscript(x; ell)`` as ``h -> 0``: the sign data is the extremal
    boundary function for the directional derivative at ``x``.
    """
    if not (h > 0 and pp.rho + h < 1.0):
        raise DomainError("need h > 0 and rho + h < 1")
    x, ell = pp.point(), pp.direction()
    up = poisson_extension_of_sign(x + 0.5 * h * ell, pp, cfg, samples)
    down = poisson_extension_of_sign(x - 0.5 * h * ell, pp, cfg, samples)
    return (up - down) / h
