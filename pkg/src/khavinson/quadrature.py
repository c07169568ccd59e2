"""Adaptive 1-D quadrature with endpoint substitutions, plus sphere rules.

All integrands are vectorized: they receive a 1-D float array of abscissae
and must return an array of the same shape.  The adaptive driver refines
every unfinished panel of every integral in one integrand call per sweep,
which keeps the Python overhead independent of the number of panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadratureConfig",
    "SphereSample",
    "SphereRule",
    "integrate",
    "integrate_batch",
    "integrate_t_weight",
    "integrate_halfline",
    "bracketed_roots",
    "sphere_quadrature",
]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 40
    panel_order: int = 15

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")
        if self.panel_order < 2:
            raise DomainError("panel_order must be >= 2")

    def tightened(self, factor: float = 10.0) -> "QuadratureConfig":
        """Copy with both tolerances divided by ``factor``."""
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


DEFAULT_CONFIG = QuadratureConfig()

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG7 = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])


@lru_cache(maxsize=None)
def panel_rule(order: int):
    """Nodes on [-1, 1] with a high-order and an embedded low-order weight set.

    ``order == 15`` gives the Gauss-Kronrod 7/15 pair.  Other orders pair an
    ``order``-point Gauss-Legendre rule with one of ``order // 2 + 1`` points
    (not embedded, so the node set is their union).
    """
    if order == 15:
        nodes = np.concatenate([-_XGK[:-1], _XGK[::-1]])
        w_hi = np.concatenate([_WGK[:-1], _WGK[::-1]])
        w_lo = np.zeros(15)
        gauss = np.concatenate([_WG7[:-1], _WG7[::-1]])
        w_lo[1::2] = gauss
        return nodes, w_hi, w_lo
    x_hi, w_hi = np.polynomial.legendre.leggauss(order)
    x_lo, w_lo = np.polynomial.legendre.leggauss(order // 2 + 1)
    nodes = np.concatenate([x_hi, x_lo])
    return (nodes,
            np.concatenate([w_hi, np.zeros_like(w_lo)]),
            np.concatenate([np.zeros_like(w_hi), w_lo]))


def integrate_batch(f, a, b, cfg: QuadratureConfig = DEFAULT_CONFIG, breakpoints=None,
                    raise_on_failure=True):
    """Adaptively integrate ``m`` independent integrals at once.

    ``f(x, idx)`` receives abscissae ``x`` and the index ``idx`` of the integral
    each abscissa belongs to, so parameters can be gathered with ``p[idx]``.
    ``breakpoints`` is an optional ``(m, k)`` array of interior points (NaN
    entries are ignored) used to seed the initial panels.

    Returns ``(values, err_est)`` as arrays of length ``m``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    m = a.size
    if np.any(~np.isfinite(a)) or np.any(~np.isfinite(b)):
        raise DomainError("integration limits must be finite")
    sign = np.where(b < a, -1.0, 1.0)
    lo0, hi0 = np.minimum(a, b), np.maximum(a, b)

    if breakpoints is None:
        lo, hi, own = lo0.copy(), hi0.copy(), np.arange(m)
    else:
        bp = np.asarray(breakpoints, dtype=float).reshape(m, -1)
        bp = np.where((bp > lo0[:, None]) & (bp < hi0[:, None]), bp, np.nan)
        bp = np.sort(bp, axis=1)
        bp = np.where(np.isnan(bp), hi0[:, None], bp)
        edges = np.column_stack([lo0, bp, hi0])
        lo = edges[:, :-1].ravel()
        hi = edges[:, 1:].ravel()
        own = np.repeat(np.arange(m), edges.shape[1] - 1)
    keep = hi > lo
    lo, hi, own = lo[keep], hi[keep], own[keep]

    nodes, w_hi, w_lo = panel_rule(cfg.panel_order)
    length = np.maximum(hi0 - lo0, np.finfo(float).tiny)
    value = np.zeros(m)
    error = np.zeros(m)
    failed = np.zeros(m, dtype=bool)
    # running estimate of each integral, refreshed every sweep
    total = np.zeros(m)
    depth = 0
    while lo.size:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[:, None] + half[:, None] * nodes[None, :]
        fx = np.asarray(f(x.ravel(), np.repeat(own, nodes.size)), dtype=float)
        fx = fx.reshape(x.shape)
        if not np.all(np.isfinite(fx)):
            bad = own[~np.all(np.isfinite(fx), axis=1)][0]
            raise AccuracyError(f"non-finite integrand value in integral {bad}")
        k_est = half * (fx @ w_hi)
        g_est = half * (fx @ w_lo)
        err = np.abs(k_est - g_est)

        total = value + np.bincount(own, weights=k_est, minlength=m)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        share = tol[own] * (hi - lo) / length[own]
        done = err <= share
        # global test: finish an integral once its summed estimate is small
        # enough, which is what terminates weakly singular endpoints
        err_all = error + np.bincount(own, weights=err, minlength=m)
        done |= (err_all <= tol)[own]
        if depth >= cfg.max_depth:
            failed[own[~done]] = True
            done[:] = True
        value += np.bincount(own[done], weights=k_est[done], minlength=m)
        error += np.bincount(own[done], weights=err[done], minlength=m)
        lo, hi, own, mid = lo[~done], hi[~done], own[~done], mid[~done]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        own = np.concatenate([own, own])
        order = np.lexsort((lo, own))
        lo, hi, own = lo[order], hi[order], own[order]
        depth += 1

    value *= sign
    if raise_on_failure and failed.any():
        raise AccuracyError(
            f"max_depth={cfg.max_depth} exceeded for {int(failed.sum())} integral(s)",
            value=value if m > 1 else float(value[0]),
            err_est=error if m > 1 else float(error[0]),
        )
    return value, error


def integrate(f: Callable, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
              points: Optional[Sequence[float]] = None):
    """Integrate a vectorized ``f`` over ``[a, b]``.

    Returns ``(value, err_est)``.  ``points`` are optional interior
    breakpoints (kinks, discontinuities) where panels should start.

    >>> integrate(lambda t: t * t, 0.0, 1.0)[0]
    0.33333333333333337
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    bp = None if points is None else np.asarray([list(points)], dtype=float)
    try:
        v, e = integrate_batch(lambda x, _i: f(x), [a], [b], cfg, breakpoints=bp)
    except AccuracyError as exc:
        raise AccuracyError(str(exc), exc.value, exc.err_est) from None
    return float(v[0]), float(e[0])


def integrate_t_weight(g: Callable, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
                       full_output: bool = False):
    """Return the integral of ``g(t) (1 - t^2)^((n-4)/2)`` over ``[0, 1]``.

    Computed as the integral of ``g(sin u) cos^(n-3) u`` over ``[0, pi/2]``,
    which is regular at ``t = 1`` for every ``n >= 3``.
    """
    if n < 3:
        raise DomainError("integrate_t_weight needs n >= 3")
    p = n - 3

    def h(u):
        c = np.cos(u)
        return g(np.sin(u)) * (c ** p if p else 1.0)

    value, err = integrate(h, 0.0, 0.5 * math.pi, cfg)
    return (value, err) if full_output else value


def integrate_halfline(f: Callable, cfg: QuadratureConfig = DEFAULT_CONFIG,
                       full_output: bool = False):
    """Return the integral of ``f`` over ``[0, inf)`` via ``w = tan u``."""

    def h(u):
        c = np.cos(u)
        return f(np.tan(u)) / (c * c)

    value, err = integrate(h, 0.0, 0.5 * math.pi, cfg)
    return (value, err) if full_output else value


def bracketed_roots(f: Callable, lo, hi, xtol: float = 1e-15, maxiter: int = 200):
    """Vectorized Illinois (regula falsi) root finder.

    ``f`` is evaluated on whole arrays.  Entries without a sign change in
    ``[lo, hi]`` come back as NaN.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    flo = np.asarray(f(lo), dtype=float).copy()
    fhi = np.asarray(f(hi), dtype=float).copy()
    root = np.full(lo.shape, np.nan)
    root[flo == 0] = lo[flo == 0]
    root[(fhi == 0) & np.isnan(root)] = hi[(fhi == 0) & np.isnan(root)]
    active = (np.sign(flo) * np.sign(fhi) < 0) & np.isnan(root)
    side = np.zeros(lo.shape, dtype=int)
    for _ in range(maxiter):
        if not active.any():
            break
        x = np.where(active, (lo * fhi - hi * flo) / np.where(active, fhi - flo, 1.0), lo)
        # guard against a stalled secant step
        x = np.where(active & ~((x > np.minimum(lo, hi)) & (x < np.maximum(lo, hi))),
                     0.5 * (lo + hi), x)
        fx = np.asarray(f(x), dtype=float)
        left = active & (np.sign(fx) == np.sign(flo))
        right = active & ~left
        hi_new = np.where(right, x, hi)
        lo_new = np.where(left, x, lo)
        flo_new = np.where(left, fx, np.where(right & (side == 1), flo * 0.5, flo))
        fhi_new = np.where(right, fx, np.where(left & (side == -1), fhi * 0.5, fhi))
        side = np.where(left, -1, np.where(right, 1, side))
        lo, hi, flo, fhi = lo_new, hi_new, flo_new, fhi_new
        conv = active & ((np.abs(hi - lo) <= xtol * (1 + np.abs(x))) | (fx == 0))
        root[conv] = x[conv]
        active &= ~conv
    root[active] = 0.5 * (lo[active] + hi[active])
    return root


@dataclass(frozen=True)
class SphereSample:
    point: np.ndarray
    weight: float


@dataclass(frozen=True)
class SphereRule:
    """Struct-of-arrays sphere rule: ``points`` is ``(N, n)``, ``weights`` is ``(N,)``.

    Iterating yields :class:`SphereSample` objects, but evaluators use the
    arrays directly.
    """

    points: np.ndarray
    weights: np.ndarray
    mode: str
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.weights.size

    def __iter__(self) -> Iterator[SphereSample]:
        for p, w in zip(self.points, self.weights):
            yield SphereSample(p, float(w))


def _graded_gauss(n_nodes: int, grading: float, order: int = 16):
    """Composite Gauss nodes on s in [0, 1] mapped by theta = pi * s**grading.

    A panel edge is placed where theta = pi/2.  Returns ``(theta, dtheta_weights)``.
    """
    panels = max(2, n_nodes // order)
    s_half = 0.5 ** (1.0 / grading)
    n_left = max(1, int(round(panels * s_half)))
    edges = np.concatenate([np.linspace(0.0, s_half, n_left + 1),
                            np.linspace(s_half, 1.0, panels - n_left + 1)[1:]])
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    theta = math.pi * s ** grading
    dtheta = math.pi * grading * s ** (grading - 1.0) * ws
    return theta, dtheta


def sphere_quadrature(n: int, N: int, seed: Optional[int] = None, mode: str = "monte_carlo",
                      grading: float = 1.0) -> SphereRule:
    """Build a normalized quadrature rule on the unit sphere of R^n.

    ``monte_carlo`` draws ``N`` uniform points (normalized Gaussians, Philox
    stream seeded by ``seed``), each with weight ``1/N``.

    ``latlong_grid`` (n = 2 or 3) is a product rule with the pole at ``e1``.
    For n = 2 it is the ``N``-point midpoint rule in the angle.  For n = 3 it
    uses about ``N`` composite Gauss nodes in the polar angle (clustered
    toward ``e1`` when ``grading > 1``) times ``N`` midpoint nodes in the
    azimuth.
    """
    if N < 1:
        raise DomainError("N must be positive")
    if mode == "monte_carlo":
        if n < 2:
            raise DomainError("monte_carlo sphere rule needs n >= 2")
        if seed is None:
            raise DomainError("monte_carlo sphere rule needs an explicit seed")
        rng = np.random.Generator(np.random.Philox(seed))
        pts = rng.standard_normal((N, n))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        return SphereRule(pts, np.full(N, 1.0 / N), mode, seed)
    if mode != "latlong_grid":
        raise DomainError(f"unknown sphere rule mode {mode!r}")
    if n == 2:
        ang = (np.arange(N) + 0.5) * (2 * math.pi / N)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        return SphereRule(pts, np.full(N, 1.0 / N), mode)
    if n == 3:
        theta, dtheta = _graded_gauss(N, grading)
        phi = (np.arange(N) + 0.5) * (2 * math.pi / N)
        st = np.sin(theta)
        pts = np.empty((theta.size, N, 3))
        pts[:, :, 0] = np.cos(theta)[:, None]
        pts[:, :, 1] = st[:, None] * np.cos(phi)[None, :]
        pts[:, :, 2] = st[:, None] * np.sin(phi)[None, :]
        w = (st * dtheta)[:, None] * np.full(N, 1.0 / (2.0 * N))[None, :]
        return SphereRule(pts.reshape(-1, 3), w.ravel(), mode)
    raise DomainError(f"latlong_grid is only available for n in (2, 3), got n={n}")
