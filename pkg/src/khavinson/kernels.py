"""Scalar kernels and the canonical problem parametrization.

A ball point ``x`` and a direction ``ell`` reduce, by rotation invariance,
to ``x = rho e1`` and ``ell = cos(tau) e1 + sin(tau) e2`` with
``rho = |x|`` and ``tau`` the angle between the lines spanned by ``x`` and
``ell``.  Everything below is written for that canonical pair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DomainError, SingularityError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

HALF_PI = 0.5 * math.pi
UNIT_TOL = 1e-10


class Tangential(enum.Enum):
    """Marker for ``gamma = tan(tau)`` at ``tau = pi/2``."""

    INFINITY = "inf"

    def __repr__(self):
        return "GAMMA_INF"


GAMMA_INF = Tangential.INFINITY


@dataclass(frozen=True)
class ProblemPoint:
    """Canonical ``(n, rho, tau)`` with the derived parameters used throughout.

    ``alpha = (n-2) rho / n``, ``beta = (n - (n-2) rho) / 2``,
    ``kappa = (1-rho)/(1+rho)`` and ``w_rho = sqrt((n + (n-2) rho) / (n - (n-2) rho))``.
    """

    n: int
    rho: float
    tau: float = 0.0
    alpha: float = field(init=False, repr=False)
    beta: float = field(init=False, repr=False)
    kappa: float = field(init=False, repr=False)
    w_rho: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 <= self.tau <= HALF_PI:
            raise DomainError(f"tau must lie in [0, pi/2], got {self.tau}")
        n, rho = int(self.n), float(self.rho)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "alpha", (n - 2) * rho / n)
        object.__setattr__(self, "beta", 0.5 * (n - (n - 2) * rho))
        object.__setattr__(self, "kappa", (1.0 - rho) / (1.0 + rho))
        object.__setattr__(self, "w_rho", math.sqrt((n + (n - 2) * rho) / (n - (n - 2) * rho)))

    @property
    def tangential(self) -> bool:
        return self.tau == HALF_PI

    @property
    def gamma(self):
        """``tan(tau)``, or :data:`GAMMA_INF` for the tangential direction."""
        return GAMMA_INF if self.tangential else math.tan(self.tau)

    def with_tau(self, tau: float) -> "ProblemPoint":
        return ProblemPoint(self.n, self.rho, tau)

    def point(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[0] = self.rho
        return x

    def direction(self, tau: float | None = None) -> np.ndarray:
        t = self.tau if tau is None else tau
        ell = np.zeros(self.n)
        ell[0] = math.cos(t)
        ell[1] = math.sin(t)
        return ell


def _need_final_dim(n: int):
    if n < 3:
        raise DomainError("this kernel is defined for n >= 3")


def canonicalize(x, ell) -> ProblemPoint:
    """Reduce a ball point and a unit direction to ``ProblemPoint(n, |x|, tau)``."""
    x = np.asarray(x, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if x.ndim != 1 or x.shape != ell.shape:
        raise DomainError("x and ell must be vectors of the same length")
    r = float(np.linalg.norm(x))
    if r >= 1.0:
        raise DomainError(f"|x| must be < 1, got {r}")
    if abs(np.linalg.norm(ell) - 1.0) > UNIT_TOL:
        raise DomainError("ell must be a unit vector")
    if r == 0.0:
        return ProblemPoint(x.size, 0.0, 0.0)
    c = abs(float(np.dot(x / r, ell)))
    if c <= 0.0:
        tau = HALF_PI
    else:
        tau = math.acos(min(1.0, c))
    return ProblemPoint(x.size, r, tau)


def poisson_kernel(y, zeta, n: int | None = None):
    """``P(y, zeta) = (1 - |y|^2) / |y - zeta|^n``; rows of ``zeta`` are broadcast."""
    y = np.asarray(y, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    n = y.shape[-1] if n is None else n
    d2 = np.sum((y - zeta) ** 2, axis=-1)
    return (1.0 - np.sum(y * y, axis=-1)) / d2 ** (0.5 * n)


def grad_poisson(x, zeta, n: int | None = None):
    """Gradient of the Poisson kernel in its first argument."""
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    n = x.shape[-1] if n is None else n
    diff = x - zeta
    d2 = np.sum(diff * diff, axis=-1)[..., None]
    r2 = np.sum(x * x, axis=-1)[..., None]
    return (-2.0 * x * d2 - n * (1.0 - r2) * diff) / d2 ** (0.5 * n + 1.0)


def moebius_sphere_map(x, eta):
    """``T_x(eta) = (1 - |x|^2)(eta - x)/|eta - x|^2 - x`` restricted to the sphere."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    diff = eta - x
    d2 = np.sum(diff * diff, axis=-1)[..., None]
    return (1.0 - np.dot(x, x)) * diff / d2 - x


# --- double-integral kernels -------------------------------------------------

def kernel_G_tilde(phi, theta_t, tau, pp: ProblemPoint):
    _need_final_dim(pp.n)
    return 0.5 * pp.n * ((np.cos(theta_t) - pp.alpha) * math.cos(tau)
                         + np.sin(theta_t) * np.cos(phi) * math.sin(tau))


def kernel_R(theta_t, pp: ProblemPoint):
    _need_final_dim(pp.n)
    base = 1.0 + pp.rho ** 2 - 2.0 * pp.rho * np.cos(theta_t)
    if np.any(base <= 0.0):
        raise SingularityError("R is singular at rho = 1, theta = 0")
    return base ** (1.0 - 0.5 * pp.n)


def kernel_G(phi, theta, tau, pp: ProblemPoint):
    _need_final_dim(pp.n)
    n = pp.n
    c = np.cos(theta)
    return ((n * c * c - pp.beta) * math.cos(tau)
            + n * np.sin(theta) * c * np.cos(phi) * math.sin(tau))


def kernel_S(theta, pp: ProblemPoint):
    """``sin^(n-2)(2 theta) / ((1+rho)^2 - 4 rho sin^2 theta)^(n/2-1)`` in factored form.

    Written as ``(2/(1+rho))^(n-2) sin^(n-2) theta (1 + kappa^2 tan^2 theta)^(1-n/2)``,
    which stays finite at ``theta = pi/2`` when ``rho = 1``.
    """
    _need_final_dim(pp.n)
    n = pp.n
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    k = pp.kappa
    if k == 0.0:
        corr = 1.0
    else:
        c = np.cos(theta)
        # (1 + k^2 tan^2)^(1-n/2) == (c^2 / (c^2 + k^2 s^2))^(n/2-1)
        corr = (c * c / (c * c + k * k * s * s)) ** (0.5 * n - 1.0)
    return (2.0 / (1.0 + pp.rho)) ** (n - 2) * s ** (n - 2) * corr


# --- final-representation kernels --------------------------------------------

def kernel_Z(z, pp: ProblemPoint):
    """Positive root in ``w`` of ``Q(w) = n - beta + n z w - beta w^2``."""
    _need_final_dim(pp.n)
    z = np.asarray(z, dtype=float)
    a = pp.alpha
    disc = np.sqrt(z * z + 1.0 - a * a)
    # for z < 0 use the conjugate form to avoid cancellation
    return np.where(z >= 0, (z + disc) / (1.0 - a), (1.0 + a) / np.where(z >= 0, 1.0, disc - z))


def kernel_Q(w, z, pp: ProblemPoint):
    _need_final_dim(pp.n)
    return pp.n - pp.beta + pp.n * z * w - pp.beta * w * w


def kernel_W(w, pp: ProblemPoint):
    _need_final_dim(pp.n)
    n = pp.n
    w = np.asarray(w, dtype=float)
    w2 = w * w
    return w ** (n - 2) / ((1.0 + w2) ** (0.5 * n + 1.0)
                           * (1.0 + pp.kappa ** 2 * w2) ** (0.5 * n - 1.0))


def P_rho(z, pp: ProblemPoint, cfg: QuadratureConfig = DEFAULT_CONFIG, full_output=False):
    """Integral of ``Q(w) W(w)`` over ``[0, Z(z)]``, vectorized in ``z``."""
    _need_final_dim(pp.n)
    z = np.asarray(z, dtype=float)
    vals, errs = _backend.p_rho_many(z.ravel(), pp.n, pp.rho, cfg.rel_tol, cfg.abs_tol,
                                     cfg.max_depth)
    vals = vals.reshape(z.shape)
    errs = errs.reshape(z.shape)
    if z.ndim == 0:
        vals, errs = float(vals), float(errs)
    return (vals, errs) if full_output else vals


def P1_closed(z, n: int):
    """Integral-free value of ``P_rho`` at ``rho = 1``: ``Z^(n-1) / (n (1+Z^2)^(n/2-1))``."""
    _need_final_dim(n)
    Z = kernel_Z(z, ProblemPoint(n, 1.0))
    out = Z ** (n - 1) / (n * (1.0 + Z * Z) ** (0.5 * n - 1.0))
    return float(out) if np.ndim(out) == 0 else out


def P_script(y, n: int):
    """``(y + sqrt(y^2+1))^(n-1) / (1 + (n-1)(y + sqrt(y^2+1))^2)^(n/2-1)``."""
    _need_final_dim(n)
    y = np.asarray(y, dtype=float)
    r = np.sqrt(y * y + 1.0)
    s = np.where(y >= 0, y + r, 1.0 / np.where(y >= 0, 1.0, r - y))
    out = s ** (n - 1) / (1.0 + (n - 1) * s * s) ** (0.5 * n - 1.0)
    return float(out) if out.ndim == 0 else out


def p1_scaling_constant(n: int) -> float:
    """Factor ``c`` with ``P1_closed(z) = c * P_script(n z / (2 sqrt(n-1)))``.

    Equals ``(n-1)^((n-1)/2) / n``.
    """
    return (n - 1) ** (0.5 * (n - 1)) / n


def majorant_A(z, a: float, b: float):
    if not (a > 0 and b > 0):
        raise DomainError("majorant_A needs a, b > 0")
    z = np.asarray(z, dtype=float)
    out = np.sqrt(a * z * z + b)
    return float(out) if out.ndim == 0 else out
