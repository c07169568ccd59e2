"""The Gauss hypergeometric function with its Gamma helpers, and sphere areas."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AccuracyError, DomainError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

SERIES_REL_TOL = 1e-14
SERIES_MAX_TERMS = 10_000


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_fn is defined here for x > 0, got {x}")
    return math.gamma(x)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``a (a+1) ... (a+k-1)``; ``(a)_0 = 1``."""
    if k < 0 or int(k) != k:
        raise DomainError("k must be a non-negative integer")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
    return out


def _nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


@dataclass(frozen=True)
class HypParams:
    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if _nonpositive_int(self.c):
            raise DomainError(f"c must not be a non-positive integer, got {self.c}")
        if not -1.0 < self.z < 1.0:
            raise DomainError(f"need |z| < 1, got {self.z}")


def _series(p: HypParams) -> float:
    a, b, c, z = p.a, p.b, p.c, p.z
    term = 1.0
    total = 1.0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) < SERIES_REL_TOL * abs(total):
            # ratio test: the remaining tail is geometric once k is past a, b, c
            ratio = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * z)
            if ratio < 1.0:
                return total
    raise AccuracyError(f"2F1 series did not converge in {SERIES_MAX_TERMS} terms", value=total)


def _euler(p: HypParams, cfg: QuadratureConfig) -> float:
    a, b, c, z = p.a, p.b, p.c, p.z
    if not c > b > 0:
        raise DomainError("the Euler integral needs c > b > 0")
    d = c - b
    scale = math.exp(math.lgamma(c) - math.lgamma(b) - math.lgamma(d))

    # Split at 1/2; each half gets s = t**b (resp. s = (1-t)**d) when the
    # corresponding exponent is below one, which removes the endpoint singularity.
    def left(s):
        if b < 1.0:
            t = s ** (1.0 / b)
            return (1.0 - t) ** (d - 1.0) * (1.0 - z * t) ** (-a) / b
        return s ** (b - 1.0) * (1.0 - s) ** (d - 1.0) * (1.0 - z * s) ** (-a)

    def right(s):
        if d < 1.0:
            u = s ** (1.0 / d)
            t = 1.0 - u
            return t ** (b - 1.0) * (1.0 - z * t) ** (-a) / d
        t = 1.0 - s
        return t ** (b - 1.0) * s ** (d - 1.0) * (1.0 - z * t) ** (-a)

    left_hi = 0.5 ** b if b < 1.0 else 0.5
    right_hi = 0.5 ** d if d < 1.0 else 0.5
    v1, _ = integrate(left, 0.0, left_hi, cfg)
    v2, _ = integrate(right, 0.0, right_hi, cfg)
    return scale * (v1 + v2)


_EULER_CFG = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15)


def hyp2f1(p: HypParams, method: str = "series", cfg: QuadratureConfig = _EULER_CFG) -> float:
    """Gauss hypergeometric function on the real interval (-1, 1).

    ``method="series"`` sums the power series (it terminates exactly when
    ``a`` or ``b`` is a non-positive integer).  ``method="euler_integral"``
    integrates ``t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a)`` and needs ``c > b > 0``.
    """
    if method == "series":
        return _series(p)
    if method == "euler_integral":
        return _euler(p, cfg)
    raise DomainError(f"unknown 2F1 method {method!r}")


def hyp2f1_terminating(a: float, m: int, c: float, z: float) -> float:
    """Explicit polynomial for ``2F1(a, -m; c; z)`` via the binomial form."""
    return sum((-1) ** k * math.comb(m, k) * pochhammer(a, k) / pochhammer(c, k) * z ** k
               for k in range(m + 1))


def hyp2f1_quadratic_lhs_rhs(a: float, b: float, z: float):
    """Both sides of the quadratic transformation

    ``2F1(a/2, (a+1)/2; a-b+1; z)`` and
    ``((1+sqrt(1-z))/2)^(-a) 2F1(a, b; a-b+1; (1-sqrt(1-z))/(1+sqrt(1-z)))``.
    """
    if not 0.0 <= z < 1.0:
        raise DomainError(f"quadratic transform evaluated on [0, 1), got z={z}")
    c = a - b + 1.0
    if _nonpositive_int(c):
        raise DomainError("a - b + 1 must not be a non-positive integer")
    r = math.sqrt(1.0 - z)
    lhs = hyp2f1(HypParams(0.5 * a, 0.5 * (a + 1.0), c, z))
    rhs = (0.5 * (1.0 + r)) ** (-a) * hyp2f1(HypParams(a, b, c, (1.0 - r) / (1.0 + r)))
    return lhs, rhs


def surface_area(n: int) -> float:
    """Area of the unit sphere in R^n, with the convention ``omega_1 = 2``."""
    if n < 1 or int(n) != n:
        raise DomainError(f"surface_area needs an integer n >= 1, got {n}")
    if n == 1:
        return 2.0
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def area_ratio(n: int) -> float:
    """``omega_{n-2} / omega_n`` for ``n >= 3``."""
    return surface_area(n - 2) / surface_area(n)


def t_weight_moment0(n: int) -> float:
    """Closed form of the integral of ``(1-t^2)^((n-4)/2)`` over ``[0, 1]``."""
    return 0.5 * math.sqrt(math.pi) * math.exp(math.lgamma(0.5 * (n - 2)) - math.lgamma(0.5 * (n - 1)))


def t_weight_moment2(n: int) -> float:
    """Closed form of the integral of ``t^2 (1-t^2)^((n-4)/2)`` over ``[0, 1]``."""
    return t_weight_moment0(n) / (n - 1)

