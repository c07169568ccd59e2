"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled module is unavailable or ``KHAV_PURE_PYTHON=1`` is set.
"""

import numpy as np

from .quadrature import QuadratureConfig, integrate_batch

CHUNK = 1 << 17


def p_rho_many(z, n, rho, rel_tol, abs_tol, max_depth):
    z = np.ascontiguousarray(z, dtype=float).ravel()
    if z.size == 0:
        return np.zeros(0), np.zeros(0)
    alpha = (n - 2) * rho / n
    beta = 0.5 * (n - (n - 2) * rho)
    k2 = ((1.0 - rho) / (1.0 + rho)) ** 2
    disc = np.sqrt(z * z + 1.0 - alpha * alpha)
    upper = np.where(z >= 0, (z + disc) / (1.0 - alpha),
                     (1.0 + alpha) / np.where(z >= 0, 1.0, disc - z))
    e1 = 0.5 * n + 1.0
    e2 = 0.5 * n - 1.0

    def f(w, idx):
        w2 = w * w
        q = n - beta + n * z[idx] * w - beta * w2
        return q * w ** (n - 2) / ((1.0 + w2) ** e1 * (1.0 + k2 * w2) ** e2)

    cfg = QuadratureConfig(rel_tol=rel_tol, abs_tol=abs_tol, max_depth=max_depth)
    return integrate_batch(f, np.zeros_like(upper), upper, cfg)


def _chunks(N):
    for start in range(0, N, CHUNK):
        yield slice(start, min(N, start + CHUNK))


def _grad_dot(pts, x, ell, n):
    diff = x[None, :] - pts
    d2 = np.einsum("ij,ij->i", diff, diff)
    xl = float(np.dot(x, ell))
    r2 = float(np.dot(x, x))
    return (-2.0 * xl * d2 - n * (1.0 - r2) * (diff @ ell)) / d2 ** (0.5 * n + 1.0)


def oracle_abs_sum(points, weights, x, ell):
    """Weighted sums of ``|g|`` and ``g^2`` for ``g = <grad P(x, zeta), ell>``."""
    n = points.shape[1]
    s1 = 0.0
    s2 = 0.0
    for sl in _chunks(points.shape[0]):
        g = _grad_dot(points[sl], x, ell, n)
        w = weights[sl]
        s1 += float(np.dot(w, np.abs(g)))
        s2 += float(np.dot(w, g * g))
    return s1, s2


def moebius_abs_sum(points, weights, x, ell):
    """Weighted sums of ``h`` and ``h^2``, ``h = |<eta - (n-2)/n x, ell>| |eta - x|^(2-n)``."""
    n = points.shape[1]
    shift = (n - 2) / n * x
    s1 = 0.0
    s2 = 0.0
    for sl in _chunks(points.shape[0]):
        eta = points[sl]
        diff = eta - x[None, :]
        d2 = np.einsum("ij,ij->i", diff, diff)
        h = np.abs((eta - shift[None, :]) @ ell) * d2 ** (1.0 - 0.5 * n)
        w = weights[sl]
        s1 += float(np.dot(w, h))
        s2 += float(np.dot(w, h * h))
    return s1, s2


def poisson_sign_sum(points, weights, y, x, ell):
    """Weighted sum of ``P(y, zeta) sign <grad P(x, zeta), ell>``."""
    n = points.shape[1]
    ry = 1.0 - float(np.dot(y, y))
    total = 0.0
    for sl in _chunks(points.shape[0]):
        pts = points[sl]
        g = _grad_dot(pts, x, ell, n)
        dy = y[None, :] - pts
        p = ry / np.einsum("ij,ij->i", dy, dy) ** (0.5 * n)
        total += float(np.dot(weights[sl], p * np.sign(g)))
    return total
