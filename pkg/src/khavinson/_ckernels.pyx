# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG7 = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

DEF STACK = 128


cdef struct PRhoParams:
    int n
    double z
    double beta
    double k2


cdef inline double _ipow(double x, int k) nogil:
    cdef double r = 1.0
    while k > 0:
        if k & 1:
            r *= x
        x *= x
        k >>= 1
    return r


cdef inline double _halfpow(double x, int twice) nogil:
    """``x ** (twice / 2)`` for ``x > 0`` and integer ``twice >= 0``."""
    cdef double r = _ipow(x, twice >> 1)
    if twice & 1:
        r *= sqrt(x)
    return r


cdef inline double _prho_integrand(double w, PRhoParams* p) nogil:
    cdef double w2 = w * w
    cdef double q = p.n - p.beta + p.n * p.z * w - p.beta * w2
    return q * _ipow(w, p.n - 2) / (_halfpow(1.0 + w2, p.n + 2) * _halfpow(1.0 + p.k2 * w2, p.n - 2))


cdef inline void _gk15(double a, double b, PRhoParams* p, double* k_out, double* err_out) nogil:
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double fc = _prho_integrand(mid, p)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG7[3]
    cdef double f1, f2, dx
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        f1 = _prho_integrand(mid - dx, p)
        f2 = _prho_integrand(mid + dx, p)
        resk += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            resg += WG7[j // 2] * (f1 + f2)
    k_out[0] = resk * half
    err_out[0] = fabs((resk - resg) * half)


cdef int _adapt(double a, double b, PRhoParams* p, double rel_tol, double abs_tol,
                int max_depth, double* value, double* error) nogil:
    cdef double[STACK] lo_s
    cdef double[STACK] hi_s
    cdef int[STACK] depth_s
    cdef int top = 0
    cdef int failed = 0
    cdef double k, e, whole_k, whole_e, tol, lo, hi, mid
    cdef double length = b - a
    cdef int d
    _gk15(a, b, p, &whole_k, &whole_e)
    tol = abs_tol
    if rel_tol * fabs(whole_k) > tol:
        tol = rel_tol * fabs(whole_k)
    value[0] = 0.0
    error[0] = 0.0
    if whole_e <= tol or length <= 0.0:
        value[0] = whole_k
        error[0] = whole_e
        return 0
    lo_s[0] = a
    hi_s[0] = b
    depth_s[0] = 0
    top = 1
    while top > 0:
        top -= 1
        lo = lo_s[top]
        hi = hi_s[top]
        d = depth_s[top]
        _gk15(lo, hi, p, &k, &e)
        if e <= tol * (hi - lo) / length or d >= max_depth or top + 2 >= STACK:
            if e > tol * (hi - lo) / length:
                failed = 1
            value[0] += k
            error[0] += e
            continue
        mid = 0.5 * (lo + hi)
        lo_s[top] = mid
        hi_s[top] = hi
        depth_s[top] = d + 1
        lo_s[top + 1] = lo
        hi_s[top + 1] = mid
        depth_s[top + 1] = d + 1
        top += 2
    return failed


def p_rho_many(z, int n, double rho, double rel_tol, double abs_tol, int max_depth):
    cdef cnp.ndarray[cnp.double_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef Py_ssize_t m = zz.shape[0]
    cdef cnp.ndarray[cnp.double_t, ndim=1] out = np.zeros(m)
    cdef cnp.ndarray[cnp.double_t, ndim=1] err = np.zeros(m)
    cdef double alpha = (n - 2) * rho / n
    cdef double kappa = (1.0 - rho) / (1.0 + rho)
    cdef PRhoParams p
    cdef Py_ssize_t i
    cdef double zi, disc, upper, v, e
    cdef int failed = 0
    p.n = n
    p.beta = 0.5 * (n - (n - 2) * rho)
    p.k2 = kappa * kappa
    with nogil:
        for i in range(m):
            zi = zz[i]
            disc = sqrt(zi * zi + 1.0 - alpha * alpha)
            if zi >= 0:
                upper = (zi + disc) / (1.0 - alpha)
            else:
                upper = (1.0 + alpha) / (disc - zi)
            p.z = zi
            failed |= _adapt(0.0, upper, &p, rel_tol, abs_tol, max_depth, &v, &e)
            out[i] = v
            err[i] = e
    if failed:
        from .errors import AccuracyError
        raise AccuracyError("max_depth exceeded in P_rho quadrature", value=out, err_est=err)
    return out, err


def oracle_abs_sum(double[:, ::1] points, double[::1] weights, double[::1] x, double[::1] ell):
    cdef Py_ssize_t N = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t i, j
    cdef double xl = 0.0, r2 = 0.0, d2, dl, diff, g, s1 = 0.0, s2 = 0.0
    cdef int ex2 = <int>n + 2
    for j in range(n):
        xl += x[j] * ell[j]
        r2 += x[j] * x[j]
    with nogil:
        for i in range(N):
            d2 = 0.0
            dl = 0.0
            for j in range(n):
                diff = x[j] - points[i, j]
                d2 += diff * diff
                dl += diff * ell[j]
            g = (-2.0 * xl * d2 - n * (1.0 - r2) * dl) / _halfpow(d2, ex2)
            s1 += weights[i] * fabs(g)
            s2 += weights[i] * g * g
    return s1, s2


def moebius_abs_sum(double[:, ::1] points, double[::1] weights, double[::1] x, double[::1] ell):
    cdef Py_ssize_t N = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t i, j
    cdef double c = (n - 2.0) / n
    cdef double d2, proj, diff, h, s1 = 0.0, s2 = 0.0
    cdef int ex2 = <int>n - 2
    with nogil:
        for i in range(N):
            d2 = 0.0
            proj = 0.0
            for j in range(n):
                diff = points[i, j] - x[j]
                d2 += diff * diff
                proj += (points[i, j] - c * x[j]) * ell[j]
            h = fabs(proj) / _halfpow(d2, ex2)
            s1 += weights[i] * h
            s2 += weights[i] * h * h
    return s1, s2


def poisson_sign_sum(double[:, ::1] points, double[::1] weights, double[::1] y,
                     double[::1] x, double[::1] ell):
    cdef Py_ssize_t N = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t i, j
    cdef double xl = 0.0, r2 = 0.0, ry = 1.0, d2, dy2, dl, diff, g, total = 0.0, pk
    cdef int ex2 = <int>n + 2
    for j in range(n):
        xl += x[j] * ell[j]
        r2 += x[j] * x[j]
        ry -= y[j] * y[j]
    with nogil:
        for i in range(N):
            d2 = 0.0
            dl = 0.0
            dy2 = 0.0
            for j in range(n):
                diff = x[j] - points[i, j]
                d2 += diff * diff
                dl += diff * ell[j]
                diff = y[j] - points[i, j]
                dy2 += diff * diff
            g = (-2.0 * xl * d2 - n * (1.0 - r2) * dl) / _halfpow(d2, ex2)
            pk = ry / _halfpow(dy2, <int>n)
            if g > 0:
                total += weights[i] * pk
            elif g < 0:
                total -= weights[i] * pk
    return total
