"""Select the compiled kernels when available, else the numpy fallback.

Set ``KHAV_PURE_PYTHON=1`` to force the fallback.  :func:`use` switches at
runtime (tests and the benchmark compare both).
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

AVAILABLE = ("python",) if _ckernels is None else ("compiled", "python")

_impl = _pykernels
name = "python"


def use(backend: str):
    """Switch to ``"compiled"`` or ``"python"``; returns the previous name."""
    global _impl, name
    previous = name
    if backend == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built (run `pip install -e .`)")
        _impl, name = _ckernels, "compiled"
    elif backend == "python":
        _impl, name = _pykernels, "python"
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return previous


if _ckernels is not None and os.environ.get("KHAV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    use("compiled")


def p_rho_many(z, n, rho, rel_tol, abs_tol, max_depth):
    return _impl.p_rho_many(np.ascontiguousarray(z, dtype=float), int(n), float(rho),
                            float(rel_tol), float(abs_tol), int(max_depth))


def _arrays(points, weights, *vecs):
    out = [np.ascontiguousarray(points, dtype=float), np.ascontiguousarray(weights, dtype=float)]
    out.extend(np.ascontiguousarray(v, dtype=float) for v in vecs)
    return out


def oracle_abs_sum(points, weights, x, ell):
    return _impl.oracle_abs_sum(*_arrays(points, weights, x, ell))


def moebius_abs_sum(points, weights, x, ell):
    return _impl.moebius_abs_sum(*_arrays(points, weights, x, ell))


def poisson_sign_sum(points, weights, y, x, ell):
    return _impl.poisson_sign_sum(*_arrays(points, weights, y, x, ell))
