"""Sharp pointwise gradient constants for bounded harmonic functions.

The main entry points are :func:`c_final` (and the other representations
in :mod:`khavinson.representations`), :func:`c_halfspace`, :func:`c_zero`
and the direction sweep :func:`sweep_tau`.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, DomainError, SingularityError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, sphere_quadrature
from .kernels import GAMMA_INF, ProblemPoint, canonicalize, P_rho, P1_closed, P_script
from .representations import (
    ConstantValue,
    Method,
    c_double1,
    c_double2,
    c_final,
    c_halfspace,
    c_moebius,
    c_sphere_oracle,
    c_zero,
    evaluate,
    extremal_derivative,
    global_bound,
    zero_integral_check,
)
from .analysis import (
    SweepReport,
    VerificationReport,
    conjecture_scan,
    empirical_threshold,
    second_derivative_gap,
    sweep_tau,
    verify_extremal_lemma,
    verify_ineq_rho,
    verify_km_inequality,
    verify_p1_inequality,
)

__all__ = [
    "AccuracyError", "DomainError", "SingularityError",
    "DEFAULT_CONFIG", "QuadratureConfig", "sphere_quadrature",
    "GAMMA_INF", "ProblemPoint", "canonicalize", "P_rho", "P1_closed", "P_script",
    "ConstantValue", "Method", "c_double1", "c_double2", "c_final", "c_halfspace",
    "c_moebius", "c_sphere_oracle", "c_zero", "evaluate", "extremal_derivative",
    "global_bound", "zero_integral_check",
    "SweepReport", "VerificationReport", "conjecture_scan", "empirical_threshold",
    "second_derivative_gap", "sweep_tau", "verify_extremal_lemma", "verify_ineq_rho",
    "verify_km_inequality", "verify_p1_inequality",
]
