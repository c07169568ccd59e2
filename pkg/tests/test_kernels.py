import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from khavinson.errors import DomainError, SingularityError
from khavinson.kernels import (
    GAMMA_INF,
    HALF_PI,
    P1_closed,
    P_rho,
    P_script,
    ProblemPoint,
    canonicalize,
    grad_poisson,
    kernel_G,
    kernel_Q,
    kernel_R,
    kernel_S,
    kernel_W,
    kernel_Z,
    majorant_A,
    moebius_sphere_map,
    p1_scaling_constant,
    poisson_kernel,
)

rhos = st.floats(0.0, 1.0)
dims = st.integers(3, 9)


def test_problem_point_parameters():
    pp = ProblemPoint(4, 0.5, 0.3)
    assert pp.alpha == pytest.approx(0.25)
    assert pp.beta == pytest.approx(1.5)
    assert pp.kappa == pytest.approx(1 / 3)
    assert pp.w_rho == pytest.approx(math.sqrt(5 / 3))
    assert pp.gamma == pytest.approx(math.tan(0.3))
    assert ProblemPoint(4, 0.5, HALF_PI).gamma is GAMMA_INF


@pytest.mark.parametrize("args", [(1, 0.5, 0.0), (3, -0.1, 0.0), (3, 1.1, 0.0), (3, 0.5, 2.0), (3.5, 0.5, 0.0)])
def test_problem_point_rejects(args):
    with pytest.raises(DomainError):
        ProblemPoint(*args)


def test_canonicalize():
    pp = canonicalize([0.0, 0.6, 0.0], [0.0, -1.0, 0.0])
    assert (pp.n, pp.rho, pp.tau) == (3, pytest.approx(0.6), 0.0)
    pp = canonicalize([0.3, 0.4], [0.8, -0.6])
    assert pp.tau == HALF_PI
    pp = canonicalize(np.zeros(5), np.eye(5)[2])
    assert pp.rho == 0.0
    with pytest.raises(DomainError):
        canonicalize([1.0, 0.0], [1.0, 0.0])
    with pytest.raises(DomainError):
        canonicalize([0.1, 0.0], [1.0, 1.0])


def test_poisson_kernel_reproduces_linear_functions():
    # the Poisson integral of zeta_1 is x_1
    from khavinson.quadrature import sphere_quadrature
    rule = sphere_quadrature(3, 512, mode="latlong_grid")
    x = np.array([0.3, -0.2, 0.1])
    P = poisson_kernel(x, rule.points)
    assert np.dot(rule.weights, P) == pytest.approx(1.0, rel=1e-10)
    assert np.dot(rule.weights, P * rule.points[:, 0]) == pytest.approx(0.3, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 7), r=st.floats(0.0, 0.9), seed=st.integers(0, 2 ** 16))
def test_gradient_matches_finite_difference(n, r, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x *= r / max(np.linalg.norm(x), 1e-300)
    zeta = rng.standard_normal(n)
    zeta /= np.linalg.norm(zeta)
    h = 1e-6
    fd = np.array([(poisson_kernel(x + h * e, zeta) - poisson_kernel(x - h * e, zeta)) / (2 * h)
                   for e in np.eye(n)])
    g = grad_poisson(x, zeta)
    np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-5 * np.abs(g).max())


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 7), r=st.floats(0.0, 0.99), seed=st.integers(0, 2 ** 16))
def test_moebius_map_preserves_sphere(n, r, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x *= r / np.linalg.norm(x)
    eta = rng.standard_normal((20, n))
    eta /= np.linalg.norm(eta, axis=1)[:, None]
    np.testing.assert_allclose(np.linalg.norm(moebius_sphere_map(x, eta), axis=1), 1.0, rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(n=dims, rho=rhos, z=st.floats(-50, 50))
def test_Z_is_a_root_of_Q(n, rho, z):
    pp = ProblemPoint(n, rho)
    Z = kernel_Z(z, pp)
    assert Z > 0
    scale = pp.n + pp.n * abs(z) * Z + pp.beta * Z * Z
    assert abs(kernel_Q(Z, z, pp)) <= 1e-13 * scale


def test_radial_root_is_w_rho():
    for n in range(3, 8):
        for rho in (0.0, 0.4, 1.0):
            pp = ProblemPoint(n, rho)
            assert kernel_Z(0.0, pp) == pytest.approx(pp.w_rho, rel=1e-14)


def test_S_limits_at_half_pi():
    assert kernel_S(HALF_PI, ProblemPoint(3, 1.0)) == pytest.approx(1.0)
    assert kernel_S(HALF_PI, ProblemPoint(5, 1.0)) == pytest.approx(1.0)
    assert kernel_S(HALF_PI, ProblemPoint(4, 0.5)) == pytest.approx(0.0, abs=1e-30)


def test_S_matches_unfactored_form():
    th = np.linspace(0.05, 1.5, 17)
    for n, rho in ((3, 0.3), (6, 0.8)):
        pp = ProblemPoint(n, rho)
        raw = np.sin(2 * th) ** (n - 2) / ((1 + rho) ** 2 - 4 * rho * np.sin(th) ** 2) ** (n / 2 - 1)
        np.testing.assert_allclose(kernel_S(th, pp), raw, rtol=1e-13)


def test_R_singular_only_at_boundary_pole():
    assert kernel_R(0.0, ProblemPoint(3, 0.5)) == pytest.approx(2.0)
    with pytest.raises(SingularityError):
        kernel_R(0.0, ProblemPoint(3, 1.0))


def test_G_at_origin_and_W_shape():
    pp = ProblemPoint(3, 0.0)
    assert kernel_G(0.0, 0.0, 0.0, pp) == pytest.approx(3 - 1.5)
    assert kernel_W(0.0, pp) == 0.0
    assert kernel_W(1.0, pp) == pytest.approx(1 / 8)  # kappa = 1 at the center


def test_P_rho_frozen(oracle):
    for q in oracle["p_rho"]:
        assert P_rho(q["z"], ProblemPoint(q["n"], q["rho"])) == pytest.approx(q["value"], rel=1e-12)


def test_P_rho_at_center(oracle):
    for n in range(3, 9):
        assert P_rho(0.0, ProblemPoint(n, 0.0)) == pytest.approx(
            oracle["closed_forms"]["p_rho0_at_zero"][str(n)], rel=1e-12)


def test_P_rho_vectorized_shape():
    z = np.linspace(-2, 2, 12).reshape(3, 4)
    v, e = P_rho(z, ProblemPoint(4, 0.3), full_output=True)
    assert v.shape == z.shape and e.shape == z.shape


@pytest.mark.parametrize("n", [3, 4, 6, 9])
def test_P1_closed_equals_quadrature(n):
    z = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(P_rho(z, ProblemPoint(n, 1.0)), P1_closed(z, n), rtol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_P1_scaling_relation(n):
    z = np.linspace(-5, 5, 21)
    y = n * z / (2 * math.sqrt(n - 1))
    np.testing.assert_allclose(P1_closed(z, n), p1_scaling_constant(n) * P_script(y, n), rtol=1e-13)


def test_P_script_at_origin():
    assert P_script(0.0, 3) == pytest.approx(1 / math.sqrt(3))
    for n in range(3, 9):
        assert P_script(0.0, n) ** 2 == pytest.approx(float(n) ** (2 - n), rel=1e-14)


def test_majorant():
    assert majorant_A(0.0, 2.0, 9.0) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        majorant_A(1.0, 0.0, 1.0)


def test_representation_kernels_need_three_dimensions():
    pp = ProblemPoint(2, 0.5)
    with pytest.raises(DomainError):
        kernel_Z(0.0, pp)
    with pytest.raises(DomainError):
        P1_closed(0.0, 2)
