import math

import numpy as np
import pytest

from khavinson.errors import AccuracyError, DomainError
from khavinson.quadrature import (
    QuadratureConfig,
    SphereSample,
    bracketed_roots,
    integrate,
    integrate_batch,
    integrate_halfline,
    integrate_t_weight,
    panel_rule,
    sphere_quadrature,
)


def test_rational_integral(oracle):
    v, err = integrate(lambda w: w ** 2 * (1 - w ** 2) / (1 + w ** 2) ** 3, 0.0, 1.0)
    want = oracle["closed_forms"]["rational_integral"]
    assert want == pytest.approx((4 - math.pi) / 16, rel=1e-15)
    assert v == pytest.approx(want, rel=1e-12)
    assert err < 1e-10


def test_kink_needs_breakpoint_only_for_speed():
    f = lambda x: np.abs(x - 0.3)
    exact = 0.5 * (0.3 ** 2 + 0.7 ** 2)
    assert integrate(f, 0.0, 1.0)[0] == pytest.approx(exact, rel=1e-10)
    assert integrate(f, 0.0, 1.0, points=[0.3])[0] == pytest.approx(exact, rel=1e-14)


def test_reversed_limits_rejected():
    with pytest.raises(DomainError):
        integrate(np.sin, 1.0, 0.0)


def test_batch_handles_many_parameters():
    k = np.arange(1, 40)
    v, e = integrate_batch(lambda x, i: np.cos(k[i] * x), np.zeros(k.size), np.full(k.size, 1.0))
    np.testing.assert_allclose(v, np.sin(k) / k, rtol=1e-10, atol=1e-13)
    assert np.all(e >= 0)


def test_batch_reversed_limits_change_sign():
    v, _ = integrate_batch(lambda x, i: x, [1.0], [0.0])
    assert v[0] == pytest.approx(-0.5)


def test_batch_ignores_nan_breakpoints():
    bp = np.array([[0.5, np.nan], [np.nan, np.nan]])
    v, _ = integrate_batch(lambda x, i: np.abs(x - 0.5), [0.0, 0.0], [1.0, 1.0], breakpoints=bp)
    np.testing.assert_allclose(v, 0.25, rtol=1e-12)


def test_depth_exhaustion_raises():
    cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-300, max_depth=2)
    with pytest.raises(AccuracyError) as info:
        integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, cfg)
    assert info.value.value is not None


def test_nonfinite_integrand_raises():
    with pytest.raises(AccuracyError):
        integrate(lambda x: 1.0 / (x - 0.5) * np.where(x == 0.5, np.inf, 1.0), 0.0, 1.0, points=[0.5])


def test_config_validation_and_tightening():
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_depth=0)
    cfg = QuadratureConfig().tightened(10.0)
    assert cfg.rel_tol == pytest.approx(1e-11)
    assert cfg.abs_tol == pytest.approx(1e-13)


def test_panel_rules_integrate_polynomials():
    for order in (7, 15, 20):
        x, w = panel_rule(order)[:2]
        assert np.sum(w) == pytest.approx(2.0, rel=1e-14)
        assert np.dot(w, x ** 4) == pytest.approx(0.4, rel=1e-13)


def test_t_weight(oracle):
    for n in range(3, 9):
        m0 = integrate_t_weight(lambda t: np.ones_like(t), n)
        assert m0 == pytest.approx(oracle["closed_forms"]["t_moment0"][str(n)], rel=1e-12)
    with pytest.raises(DomainError):
        integrate_t_weight(lambda t: t, 2)


def test_halfline():
    assert integrate_halfline(lambda w: 1 / (1 + w * w) ** 2) == pytest.approx(math.pi / 4, rel=1e-12)
    assert integrate_halfline(lambda w: np.exp(-w)) == pytest.approx(1.0, rel=1e-11)


def test_bracketed_roots():
    lo = np.array([0.0, 0.0, 2.0])
    hi = np.array([2.0, 1.0, 3.0])
    r = bracketed_roots(lambda x: x * x - 2.0, lo, hi)
    assert r[0] == pytest.approx(math.sqrt(2), abs=1e-14)
    assert np.isnan(r[1]) and np.isnan(r[2])


def test_monte_carlo_rule_is_seeded():
    a = sphere_quadrature(4, 1000, seed=3)
    b = sphere_quadrature(4, 1000, seed=3)
    c = sphere_quadrature(4, 1000, seed=4)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    np.testing.assert_allclose(np.linalg.norm(a.points, axis=1), 1.0, rtol=1e-14)
    assert len(a) == 1000 and a.n == 4
    with pytest.raises(DomainError):
        sphere_quadrature(4, 10)


@pytest.mark.parametrize("n", [2, 3])
def test_grid_rules_reproduce_moments(n):
    rule = sphere_quadrature(n, 256, mode="latlong_grid")
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-12)
    # mean of zeta_1^2 over the sphere is 1/n, of zeta_1^4 is 3/(n(n+2))
    assert np.dot(rule.weights, rule.points[:, 0] ** 2) == pytest.approx(1 / n, rel=1e-12)
    assert np.dot(rule.weights, rule.points[:, 0] ** 4) == pytest.approx(3 / (n * (n + 2)), rel=1e-12)
    assert np.dot(rule.weights, rule.points[:, 1] ** 2) == pytest.approx(1 / n, rel=1e-12)


def test_graded_grid_still_normalized():
    rule = sphere_quadrature(3, 256, mode="latlong_grid", grading=3.0)
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_grid_rule_dimension_limits():
    with pytest.raises(DomainError):
        sphere_quadrature(4, 64, mode="latlong_grid")
    with pytest.raises(DomainError):
        sphere_quadrature(3, 64, mode="sobol")


def test_rule_iteration_yields_samples():
    rule = sphere_quadrature(2, 8, mode="latlong_grid")
    items = list(rule)
    assert len(items) == 8 and isinstance(items[0], SphereSample)
    assert sum(s.weight for s in items) == pytest.approx(1.0)
