import math
import os

import numpy as np
import pytest

from khavinson import analysis as A
from khavinson.errors import DomainError
from khavinson.quadrature import DEFAULT_CONFIG


@pytest.fixture(scope="module")
def sweep_boundary():
    return A.sweep_tau(3, 1.0, 33)


def test_sweep_invariants(sweep_boundary):
    rep = sweep_boundary
    taus = [t for t, _ in rep.samples]
    assert taus[0] == 0.0 and taus[-1] == math.pi / 2
    assert rep.argmax_value >= max(v for _, v in rep.samples)
    assert rep.argmax_tau == 0.0 and rep.conjecture_holds
    assert rep.radial_value == pytest.approx(0.7698003589195, abs=1e-10)
    assert rep.tangential_value == pytest.approx(2 / math.pi, abs=1e-12)


def test_sweep_flat_at_center():
    rep = A.sweep_tau(3, 0.0, 17)
    assert rep.profile_spread <= 1e-7
    assert rep.conjecture_holds


@pytest.mark.parametrize("n,rho", [(3, 0.99), (4, 0.999)])
def test_argmax_stable_under_tighter_tolerances(n, rho):
    a = A.sweep_tau(n, rho, 17)
    b = A.sweep_tau(n, rho, 17, DEFAULT_CONFIG.tightened(10))
    assert a.conjecture_holds == b.conjecture_holds
    assert a.argmax_tau == b.argmax_tau


def test_sweep_domain():
    with pytest.raises(DomainError):
        A.sweep_tau(3, 0.5, 5)
    with pytest.raises(DomainError):
        A.sweep_tau(2, 0.5, 9)


def test_golden_max_finds_interior_and_endpoint():
    x, v = A.golden_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-6)
    x, v = A.golden_max(lambda t: -t, 0.0, 1.0)
    assert x == 0.0 and v == 0.0


def test_scan_and_threshold():
    reps = A.conjecture_scan(3, [0.9, 0.99], grid_size=9)
    assert [r.rho for r in reps] == [0.9, 0.99]
    assert A.empirical_threshold(reps) == 0.9


def test_threshold_logic():
    from dataclasses import replace
    base = A.sweep_tau(3, 0.0, 9)
    fake = [replace(base, rho=r, conjecture_holds=h)
            for r, h in ((0.1, True), (0.3, False), (0.5, True), (0.7, True))]
    assert A.empirical_threshold(fake) == 0.5
    fake[-1] = replace(fake[-1], conjecture_holds=False)
    assert A.empirical_threshold(fake) is None


def test_boundary_deviation_shrinks():
    d = [A.boundary_deviation(3, r, 9) for r in (0.9, 0.99, 0.999)]
    assert d[0] > d[1] > d[2] and d[2] <= 1e-2


@pytest.mark.parametrize("n,a,b", [(3, 1.75, 1.0), (4, 1.0, 1.0), (3, 2.0, 1.0), (5, 6.0, 1.0)])
def test_extremal_lemma(n, a, b):
    rep = A.verify_extremal_lemma(n, a, b)
    assert rep.all_pass, rep.notes
    assert rep.worst_residual == min(rep.residuals)


def test_extremal_lemma_flat_case_is_constant():
    g = A.verify_extremal_lemma(3, 2.0, 1.0)
    steps = [r for name, r in zip(g.grid, g.residuals) if str(name).startswith("g[")]
    assert max(abs(s) for s in steps) <= 1e-12


def test_km_inequality():
    rep = A.verify_km_inequality(3, [0.0])
    assert rep.residuals[0] == pytest.approx(0.0, abs=1e-15)
    assert A.verify_km_inequality(3, [1.0]).residuals[0] > 0
    for n in range(3, 9):
        assert A.verify_km_inequality(n).all_pass


def test_p1_inequality():
    for n in range(3, 9):
        rep = A.verify_p1_inequality(n)
        assert rep.all_pass
    assert A.verify_p1_inequality(3, [1.0]).residuals[0] > 0


def test_ineq_rho():
    assert A.verify_ineq_rho(3, 1.0, 1.75, 20.0).all_pass
    # reported, not asserted: near-boundary and interior behaviour
    A.verify_ineq_rho(3, 0.999, 1.9, 20.0)
    A.verify_ineq_rho(3, 0.5, 1.9, 20.0)
    with pytest.raises(DomainError):
        A.verify_ineq_rho(3, 1.0, -1.0)


def test_second_derivative():
    # at rho = 1 the second derivative of F at 0 is n/2
    assert A.second_derivative(3, 1.0) == pytest.approx(1.5, abs=1e-6)
    assert A.second_derivative_gap(3, 1.0, 1.75) >= 0
    assert abs(A.first_derivative(3, 1.0)) <= 1e-6
    with pytest.raises(DomainError):
        A.second_derivative(3, 1.0, h=1.0)


def test_majorant_transfer_soundness():
    for n, rho in ((3, 1.0), (3, 0.999), (4, 0.999)):
        K = 0.5 * (n / 2 + (n - 1))  # between F''(0) and n - 1
        if A.verify_ineq_rho(n, rho, K, 20.0, 201).all_pass and K < n - 1:
            assert A.sweep_tau(n, rho, 17).argmax_tau == 0.0


def test_threads_keep_order(monkeypatch):
    monkeypatch.setenv("KHAV_THREADS", "3")
    assert A.thread_count() == 3
    assert A.pmap(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv("KHAV_THREADS", "x")
    with pytest.raises(DomainError):
        A.thread_count()


def test_report_fields():
    rep = A.verify_p1_inequality(3, np.linspace(-1, 1, 5))
    assert len(rep.grid) == len(rep.residuals) == len(rep.passes) == 5
