import pytest
from mpmath import mp, mpf, sqrt

from utaylor.quadrature import (
    Quadrature,
    dyadic_partial_integrals,
    integrate,
    integrate_interval,
)


def test_constant():
    est = integrate(lambda t: 1, Quadrature(abs_tol=1e-8))
    assert est.converged
    assert abs(est.estimate - 1) <= est.bound


def test_linear():
    est = integrate(lambda t: t, Quadrature(abs_tol=1e-8))
    assert est.converged
    assert abs(est.estimate - mpf(1) / 2) <= est.bound


def test_inverse_sqrt_singularity():
    # closed-form antiderivative 2 sqrt(t): integral over (0,1] is 2
    est = integrate(lambda t: 1 / sqrt(t), Quadrature(abs_tol=1e-7))
    assert est.converged
    assert abs(est.estimate - 2) < 1e-6


def test_adaptive_rule_matches():
    q = Quadrature(rule="adaptive-subdivision", abs_tol=1e-8)
    est = integrate(lambda t: 1 / sqrt(t), q)
    assert est.converged
    assert abs(est.estimate - 2) < 1e-6


def test_divergent_integrand_unconverged():
    est = integrate(lambda t: 1 / t, Quadrature(abs_tol=1e-8, max_levels=24))
    assert not est.converged


def test_bound_honest_on_smooth():
    q = Quadrature(abs_tol=1e-10)
    v, e = integrate_interval(lambda t: t * t, mpf(1) / 4, mpf(1), q)
    assert abs(v - (mpf(1) / 3 - mpf(1) / 192)) <= max(e, mpf(1e-10))


def test_domination_monotonicity():
    q = Quadrature(abs_tol=1e-9)
    f = integrate(lambda t: t, q)
    g = integrate(lambda t: t + mpf(1) / 10, q)
    assert f.estimate <= g.estimate + 2 * (f.bound + g.bound)


def test_partial_integrals_harmonic():
    # integrand 1/t: increments of the partial integrals are exactly log 2
    q = Quadrature(abs_tol=1e-10)
    parts = dyadic_partial_integrals(lambda t: 1 / t, 8, q)
    for a, b in zip(parts, parts[1:]):
        assert abs((b - a) - mp.log(2)) < 1e-8


def test_bad_rule_rejected():
    with pytest.raises(ValueError):
        Quadrature(rule="simpson")
