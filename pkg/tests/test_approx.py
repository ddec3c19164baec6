import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from utaylor.approx import (
    ApproxProblem,
    IllConditionedError,
    LeastSquaresFitter,
    fit_to_tolerance,
    mergelyan_approximate,
    shifted_fit,
)
from utaylor.geometry import disc_set, union_set
from utaylor.poly import Poly

K3 = disc_set("K3", 3, 0.5, n_boundary=128, n_interior=32)


def neumann_tail_bound(degree: int) -> mpf:
    # 1/z about 3 on D(3, 1/2): |sum_{j>d} (-1)^j (z-3)^j / 3^(j+1)|
    # <= (1/3) (1/6)^(d+1) / (1 - 1/6)
    return mpf(1) / 3 * mpf(1, 6) ** (degree + 1) / (1 - mpf(1) / 6)


class TestOracle1OverZ:
    def test_degree_40_beats_oracle(self):
        res = mergelyan_approximate(ApproxProblem(lambda z: 1 / z, K3, 40, 1e-8))
        assert res.met
        assert res.achieved_error <= 1e-8
        # the engine is near-optimal: the truncated geometric-series oracle
        # at the same degree has error about 5e-33, and the fit matches it
        assert res.achieved_error <= 100 * neumann_tail_bound(40)

    def test_oracle_values_frozen(self):
        # oracle check: explicit truncated series evaluated directly
        z = mpc("3.2", "0.1")
        coeffs = [(-1) ** j / mpf(3) ** (j + 1) for j in range(41)]
        series = sum(c * (z - 3) ** j for j, c in enumerate(coeffs))
        assert abs(series - 1 / z) <= neumann_tail_bound(40)


def test_polynomial_reproduction_random():
    import random

    rng = random.Random(7)
    for _ in range(3):
        coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(9)]
        p = Poly(coeffs)
        res = mergelyan_approximate(ApproxProblem(lambda z: p(z), K3, 12, 1e-25))
        assert res.met and res.achieved_error <= 1e-25


def test_union_two_values():
    U = union_set("u", [disc_set("a", 0, 0.5, 96, 24), disc_set("b", 3, 0.5, 96, 24)])
    target = lambda z: mpc(0) if abs(z) < 1 else mpc(1)
    res = fit_to_tolerance(target, U, 1e-6, [12, 24, 40, 60])
    assert res.met and res.degree <= 60


def test_monotonicity_in_degree():
    errs = []
    for degree in (8, 16, 24, 32):
        res = mergelyan_approximate(ApproxProblem(lambda z: 1 / z, K3, degree, 1e-30))
        errs.append(res.achieved_error)
    for a, b in zip(errs, errs[1:]):
        assert b <= a * mpf("1.01")


class TestShiftedFit:
    def test_zero_shift_identity(self):
        prob = ApproxProblem(lambda z: 1 / z, K3, 10, 1e-4)
        a = mergelyan_approximate(prob)
        b = shifted_fit(prob, 0)
        assert a.poly == b.poly
        assert a.achieved_error == b.achieved_error

    def test_valuation_exact(self):
        res = shifted_fit(ApproxProblem(lambda z: 1 / z, K3, 10, 1e-4), 7)
        assert res.poly.valuation() == 7
        assert all(res.poly.coefficient(j) == 0 for j in range(7))

    def test_error_scaling(self):
        prob = ApproxProblem(lambda z: 1 / z, K3, 10, 1e-4)
        base = mergelyan_approximate(prob)
        shifted = shifted_fit(prob, 10)
        scale = max(mpf(1), K3.d_max) ** 10
        assert abs(shifted.achieved_error - base.achieved_error * scale) < 1e-30


def test_constrained_valuation_fit():
    # fit in span{z^5, ..., z^(5+12)}: low coefficients exactly zero
    res = mergelyan_approximate(
        ApproxProblem(lambda z: 1 / z, K3, 12, 1e-6, valuation=5)
    )
    assert res.poly.valuation() >= 5
    assert res.met


def test_stability_under_densification():
    prob = ApproxProblem(lambda z: 1 / z, K3, 24, 1e-18)
    res = mergelyan_approximate(prob)
    dense_prob = ApproxProblem(lambda z: 1 / z, K3.densified(2), 24, 1e-18)
    res2 = mergelyan_approximate(dense_prob)
    assert res2.achieved_error <= res.achieved_error * mpf("1.10") + mpf(2) ** (-240)
    assert res.achieved_error <= res2.achieved_error * mpf("1.10") + mpf(2) ** (-240)


def test_validation_grid_denser():
    prob = ApproxProblem(lambda z: 1 / z, K3, 8, 1e-3)
    res = mergelyan_approximate(prob)
    assert res.validation_points >= 4 * len(K3.all_samples())


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=6))
def test_monomial_reproduction_property(deg):
    res = mergelyan_approximate(ApproxProblem(lambda z: z**deg, K3, 8, 1e-40))
    assert res.achieved_error < 1e-40
