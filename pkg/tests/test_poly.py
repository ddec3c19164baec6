import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from utaylor.poly import Poly, StreamExhaustedError, partial_sum
from utaylor.precision import local_precision


def test_identity_polynomial():
    p = Poly([0, 1])
    assert p(mpc(3, 4)) == mpc(3, 4)


def test_sum_of_ones():
    assert Poly([1, 1, 1])(1) == 3


def test_binomial_oracle():
    # (z-1)^5 expanded, evaluated at 2, against the direct power
    base = Poly([-1, 1])
    expanded = base * base * base * base * base
    z = mpc("2")
    direct = (z - 1) ** 5
    assert abs(expanded(z) - direct) < mpf(2) ** (-200)


def test_degree_and_zero_sentinel():
    assert Poly([]).degree == -1
    assert Poly([0, 0]).degree == -1
    assert Poly([0, 0, 3]).degree == 2
    assert Poly([1]).degree == 0


def test_shift_and_truncate():
    p = Poly([1, 2, 3])
    s = p.shifted(2)
    assert s.coeffs[0] == 0 and s.coeffs[2] == 1 and s.degree == 4
    t = s.truncated(2)
    assert t.degree == 2 and t.coefficient(2) == 1
    assert s.truncated(1).is_zero()


def test_valuation():
    assert Poly([0, 0, 5, 1]).valuation() == 2
    assert Poly([]).valuation() == -1


def test_partial_sum_geometric():
    p = partial_sum([1, 1, 1, 1], 2)
    assert p.coeffs == [mpc(1), mpc(1), mpc(1)]


def test_partial_sum_constant():
    p = partial_sum(iter([7, 9]), 0)
    assert p.degree == 0 and p.coefficient(0) == 7


def test_partial_sum_exhaustion():
    with pytest.raises(StreamExhaustedError):
        partial_sum(iter([1, 2]), 5)


def test_partial_sum_callable():
    p = partial_sum(lambda j: j + 1, 3)
    assert [c.real for c in p.coeffs] == [1, 2, 3, 4]


coeff = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(coeff, min_size=1, max_size=20),
    st.lists(coeff, min_size=1, max_size=20),
    st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
)
def test_product_evaluation_homomorphism(a, b, z):
    p, q = Poly(a), Poly(b)
    lhs = (p * q)(z)
    rhs = p(z) * q(z)
    assert abs(lhs - rhs) <= mpf(2) ** (-200) * (1 + abs(rhs))


@settings(max_examples=15, deadline=None)
@given(
    st.lists(coeff, min_size=1, max_size=50),
    st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
)
def test_horner_precision_agreement(coeffs, z):
    # evaluation at twice the precision agrees to roughly working precision
    p = Poly(coeffs)
    with local_precision(256):
        v1 = p(z)
    with local_precision(512):
        v2 = Poly(coeffs)(z)
    assert abs(v1 - v2) <= mpf(2) ** (-220) * (1 + abs(v2))


def test_compose():
    p = Poly([1, 0, 1])  # 1 + z^2
    inner = Poly([0, 2])  # 2z
    c = p.compose(inner)  # 1 + 4 z^2
    assert c.coefficient(2) == 4 and c.degree == 2
