from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.core.exactalg import (
    RatFun,
    Scalar,
    berlekamp_massey,
    parse_scalar,
    recurrence_order,
    sum_geometric_tail,
    sum_recurrent,
)
from app.core.exceptions import AlgebraError, PoleCollisionError, PoleError
from tests.conftest import Q, gaussians, nonzero_fractions

Y = RatFun.variable()


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def test_r_squares_to_q():
    r = Scalar.r_power(1, Q)
    assert r * r == Q
    assert Scalar.q_power(Fraction(-1, 2), Q) * r == 1


def test_q_power_rejects_quarter_exponents():
    with pytest.raises(AlgebraError):
        Scalar.q_power(Fraction(1, 4), Q)


def test_r_part_needs_q():
    with pytest.raises(AlgebraError):
        Scalar(0, 0, 1)


def test_float_does_not_coerce():
    with pytest.raises(AlgebraError):
        Scalar.coerce(1.5j)


@given(gaussians)
def test_inverse(x):
    assert x * x.inverse() == 1


@given(gaussians, gaussians)
def test_conjugate_is_multiplicative(x, y):
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


def test_mixed_r_inverse():
    x = Scalar(1, 2, Fraction(1, 3), -1, q=Q)
    assert x * x.inverse() == 1
    assert complex(x) == pytest.approx(complex(1 + 5 ** 0.5 / 3, 2 - 5 ** 0.5))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("2/3+1/3i", Scalar.gaussian(Fraction(2, 3), Fraction(1, 3))),
        ("-1", Scalar(-1)),
        ("i", Scalar.imag_unit()),
        ("-1/2*r", Scalar(0, 0, Fraction(-1, 2), 0, q=Q)),
        ("3/5+1/5*i*r", Scalar(Fraction(3, 5), 0, 0, Fraction(1, 5), q=Q)),
    ],
)
def test_parse_scalar(text, expected):
    assert parse_scalar(text, Q) == expected


@pytest.mark.parametrize("text", ["", "abc", "2//3", "r"])
def test_parse_scalar_rejects(text):
    with pytest.raises(ValueError):
        parse_scalar(text)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


def test_canonical_form_cancels_common_factors():
    one = RatFun.constant(1)
    f = (one - Y * Y) / (one - Y)
    assert f == one + Y
    assert (Y * 2) / (Y * 2) == 1


def test_denominator_is_monic():
    f = RatFun([1], [2, 4])
    assert f.den[-1] == 1
    assert f == RatFun([Fraction(1, 4)], [Fraction(1, 2), 1])


def test_monomial_with_negative_power():
    f = RatFun.monomial(3, -2)
    assert f * Y * Y == 3
    assert f.as_monomial() == (Scalar(3), -2)


@given(nonzero_fractions, st.integers(min_value=1, max_value=3))
def test_reflect_is_an_involution(a, k):
    one = RatFun.constant(1)
    f = one / (one - RatFun.monomial(a, 2 * k))
    assert f.reflect(Q).reflect(Q) == f


def test_reflect_maps_y_to_its_dual():
    # Y -> q^(-1/2) / Y
    assert Y.reflect(Q) == RatFun.monomial(Scalar.r_power(-1, Q), -1)


def test_substitute_power():
    one = RatFun.constant(1)
    f = one / (one - Y)
    assert f.substitute_power(2) == one / (one - Y * Y)
    with pytest.raises(AlgebraError):
        f.substitute_power(0)


@given(gaussians, gaussians)
@settings(max_examples=50)
def test_field_operations(a, b):
    one = RatFun.constant(1)
    f = one + Y * a
    g = one - RatFun.monomial(b, 2)
    assert (f * g) / g == f
    assert f + g - g == f


def test_evaluate_matches_floats():
    one = RatFun.constant(1)
    f = one / (one - Y * Fraction(1, 2))
    assert f.evaluate(0.5) == pytest.approx(1 / 0.75)
    assert list(f.evaluate_many([0.0, 1.0])) == pytest.approx([1.0, 2.0])


def test_evaluate_at_pole_raises():
    one = RatFun.constant(1)
    f = one / (one - Y)
    with pytest.raises(PoleError) as info:
        f.evaluate(1.0)
    assert info.value.root == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Recurrent sums
# ---------------------------------------------------------------------------


def test_berlekamp_massey_fibonacci():
    fib = [Scalar(1), Scalar(1)]
    while len(fib) < 12:
        fib.append(fib[-1] + fib[-2])
    assert berlekamp_massey(fib, Scalar(1)) == [Scalar(1), Scalar(-1), Scalar(-1)]
    assert recurrence_order(fib, Scalar(1)) == 2


def test_geometric_sum():
    value, order = sum_recurrent(lambda k: Scalar(Fraction(1, 2 ** k)), Scalar(1))
    assert value == 2
    assert order == 1


def test_geometric_sum_of_ratfuns():
    one = RatFun.constant(1)
    value, _ = sum_recurrent(lambda k: RatFun.monomial(1, 2 * k), one)
    assert value == one / (one - Y * Y)


def test_finite_support_sum():
    value, order = sum_recurrent(lambda k: Scalar(3) if k == 2 else Scalar(0), Scalar(1))
    assert value == 3
    assert order == 3


def test_sum_with_pole_at_one():
    with pytest.raises(PoleCollisionError):
        sum_recurrent(lambda k: Scalar(1), Scalar(1))


def _switching(k: int) -> Scalar:
    # ratio 1/2 for ten terms, then ratio 1/3
    return Scalar(Fraction(1, 2**k)) if k < 10 else Scalar(Fraction(1, 3**k))


def test_sum_recurrent_reads_past_a_transient():
    value, order = sum_recurrent(_switching, Scalar(1), order_bound=16)
    assert order == 11
    assert value == Scalar(2 - Fraction(2, 2**10) + Fraction(3, 2 * 3**10))


def test_sum_recurrent_rejects_orders_above_the_bound():
    with pytest.raises(AlgebraError):
        sum_recurrent(_switching, Scalar(1), order_bound=6)


def test_geometric_tail_after_a_head():
    term = lambda k: Scalar(7) if k == 0 else Scalar(Fraction(1, 2**k))
    assert sum_geometric_tail(term, Scalar(1), 1) == 8
    assert sum_geometric_tail(term, Scalar(1), 0) is None


def test_geometric_tail_of_finite_support():
    term = lambda k: Scalar(3) if k < 2 else Scalar(0)
    assert sum_geometric_tail(term, Scalar(1), 2) == 6
    assert sum_geometric_tail(term, Scalar(1), 1) == 6
    assert sum_geometric_tail(term, Scalar(1), 0) is None


def test_geometric_tail_of_ratfuns():
    one = RatFun.constant(1)
    assert sum_geometric_tail(lambda k: RatFun.monomial(1, 2 * k), one, 0) == one / (one - Y * Y)


def test_geometric_tail_with_ratio_one():
    with pytest.raises(PoleCollisionError):
        sum_geometric_tail(lambda k: Scalar(2), Scalar(1), 0)
