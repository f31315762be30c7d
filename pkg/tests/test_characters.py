from fractions import Fraction

import pytest
from hypothesis import given

from app.core.characters import (
    CharTuple,
    MultChar,
    char_eval,
    char_monomial,
    check_lengths,
    ex,
    hat_dual,
    real_char,
    sgn_product,
    unr,
)
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import DomainError, UnsupportedFieldError
from app.core.localfield import LocalFieldDesc
from tests.conftest import Q, gaussians, half_integers


def test_char_monomial_of_unramified(field):
    omega = unr(field, 3, Fraction(1, 2))
    # 3^2 q^(-1) Y^4 at the s-shifted character
    assert char_monomial(omega, 2, s_shift=1) == (Scalar(Fraction(9, 5)), 4)
    assert char_eval(omega, Fraction(1, 5)) == RatFun.constant(Scalar(Fraction(1, 3)) * Scalar.r_power(1, Q))


def test_char_eval_rejects_zero_and_reals(field):
    with pytest.raises(DomainError):
        char_eval(unr(field, 2), 0)
    with pytest.raises(UnsupportedFieldError):
        char_eval(real_char(1), 2)


@given(gaussians, gaussians, half_integers)
def test_product_and_inverse(a, b, t):
    field = LocalFieldDesc.padic(Q)
    x, y = unr(field, a, t), unr(field, b)
    assert (x * y).a == a * b
    assert (x * x.inverse()) == unr(field, 1)


def test_ex():
    field = LocalFieldDesc.padic(Q)
    assert ex(unr(field, 1, Fraction(1, 2))) == pytest.approx(0.5)
    assert ex(unr(field, 5)) == pytest.approx(-1.0)
    assert ex(unr(field, Scalar.gaussian(Fraction(3, 5), Fraction(4, 5)))) == pytest.approx(0.0)
    assert ex(real_char(1, Fraction(-1, 2))) == -0.5


def test_validation():
    field = LocalFieldDesc.padic(Q)
    with pytest.raises(DomainError):
        unr(field, 0)
    with pytest.raises(DomainError):
        MultChar(LocalFieldDesc.real(), eps=2)
    with pytest.raises(UnsupportedFieldError):
        unr(LocalFieldDesc.real(), 2)
    with pytest.raises(DomainError):
        CharTuple.of(unr(field, 2), real_char())


def test_sign_multiplies_mod_two():
    assert real_char(1) * real_char(1) == real_char()
    assert real_char(1).at_minus_one() == -1
    assert unr(LocalFieldDesc.padic(Q), 7).at_minus_one() == 1


def test_hat_dual_is_an_involution(field):
    nu = CharTuple.of(unr(field, 2), unr(field, 3, Fraction(1, 2)), unr(field, Scalar.imag_unit()))
    dual = hat_dual(nu)
    assert dual[0] == nu[2].inverse()
    assert hat_dual(dual) == nu


def test_check_lengths():
    check_lengths([1, 2], [1])
    check_lengths([1, 2], [1, 2])
    with pytest.raises(DomainError):
        check_lengths([1, 2, 3], [1])


def test_sgn_product():
    one, sgn = real_char(), real_char(1)
    # only the pair (i, j) = (2, 1) has j < i and i + j <= 3
    assert sgn_product(CharTuple.of(one, sgn, one), CharTuple.of(one, one)) == -1
    assert sgn_product(CharTuple.of(sgn, one, one), CharTuple.of(one, sgn)) == 1
    assert sgn_product(CharTuple.of(one, sgn), CharTuple.of(sgn)) == 1


def test_str_forms(field):
    assert str(unr(field, 2, Fraction(1, 2))) == "unr(2)|.|^1/2"
    assert str(real_char(1)) == "sgn"
    assert str(CharTuple.of(real_char(), real_char(1))) == "(1, sgn)"
