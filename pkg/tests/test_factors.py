import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from app.core.characters import CharTuple, real_char, unr
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import DomainError
from app.core.localfield import LocalFieldDesc
from app.services.factors_service import (
    FactorValue,
    RealFactor,
    check_gamma_lemma,
    check_gamma_reflection,
    check_psi_conjugation,
    fe_epsilon,
    gamma_factor,
    gamma_psi,
    local_factors,
    pair_products,
    relative_gap,
    same_factor,
)
from app.services.sampling_service import ParameterSampler
from tests.conftest import Q, gaussians, half_integers

ONE = RatFun.constant(1)


def test_padic_factors_of_unramified(field):
    a = Scalar.gaussian(Fraction(2, 3), Fraction(1, 3))
    factors = local_factors(unr(field, a))
    assert factors.L.exact == ONE / (ONE - RatFun.monomial(a, 2))
    assert factors.epsilon.exact == 1
    # gamma = L(1 - s, omega^-1) / L(s, omega)
    dual = ONE - RatFun.monomial(a.inverse() * Fraction(1, Q), -2)
    assert factors.gamma.exact == (ONE - RatFun.monomial(a, 2)) / dual


def test_twist_enters_the_coefficient(field):
    L = local_factors(unr(field, 3, Fraction(1, 2))).L.exact
    assert L == ONE / (ONE - RatFun.monomial(Scalar(3) * Scalar.r_power(-1, Q), 2))


def test_shifted_characters_are_rejected(field):
    with pytest.raises(DomainError):
        local_factors(unr(field, 2).with_shift(1))


@given(gaussians, half_integers)
@settings(max_examples=60, deadline=None)
def test_padic_gamma_reflection(a, t):
    assert check_gamma_reflection(unr(LocalFieldDesc.padic(Q), a, t)).equal


@pytest.mark.parametrize("eps,t", [(0, 0), (1, 0), (0, Fraction(1, 2)), (1, Fraction(-3, 2)), (1, 2)])
def test_real_gamma_reflection(eps, t):
    result = check_gamma_reflection(real_char(eps, t))
    assert result.equal
    assert result.max_error < 1e-10


def test_real_factors():
    factors = local_factors(real_char(1))
    assert factors.epsilon.archimedean.const == Scalar.imag_unit()
    # L(s, 1) = Gamma_R(s); Gamma_R(2) = 1 / pi
    L = local_factors(real_char()).L
    assert L.evaluate([2.0])[0] == pytest.approx(1 / math.pi)
    # L(s, sgn) = Gamma_R(s + 1); Gamma_R(1) = 1
    assert local_factors(real_char(1)).L.evaluate([0.0])[0] == pytest.approx(1.0)


def test_real_factor_algebra():
    f = RealFactor.build(Scalar(2), [(1, 1, 0), (1, 1, 0), (-1, 1, 0)])
    assert f.terms == ((1, Fraction(1), Fraction(0)),)
    assert (f * f.inverse()).terms == ()
    assert f.reflect().terms == ((1, Fraction(-1), Fraction(1)),)


def test_factor_values_do_not_mix_fields(field):
    with pytest.raises(DomainError):
        FactorValue.one(field) * FactorValue.one(LocalFieldDesc.real())


def test_relative_gap_and_same_factor(field):
    assert relative_gap(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0
    assert relative_gap(np.array([1.1]), np.array([1.0])) == pytest.approx(0.1)
    equal, gap = same_factor(FactorValue.one(field), FactorValue.constant(field, Scalar(1)))
    assert equal and gap is None


def test_pair_products(field, pair_21):
    nu, nu_prime = pair_21
    pairs = pair_products(nu, nu_prime)
    expected = local_factors(nu[0] * nu_prime[0]).L * local_factors(nu[1] * nu_prime[0]).L
    assert pairs.L_pair.exact == expected.exact
    # only (1, 1) has i + j <= 2
    assert gamma_psi(nu, nu_prime).exact == gamma_factor(nu[0] * nu_prime[0]).exact


def test_pair_products_of_empty_tuple(field):
    nu = CharTuple.of(unr(field, 3))
    assert pair_products(nu, CharTuple()).L_pair.exact == 1
    with pytest.raises(DomainError):
        pair_products(CharTuple(), CharTuple())


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", range(4))
def test_padic_gamma_lemma(n, seed):
    sampler = ParameterSampler(seed)
    field = LocalFieldDesc.padic(Q)
    nu = sampler.char_tuple(field, n, twisted=True)
    nu_prime = sampler.char_tuple(field, n - 1, twisted=True)
    assert check_gamma_lemma(nu, nu_prime).equal


def test_real_gamma_lemma():
    nu = CharTuple.of(real_char(1), real_char(0, Fraction(1, 2)), real_char(1, Fraction(-1, 2)))
    nu_prime = CharTuple.of(real_char(1), real_char())
    result = check_gamma_lemma(nu, nu_prime)
    assert result.equal
    assert len(result.s_values) == 5


def test_gamma_lemma_needs_n_minus_one(field):
    with pytest.raises(DomainError):
        check_gamma_lemma(CharTuple.of(unr(field, 2)), CharTuple())


def test_padic_epsilon_from_the_functional_equation(field):
    assert fe_epsilon(unr(field, Scalar.gaussian(1, 2))) == 1
    assert check_psi_conjugation(unr(field, 3, Fraction(1, 2))).equal


@pytest.mark.parametrize("eps,expected", [(0, 1), (1, 1j)])
def test_real_epsilon_from_the_functional_equation(eps, expected):
    values = fe_epsilon(real_char(eps))
    assert values == pytest.approx(np.full(5, expected, dtype=complex), rel=1e-8)


@pytest.mark.parametrize("eps", [0, 1])
def test_real_psi_conjugation(eps):
    assert check_psi_conjugation(real_char(eps)).equal
