"""Shared fixtures"""

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from app.core.characters import CharTuple, unr
from app.core.exactalg import Scalar
from app.core.localfield import LocalFieldDesc
from app.services.sampling_service import ParameterSampler

Q = 5


@pytest.fixture
def field():
    return LocalFieldDesc.padic(Q)


@pytest.fixture
def real_field():
    return LocalFieldDesc.real()


@pytest.fixture
def sampler():
    return ParameterSampler(seed=1234)


@pytest.fixture
def pair_21(field):
    """A fixed (2, 1) pair with Gaussian-rational Satake parameters."""
    nu = CharTuple.of(unr(field, Scalar.gaussian(Fraction(2, 3), Fraction(1, 3))), unr(field, Fraction(-3, 7)))
    nu_prime = CharTuple.of(unr(field, Fraction(5, 4)))
    return nu, nu_prime


small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_fractions = small_fractions.filter(lambda x: x != 0)
gaussians = st.builds(Scalar.gaussian, small_fractions, small_fractions).filter(lambda s: not s.is_zero())
half_integers = st.integers(min_value=-4, max_value=4).map(lambda k: Fraction(k, 2))
