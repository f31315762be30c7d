from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.core import matrices as mx
from app.core.exceptions import AlgebraError, DimensionError, DomainError
from app.core.localfield import valuation
from tests.conftest import Q

entries = st.integers(min_value=-30, max_value=30).map(Fraction)
square2 = st.lists(st.lists(entries, min_size=2, max_size=2), min_size=2, max_size=2).map(mx.mat).filter(
    lambda g: mx.det(g) != 0
)


def test_small_z():
    assert mx.make_z(1) == mx.mat([[1]])
    assert mx.make_z(2) == mx.mat([[1, 1], [0, 1]])
    assert mx.make_z(3) == mx.mat([[1, 2, 1], [0, 1, 0], [0, 0, 1]])
    assert mx.make_z(0) == ()


@pytest.mark.parametrize("k", range(2, 9))
def test_z_is_unimodular_and_recursive(k):
    z = mx.make_z(k)
    assert mx.det(z) in (1, -1)
    assert mx.in_maximal_compact(z, Q)
    first, second, third = mx.z_recursion_factors(k)
    assert mx.mat_mul(mx.mat_mul(first, second), third) == z


def test_negative_sizes():
    with pytest.raises(DomainError):
        mx.make_z(-1)
    with pytest.raises(DomainError):
        mx.make_w(-2)
    with pytest.raises(DomainError):
        mx.z_recursion_factors(1)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_w_is_an_involution(k):
    w = mx.make_w(k)
    assert mx.mat_mul(w, w) == mx.identity(k)


@given(square2, square2)
def test_hat_conj_is_a_homomorphism(g, h):
    assert mx.hat_conj(mx.mat_mul(g, h)) == mx.mat_mul(mx.hat_conj(g), mx.hat_conj(h))
    assert mx.hat_conj(mx.hat_conj(g)) == g
    assert mx.iota(mx.iota(g)) == g


@given(square2)
def test_inverse(g):
    assert mx.mat_mul(g, mx.inverse(g)) == mx.identity(2)


def test_singular_and_ragged():
    with pytest.raises(AlgebraError):
        mx.inverse(mx.mat([[1, 2], [2, 4]]))
    with pytest.raises(DimensionError):
        mx.mat([[1, 2], [3]])
    with pytest.raises(DimensionError):
        mx.mat_mul(mx.identity(2), mx.identity(3))


@given(square2)
@settings(max_examples=60)
def test_smith_form(g):
    k1, d, k2 = mx.smith_form(g, Q)
    assert mx.mat_mul(mx.mat_mul(k1, d), k2) == g
    assert mx.in_maximal_compact(k1, Q) and mx.in_maximal_compact(k2, Q)
    assert d[0][1] == d[1][0] == 0
    assert valuation(d[0][0], Q) <= valuation(d[1][1], Q)


def test_block_helpers():
    h = mx.mat([[2]])
    assert mx.embed(h) == mx.diag(2, 1)
    assert mx.e_row(3) == ((0, 0, 1),)
    assert mx.block_diag(mx.identity(1), mx.mat([[0, 1], [1, 0]])) == mx.mat([[1, 0, 0], [0, 0, 1], [0, 1, 0]])


def test_gamma0_cosets():
    reps = mx.gamma0_coset_reps(1, Q)
    assert len(reps) == Q + 1
    assert all(mx.in_maximal_compact(g, Q) for g in reps)
