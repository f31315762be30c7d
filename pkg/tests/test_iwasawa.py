from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.core import matrices as mx
from app.core.characters import CharTuple, unr
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import AlgebraError, DimensionError
from app.core.iwasawa import (
    Hat,
    iwasawa_decompose,
    reduce_section,
    section_eval,
    spherical,
    spherical_value,
    translate,
)
from app.core.localfield import LocalFieldDesc, valuation
from tests.conftest import Q

entries = st.sampled_from([Fraction(x) * Fraction(Q) ** e for x in range(-3, 4) for e in (-1, 0, 1)])


def matrices(k):
    return st.lists(st.lists(entries, min_size=k, max_size=k), min_size=k, max_size=k).map(mx.mat).filter(
        lambda g: mx.det(g) != 0
    )


def is_lower_triangular(g):
    return all(g[i][j] == 0 for i in range(len(g)) for j in range(i + 1, len(g)))


@given(matrices(3), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_decomposition_round_trip(g, seed):
    factors = iwasawa_decompose(g, Q, np.random.default_rng(seed))
    assert mx.mat_mul(factors.bbar, factors.kappa) == g
    assert is_lower_triangular(factors.bbar)
    assert mx.in_maximal_compact(factors.kappa, Q)


def test_singular_input():
    with pytest.raises(AlgebraError):
        iwasawa_decompose(mx.mat([[1, 1], [1, 1]]), Q)


def test_spherical_is_one_on_k(field):
    chars = CharTuple.of(unr(field, 2), unr(field, Fraction(1, 3)))
    assert spherical_value(field, chars, mx.mat([[1, 3], [2, 5]])) == 1
    assert spherical_value(field, chars, mx.make_w(2)) == 1


def test_spherical_on_the_torus(field):
    a1, a2 = Scalar(2), Scalar(Fraction(1, 3))
    chars = CharTuple.of(unr(field, a1), unr(field, a2))
    r = Scalar.r_power(1, Q)
    # lower Borel: |b_11|^(-1/2) |b_22|^(1/2)
    assert spherical_value(field, chars, mx.diag(Q, 1)) == RatFun.constant(a1 * r)
    assert spherical_value(field, chars, mx.diag(1, Q)) == RatFun.constant(a2 * r.inverse())


@given(matrices(2), matrices(2))
@settings(max_examples=40, deadline=None)
def test_spherical_is_right_k_invariant_and_lower_unipotent_invariant(g, h):
    field = LocalFieldDesc.padic(Q)
    chars = CharTuple.of(unr(field, 3), unr(field, Scalar.gaussian(1, 1)))
    kappa = iwasawa_decompose(h, Q).kappa
    value = spherical_value(field, chars, g)
    assert spherical_value(field, chars, mx.mat_mul(g, kappa)) == value
    lower = mx.mat([[1, 0], [h[0][0], 1]])
    assert spherical_value(field, chars, mx.mat_mul(lower, g)) == value


def test_rank_mismatch(field):
    chars = CharTuple.of(unr(field, 2))
    with pytest.raises(DimensionError):
        spherical_value(field, chars, mx.identity(2))
    with pytest.raises(DimensionError):
        translate(spherical(field, unr(field, 2)), mx.identity(2))


def test_translate_evaluates_at_the_product(field):
    f = spherical(field, unr(field, 2), unr(field, 5))
    h = mx.mat([[Q, 1], [0, 1]])
    g = mx.mat([[1, 0], [Fraction(1, Q), 1]])
    assert section_eval(translate(f, h), g) == section_eval(f, mx.mat_mul(g, h))


def test_reduce_section_of_k_translate(field):
    f = spherical(field, unr(field, 2), unr(field, 5))
    coeff, base = reduce_section(translate(f, mx.mat([[0, 1], [1, 0]])))
    assert coeff == 1
    assert base == f


def test_hat_section(field):
    f = spherical(field, unr(field, 2), unr(field, 5))
    g = mx.diag(Q, 1)
    assert section_eval(Hat(f), g) == section_eval(f, mx.hat_conj(g))
    assert valuation(mx.hat_conj(g)[1][1], Q) == -1
