import math
from fractions import Fraction

import pytest
from hypothesis import given

from app.core.exactalg import Scalar
from app.core.exceptions import CapabilityError, DomainError, UnsupportedFieldError
from app.core.localfield import (
    LocalFieldDesc,
    abs_value,
    padic_fractional_part,
    psi_ball_integral,
    psi_ball_riemann_sum,
    psi_exact,
    psi_numeric,
    reduce_mod_lattice,
    residue,
    valuation,
)
from app.core.schwartz import RealSchwartz, SchwartzSpan, fourier, negate_arg, transpose
from tests.conftest import Q, nonzero_fractions


def test_field_descriptors():
    assert str(LocalFieldDesc.padic(Q)) == "Q_5"
    assert str(LocalFieldDesc.real()) == "R"
    with pytest.raises(DomainError):
        LocalFieldDesc.padic(4)
    with pytest.raises(UnsupportedFieldError):
        LocalFieldDesc.real().q


@pytest.mark.parametrize("x,v", [(Fraction(50, 3), 2), (Fraction(3, 25), -2), (7, 0), (0, math.inf)])
def test_valuation(x, v):
    assert valuation(x, Q) == v


@given(nonzero_fractions, nonzero_fractions)
def test_valuation_is_additive(x, y):
    assert valuation(x * y, Q) == valuation(x, Q) + valuation(y, Q)
    assert abs_value(x * y, Q) == abs_value(x, Q) * abs_value(y, Q)


@given(nonzero_fractions)
def test_fractional_part(x):
    frac = padic_fractional_part(x, Q)
    assert 0 <= frac < 1
    assert x == frac or valuation(x - frac, Q) >= 0


def test_fractional_part_examples():
    assert padic_fractional_part(Fraction(1, 10), Q) == Fraction(3, 5)
    assert padic_fractional_part(Fraction(7, 3), Q) == 0
    assert reduce_mod_lattice(Fraction(7), 1, Q) == 2
    assert residue(Fraction(7, 3), Q) == 4


def test_residue_rejects_non_integral():
    with pytest.raises(DomainError):
        residue(Fraction(1, 5), Q)


def test_psi_values():
    assert psi_exact(Fraction(3), Q) == 1
    assert psi_exact(Fraction(1, 2), 2) == -1
    assert psi_exact(Fraction(1, 4), 2) == Scalar.imag_unit()
    with pytest.raises(CapabilityError):
        psi_exact(Fraction(1, 5), Q)
    assert psi_numeric(Fraction(1, 5), Q) == pytest.approx(complex(math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5)))
    assert psi_numeric(Fraction(1, 4)) == pytest.approx(1j)


@pytest.mark.parametrize("c,m", [(1, 0), (Fraction(1, 5), 0), (Fraction(1, 5), 1), (Fraction(2, 25), 1), (0, -1)])
def test_ball_integral_matches_riemann_sum(c, m):
    field = LocalFieldDesc.padic(Q)
    exact = psi_ball_integral(field, c, m).to_complex()
    assert psi_ball_riemann_sum(field, c, m) == pytest.approx(exact, abs=1e-12)


def test_ball_integral_of_unit_lattice():
    assert psi_ball_integral(LocalFieldDesc.padic(Q), 1, 0) == 1


# ---------------------------------------------------------------------------
# Schwartz functions
# ---------------------------------------------------------------------------


def test_unit_lattice_is_self_dual():
    one = SchwartzSpan.lattice(Q, (1, 1))
    assert fourier(one) == one


@pytest.mark.parametrize(
    "phi",
    [
        SchwartzSpan.lattice(Q, (1, 1), depth=1),
        SchwartzSpan.elementary(Q, (1, 1), phase=[Fraction(1, 5)]),
        SchwartzSpan.elementary(Q, (1, 2), depth=1, centre=[Fraction(1, 5), 0]),
    ],
)
def test_fourier_twice_negates(phi):
    assert fourier(fourier(phi)) == negate_arg(phi)
    assert fourier(fourier(phi, conj=True), conj=True) == negate_arg(phi)


def test_fourier_of_small_lattice():
    phi = SchwartzSpan.lattice(Q, (1, 1), depth=1)
    hat = fourier(phi)
    assert hat.evaluate([Fraction(1, 5)]) == Fraction(1, 5)
    assert hat.evaluate([Fraction(1, 25)]) == 0


def test_refinement_preserves_values():
    phi = SchwartzSpan.lattice(Q, (1, 1))
    fine = phi.refine(1)
    assert len(fine.terms) == Q
    assert fine == phi
    for x in (0, 1, Fraction(2, 3), 5):
        assert fine.evaluate([x]) == phi.evaluate([x])


def test_transpose_shape():
    phi = SchwartzSpan.elementary(Q, (1, 2), centre=[1, 0], depth=1)
    t = transpose(phi)
    assert t.shape == (2, 1)
    assert t.evaluate([1, 5]) == phi.evaluate([1, 5]) == 1


def test_real_gaussian_is_self_dual():
    g = RealSchwartz()
    assert complex(g.fourier().coeffs[0]) == pytest.approx(1)


def test_real_fourier_of_first_moment():
    # x exp(-pi x^2) -> i y exp(-pi y^2)
    coeffs = [complex(c) for c in RealSchwartz.gaussian_moment(1).fourier().coeffs]
    assert coeffs[0] == pytest.approx(0)
    assert coeffs[1] == pytest.approx(1j)
    conj = [complex(c) for c in RealSchwartz.gaussian_moment(1).fourier(conj=True).coeffs]
    assert conj[1] == pytest.approx(-1j)
