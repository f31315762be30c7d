from fractions import Fraction

import pytest

from app.core.exactalg import RatFun
from app.core.exceptions import CapabilityError
from app.core.localfield import valuation
from app.services.summation_service import Ball, ExactContext, NumericContext, line_integral, shell_transient
from tests.conftest import Q

Y2 = RatFun.monomial(1, 2)
OFFSET = (Fraction(Q**3), Fraction(1))  # x + p^3


def _offset_power(x: Fraction) -> RatFun:
    return RatFun.monomial(1, 2 * valuation(Fraction(Q**3) + x, Q))


# ---------------------------------------------------------------------------
# Transients along a line
# ---------------------------------------------------------------------------


def test_transient_ends_past_the_crossing():
    # v(p^3 + p^i) = i below 3 and 3 from i = 4 on
    assert shell_transient([OFFSET], Fraction(0), 0, 1, Q) == 4
    assert shell_transient([OFFSET], Fraction(0), 2, 1, Q) == 2


def test_far_rays_start_geometric():
    assert shell_transient([OFFSET], Fraction(0), -1, -1, Q) == 0


def test_transient_of_a_form_vanishing_at_the_centre():
    assert shell_transient([(Fraction(-7), Fraction(1))], Fraction(7), 0, 1, Q) == 0
    assert shell_transient([(Fraction(5),)], Fraction(0), 0, 1, Q) == 0


def test_transient_needs_affine_forms():
    with pytest.raises(CapabilityError):
        shell_transient([(Fraction(0), Fraction(0), Fraction(1))], Fraction(0), 0, 1, Q)


# ---------------------------------------------------------------------------
# Line integrals with a transient
# ---------------------------------------------------------------------------


def _expected() -> RatFun:
    head = sum((Y2**i * Fraction(1, Q**i) for i in range(3)), RatFun.constant(0))
    return head * Fraction(Q - 1, Q) + Y2**3 * Fraction(1, Q**3)


def test_exact_ray_sums_head_and_tail(field):
    ctx = ExactContext(field)
    value = line_integral(ctx, _offset_power, [Fraction(0)], Ball(Fraction(0), 0), forms=[OFFSET])
    assert value == _expected()
    assert ctx.rays == 1


def test_exact_ray_without_forms_agrees(field):
    ctx = ExactContext(field)
    value = line_integral(ctx, _offset_power, [Fraction(0)], Ball(Fraction(0), 0))
    assert value == _expected()


def test_numeric_ray_agrees(field):
    points = [0.5, 1.0 + 2j]
    ctx = NumericContext(field, points, cutoff=60)
    value = line_integral(ctx, _offset_power, [Fraction(0)], Ball(Fraction(0), 0), forms=[OFFSET])
    assert value == pytest.approx(_expected().evaluate_many(ctx.ys), rel=1e-10)
