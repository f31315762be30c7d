"""Direct numeric oracle: valuation boxes with ball subdivision

The integrands of the Tate and open-orbit integrals are evaluated pointwise (phi,
sections, characters) at the centres of balls. A ball is split into its q children
while their samples disagree, down to a fixed depth, and the shells of a valuation
box [-N, N]^d are added in a fixed order. Nothing here goes through the shell
stratification of the exact engine, so agreement with it is a genuine cross-check.

Rankin-Selberg integrals are summed directly over a box of the diagonal torus from
pointwise Whittaker values, without the geometric tails of the exact engine.
"""

import logging
import warnings
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, char_monomial
from app.core.exceptions import CapabilityError, DimensionError, DivergenceWarning, DomainError
from app.core.exactalg import RatFun
from app.core.iwasawa import SectionExpr, reduce_section, section_eval
from app.core.localfield import LocalFieldDesc, finite_valuation
from app.core.models import RSCase
from app.core.schwartz import SchwartzSpan
from app.services.integrals_service import IntegralResult, jacquet_whittaker, lambda_open_orbit, rs_Z, tate_zeta, whittaker_torus

logger = logging.getLogger(__name__)

Sampler = Callable[[Fraction], np.ndarray]


# ---------------------------------------------------------------------------
# Balls and shells
# ---------------------------------------------------------------------------


def ball_integral(f: Sampler, centre: Fraction, radius: int, floor: int, p: int) -> np.ndarray:
    """dx-integral of f over centre + p^radius O.

    The q children are sampled at their centres; a ball whose samples all agree is
    taken as constant, any other is split, down to children of radius ``floor``.
    """
    q = Fraction(p)
    step = q**radius
    children = [centre + a * step for a in range(p)]
    samples = [f(c) for c in children]
    if radius + 1 >= floor or all(np.array_equal(samples[0], s) for s in samples[1:]):
        return float(q ** (-radius - 1)) * sum(samples)
    return sum(ball_integral(f, c, radius + 1, floor, p) for c in children)


def unit_shell(f: Sampler, level: int, floor: int, p: int) -> np.ndarray:
    """d^x-integral of f over {h : v(h) = level}, with d^x h = dx / |h|."""
    q = Fraction(p)
    total = sum(ball_integral(f, a * q**level, level + 1, floor, p) for a in range(1, p))
    return float(q**level) * total


def _first_positive(profile: Sequence[float]) -> float:
    return next((x for x in profile if x > 0), 0.0)


def box_sum(
    field: LocalFieldDesc,
    f: Sampler,
    s_values: np.ndarray,
    cutoff: int,
) -> IntegralResult:
    """Integral of f over k^x against d^x h, truncated to the box -N <= v(h) <= N.

    Emits DivergenceWarning when the outermost level of the box outweighs the first
    nonzero one.
    """
    p = field.q
    shells = {m: unit_shell(f, m, m + 1 + cutoff, p) for m in range(-cutoff, cutoff + 1)}
    total = np.zeros(len(s_values), dtype=complex)
    for m in sorted(shells, key=lambda m: (abs(m), m)):
        total = total + shells[m]
    profile = [float(np.max(np.abs(shells[m]))) + (float(np.max(np.abs(shells[-m]))) if m else 0.0) for m in range(cutoff + 1)]
    return _result(total, s_values, cutoff, profile)


def _result(total: np.ndarray, s_values: np.ndarray, cutoff: int, profile: List[float]) -> IntegralResult:
    result = IntegralResult(numeric=total, s_values=s_values, cutoff=cutoff, tail=profile[-1], profile=profile)
    first = _first_positive(profile)
    if len(profile) > 1 and first > 0 and profile[-1] > first:
        result.diverged = True
        logger.warning(f"box sum grows from {first:.3g} to {profile[-1]:.3g}")
        warnings.warn(DivergenceWarning(f"box shells grow from {first:.3g} to {profile[-1]:.3g}", profile))
    return result


# ---------------------------------------------------------------------------
# Pointwise integrands
# ---------------------------------------------------------------------------


def _ys(q: int, s_values: np.ndarray) -> np.ndarray:
    return np.power(float(q), -s_values / 2)


def _char(omega: MultChar, v: int, ys: np.ndarray) -> np.ndarray:
    c, k = char_monomial(omega, v)
    return complex(c) * ys**k


def _abs_power(q: int, v: int, offset: Fraction, reflect_s: bool, ys: np.ndarray) -> np.ndarray:
    """|h|^(s + offset), or |h|^(1 - s + offset), at v(h) = v."""
    if reflect_s:
        return float(Fraction(q) ** (-v * (1 + offset))) * ys ** (-2 * v)
    return float(Fraction(q) ** (-v * offset)) * ys ** (2 * v)


def _section(f: SectionExpr, g: mx.Matrix, ys: np.ndarray) -> np.ndarray:
    return section_eval(f, g).evaluate_many(ys)


def _cutoff(cutoff: Optional[int]) -> int:
    cutoff = cutoff or settings.NUMERIC_CUTOFF
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    return cutoff


def box_tate(omega: MultChar, phi: SchwartzSpan, s_values: Sequence[complex], cutoff: Optional[int] = None) -> IntegralResult:
    """Z(s, omega, phi) over a p-adic field by box enumeration."""
    field = omega.field
    field.require_padic()
    if phi.shape != (1, 1):
        raise DimensionError(f"Tate integrals need a function on k, got shape {phi.shape}")
    s = np.atleast_1d(np.asarray(s_values, dtype=complex))
    ys = _ys(field.q, s)
    shifted = omega.with_shift(1)

    def integrand(x: Fraction) -> np.ndarray:
        return phi.evaluate_numeric([x]) * _char(shifted, finite_valuation(x, field.q), ys)

    return box_sum(field, integrand, s, _cutoff(cutoff))


def box_lambda(
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan] = None,
    reflect_s: bool = False,
    s_values: Sequence[complex] = (),
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Lambda(s, f, f'[, phi]) by box enumeration, from the defining integrand.

    The (n, n - 1) integrals run over G_1 up to n = 2; the (n, n) integrals over G_1
    and, for right-K-invariant data, over G_2.

    Raises:
        CapabilityError: no box enumeration for this case and rank
    """
    case = RSCase(case)
    n = f.rank
    field = f.field
    field.require_padic()
    q = field.q
    s = np.atleast_1d(np.asarray(s_values, dtype=complex))
    ys = _ys(q, s)
    if case == RSCase.NNM1 and n == 1:
        value = _section(f, mx.make_z(1), ys) * _section(f_prime, (), ys)
        return IntegralResult(numeric=value, s_values=s, cutoff=_cutoff(cutoff), tail=0.0, profile=[0.0])
    if case == RSCase.NN and n == 1:
        if phi is None:
            raise DomainError("the n' = n integrals need a Schwartz function")

        def integrand(h: Fraction) -> np.ndarray:
            v = finite_valuation(h, q)
            g = ((h,),)
            values = _section(f, mx.mat_mul(mx.make_z(1), g), ys) * _section(f_prime, g, ys)
            return values * phi.evaluate_numeric([h]) * _abs_power(q, v, Fraction(0), reflect_s, ys)

        return box_sum(field, integrand, s, _cutoff(cutoff))
    if case == RSCase.NNM1 and n == 2:

        def integrand(h: Fraction) -> np.ndarray:
            v = finite_valuation(h, q)
            g = ((h,),)
            values = _section(f, mx.mat_mul(mx.make_z(2), mx.embed(g)), ys) * _section(f_prime, mx.mat_mul(mx.make_z(1), g), ys)
            return values * _abs_power(q, v, Fraction(-1, 2), reflect_s, ys)

        return box_sum(field, integrand, s, _cutoff(cutoff))
    if case == RSCase.NN and n == 2:
        return _box_gl2(f, f_prime, phi, reflect_s, s, _cutoff(cutoff))
    raise CapabilityError(f"no box enumeration for case {case.value} at n = {n}")


def _require_invariant(f: SectionExpr) -> Tuple[RatFun, CharTuple]:
    reduced = reduce_section(f)
    if reduced is None:
        raise CapabilityError("box sums over G/K need right-K-invariant sections")
    return reduced[0], reduced[1].chars


def _levels_result(levels: List[np.ndarray], scale: np.ndarray, s: np.ndarray, cutoff: int) -> IntegralResult:
    total = scale * sum(levels)
    profile = [float(np.max(np.abs(scale * level))) for level in levels]
    return _result(total, s, cutoff, profile)


def _box_gl2(
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan],
    reflect_s: bool,
    s: np.ndarray,
    cutoff: int,
) -> IntegralResult:
    """Lambda over G_2 for right-K-invariant data, summed over the cosets [[p^m1, 0], [x, p^m2]] K.

    Each coset has volume vol(K); for fixed (m1, m2) the cosets are x in k / p^m2 O, so
    their sum is q^m2 times the dx-integral over x, which is exact on balls of radius m2.
    Levels are max(|m1|, |m2|) <= N.
    """
    if phi is None:
        raise DomainError("the n' = n integrals need a Schwartz function")
    _require_invariant(f)
    _require_invariant(f_prime)
    if not phi.is_lattice_combination():
        raise CapabilityError("box sums over G/K need phi to be a combination of lattice indicators")
    field = f.field
    p = field.q
    q = Fraction(p)
    ys = _ys(p, s)
    z = mx.make_z(2)
    levels = [np.zeros(len(s), dtype=complex) for _ in range(cutoff + 1)]
    if phi.terms:
        low = max(-cutoff, min(t.depth for t in phi.terms))
        for m1 in range(-cutoff, cutoff + 1):
            for m2 in range(low, cutoff + 1):
                weight = _abs_power(p, m1 + m2, Fraction(0), reflect_s, ys)

                def integrand(x: Fraction, m1=m1, m2=m2) -> np.ndarray:
                    g = mx.mat([[q**m1, 0], [x, q**m2]])
                    values = _section(f, mx.mat_mul(z, g), ys) * _section(f_prime, g, ys)
                    return values * phi.evaluate_numeric([x, q**m2])

                if m2 > low:
                    mass = ball_integral(integrand, Fraction(0), low, m2, p)
                else:
                    mass = float(q ** (-low)) * integrand(Fraction(0))
                levels[max(abs(m1), abs(m2))] += float(q**m2) * mass * weight
    vol = float((1 - 1 / q) * (1 - 1 / q**2))
    logger.debug(f"GL_2 box over {2 * cutoff + 1} diagonal valuations on Q_{p}")
    return _levels_result(levels, np.full(len(s), vol, dtype=complex), s, cutoff)


def box_z(
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan] = None,
    s_values: Sequence[complex] = (),
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Z(s, W_f, W_f'[, phi]) as a truncated torus sum of Whittaker values, n <= 2.

    At n = 1 the Whittaker functions are the sections themselves.

    Raises:
        CapabilityError: n >= 3, or sections that are not right-K-invariant
    """
    case = RSCase(case)
    n = f.rank
    if n > 2:
        raise CapabilityError(f"no torus box at n = {n}")
    field = f.field
    field.require_padic()
    p = field.q
    q = Fraction(p)
    cutoff = _cutoff(cutoff)
    s = np.atleast_1d(np.asarray(s_values, dtype=complex))
    ys = _ys(p, s)
    if case == RSCase.NNM1 and n == 1:
        value = _section(f, mx.identity(1), ys) * _section(f_prime, (), ys)
        return IntegralResult(numeric=value, s_values=s, cutoff=cutoff, tail=0.0, profile=[0.0])
    if phi is None and case == RSCase.NN:
        raise DomainError("the n' = n integrals need a Schwartz function")
    if n == 1:

        def integrand(h: Fraction) -> np.ndarray:
            g = ((h,),)
            values = _section(f, g, ys) * _section(f_prime, g, ys)
            return values * phi.evaluate_numeric([h]) * _abs_power(p, finite_valuation(h, p), Fraction(0), False, ys)

        return box_sum(field, integrand, s, cutoff)
    c, nu = _require_invariant(f)
    c_prime, nu_prime = _require_invariant(f_prime)
    const = (c * c_prime).evaluate_many(ys)
    levels = [np.zeros(len(s), dtype=complex) for _ in range(cutoff + 1)]
    if case == RSCase.NNM1:
        for m in range(cutoff + 1):
            w = jacquet_whittaker(nu, m) * RatFun.monomial(*char_monomial(nu_prime[0], m))
            levels[m] += w.evaluate_many(ys) * _abs_power(p, m, Fraction(-1, 2), False, ys)
        return _levels_result(levels, float(1 - 1 / q) * const, s, cutoff)
    # N\G / K is the torus a = diag(p^(j + m2), p^m2), j >= 0, with weight delta_B(a)^-1 = q^j
    low = max(-cutoff, min((t.depth for t in phi.terms), default=cutoff + 1))
    for j in range(cutoff + 1):
        for m2 in range(low, cutoff + 1):
            mass = phi.evaluate_numeric([0, q**m2])
            if mass == 0:
                continue
            w = whittaker_torus(nu, j + m2, m2) * whittaker_torus(nu_prime, j + m2, m2)
            weight = float(q**j) * _abs_power(p, j + 2 * m2, Fraction(0), False, ys)
            levels[max(j, abs(m2))] += mass * w.evaluate_many(ys) * weight
    vol = float((1 - 1 / q) * (1 - 1 / q**2))
    return _levels_result(levels, vol * const, s, cutoff)


def truncated_numeric(integral: Callable[..., IntegralResult], *args, s_values, cutoff: Optional[int] = None, **kwargs) -> IntegralResult:
    """Independent numeric value of a Tate, Rankin-Selberg or open-orbit integral at ``s_values``.

    Raises:
        CapabilityError: no box enumeration for this integral or these sections
    """
    if integral is tate_zeta:
        return box_tate(*args, s_values=s_values, cutoff=cutoff, **kwargs)
    if integral is lambda_open_orbit:
        return box_lambda(*args, s_values=s_values, cutoff=cutoff, **kwargs)
    if integral is rs_Z:
        return box_z(*args, s_values=s_values, cutoff=cutoff, **kwargs)
    raise CapabilityError(f"no box enumeration for {getattr(integral, '__name__', integral)}")


# ---------------------------------------------------------------------------
# Lower-Borel Tate integrals
# ---------------------------------------------------------------------------


def bbar_tate_box(
    field: LocalFieldDesc,
    exponents: Sequence[float],
    cutoff: Optional[int] = None,
    phi: Optional[SchwartzSpan] = None,
) -> Tuple[bool, List[float]]:
    """Shell sums of the integral over B-bar of phi(b) prod |b_ii|^(e_i), b = t n, k <= 2.

    t = diag(p^m_i) runs over the box 0 <= m_i <= N, N = BBAR_BOX unless given (phi
    defaults to the indicator of M_k(O)); the lower entry of n is integrated over balls
    from p^-(N+2) O with phi sampled at their centres. Returns (bounded, profile), the
    profile holding the mass of each level max(m_i) = m; the sums are bounded when the
    outermost level is below the one before it.

    Raises:
        DomainError: more than two diagonal coordinates
    """
    k = len(exponents)
    if k not in (1, 2):
        raise DomainError(f"lower-Borel box sums run at k = 1 or 2, got {k}")
    p = field.q
    q = Fraction(p)
    cutoff = max(2, cutoff or settings.BBAR_BOX)
    phi = phi if phi is not None else SchwartzSpan.lattice(p, (k, k))
    if phi.shape != (k, k):
        raise DimensionError(f"phi of shape {phi.shape} on {k}x{k} matrices")
    vol = (1 - 1 / q) ** k
    levels = [0.0] * (cutoff + 1)
    floor = cutoff + 3

    def weight(ms: Tuple[int, ...]) -> float:
        out = float(vol)
        for e, m in zip(exponents, ms):
            out *= float(p) ** (-m * e)
        return out

    for ms in np.ndindex(*([cutoff + 1] * k)):
        ms = tuple(int(m) for m in ms)
        if k == 1:
            mass = phi.evaluate_numeric([q ** ms[0]]).real
        else:
            m1, m2 = ms

            def row(x: Fraction, m1=m1, m2=m2) -> np.ndarray:
                b = (q**m1, Fraction(0), q**m2 * x, q**m2)
                return np.array([phi.evaluate_numeric(b)])

            mass = ball_integral(row, Fraction(0), -(cutoff + 2), floor, p)[0].real
        levels[max(ms)] += weight(ms) * abs(mass)
    bounded = bool(levels[-1] < levels[-2])
    logger.debug(f"lower-Borel box {list(exponents)}: bounded={bounded}, last level {levels[-1]:.3g}")
    return bounded, levels
