"""Integral engine: Tate zeta, Whittaker values, Godement sections, Z and Lambda

Integrals are computed by valuation-shell summation through a summation context
(see ``summation_service``): exact mode yields RatFuns in Y = q^(-s/2), numeric
mode truncates the same shells at a cutoff and evaluates at given s values.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from app.config import settings
from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, char_monomial, check_lengths, ex
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import AlgebraError, CapabilityError, DimensionError, DivergenceError, DivergenceWarning, DomainError
from app.core.iwasawa import (
    GodementCirc,
    GodementPlus,
    RightTranslate,
    SectionExpr,
    SphericalBase,
    reduce_section,
    section_eval,
    spherical_value,
)
from app.core.localfield import LocalFieldDesc, finite_valuation, psi_ball_integral, valuation
from app.core.models import Mode, RSCase
from app.core.schwartz import RealSchwartz, SchwartzElem, SchwartzSpan
from app.services.summation_service import (
    Context,
    DetChar,
    ExactContext,
    Integrand,
    NumericContext,
    SchwartzAt,
    SectionAt,
    g1_integral,
    g2_integral,
    reduce_factor,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Results and the convergence strip
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StripInterval:
    """{s : lower < Re(s) < upper}"""

    lower: float
    upper: float

    @property
    def is_empty(self) -> bool:
        return self.lower >= self.upper

    def contains(self, s: complex) -> bool:
        return self.lower < complex(s).real < self.upper

    def interior_points(self, count: int) -> List[float]:
        """``count`` real points strictly inside the strip."""
        if self.is_empty or count < 1:
            return []
        lo = self.lower if math.isfinite(self.lower) else min(self.upper, 0.0) - 2.0
        hi = self.upper if math.isfinite(self.upper) else max(self.lower, 0.0) + 2.0
        step = (hi - lo) / (count + 1)
        return [lo + step * (k + 1) for k in range(count)]


def omega_strip(nu: CharTuple, nu_prime: CharTuple) -> StripInterval:
    """Strip of absolute convergence of the open-orbit integrals."""
    check_lengths(nu, nu_prime)
    n = len(nu)
    lower, upper = -math.inf, math.inf
    for i in range(1, n + 1):
        for j in range(1, len(nu_prime) + 1):
            e = ex(nu[i - 1]) + ex(nu_prime[j - 1])
            if i + j <= n:
                upper = min(upper, 1 - e)
            else:
                lower = max(lower, -e)
    return StripInterval(lower, upper)


@dataclass
class IntegralResult:
    """An exact RatFun, or numeric values at s_values with the cutoff and last-shell size"""

    exact: Optional[RatFun] = None
    numeric: Optional[np.ndarray] = None
    s_values: Optional[np.ndarray] = None
    cutoff: Optional[int] = None
    tail: Optional[float] = None
    diverged: bool = False
    profile: List[float] = dc_field(default_factory=list)

    @property
    def mode(self) -> Mode:
        return Mode.EXACT if self.exact is not None else Mode.NUMERIC

    def values_at(self, q: int, s_values: Sequence[complex]) -> np.ndarray:
        if self.exact is not None:
            s = np.asarray(s_values, dtype=complex)
            return self.exact.evaluate_many(np.power(float(q), -s / 2))
        return self.numeric


def run_integral(
    field: LocalFieldDesc,
    compute: Callable[[Context], object],
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Run ``compute`` in an exact or numeric summation context."""
    mode = Mode(mode)
    if mode == Mode.EXACT:
        ctx = ExactContext(field)
        return IntegralResult(exact=ctx.lift(compute(ctx)))
    if s_values is None:
        raise DomainError("numeric mode needs s values")
    ctx = NumericContext(field, s_values, cutoff)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DivergenceWarning)
        value = ctx.lift(compute(ctx))
    divergent = [w.message for w in caught if isinstance(w.message, DivergenceWarning)]
    for w in caught:
        if not isinstance(w.message, DivergenceWarning):
            warnings.warn(w.message)
    result = IntegralResult(numeric=value, s_values=ctx.s_values, cutoff=ctx.cutoff, tail=ctx.tail)
    if divergent:
        result.diverged = True
        result.profile = divergent[0].profile
        logger.warning(f"numeric integral diverges: {divergent[0]}")
        warnings.warn(divergent[0])
    return result


# ---------------------------------------------------------------------------
# Tate zeta integrals
# ---------------------------------------------------------------------------


def _char_value(ctx: Context, omega: MultChar, v: int):
    c, k = char_monomial(omega, v)
    return ctx.monomial(c, k)


def mellin(ctx: Context, omega: MultChar, phi: SchwartzSpan):
    """Integral of phi(x) omega(x) d^x x over k^x, omega possibly s-shifted."""
    if phi.shape != (1, 1):
        raise DimensionError(f"Mellin transform needs a function on k, got shape {phi.shape}")
    q = ctx.q
    total = ctx.zero()
    for t in phi.terms:
        (c,), (d,), m = t.phase, t.centre, t.depth
        weight = ctx.const(t.coeff)
        if t.twist:
            weight = weight * ctx.psi(t.twist)
        if d != 0:
            # constant valuation v(d) < m on the ball; psi(c.) integrates to zero unless v(c) >= -m
            if c != 0 and finite_valuation(c, q) < -m:
                continue
            v = finite_valuation(d, q)
            if c != 0:
                weight = weight * ctx.psi(c * d)
            total = total + weight * ctx.const(Fraction(q) ** (v - m)) * _char_value(ctx, omega, v)
            continue
        top = -finite_valuation(c, q) if c != 0 else None
        shell = ctx.const(1 - Fraction(1, q))
        if top is not None and top - 1 >= m:
            total = total + weight * ctx.const(Fraction(-1, q)) * _char_value(ctx, omega, top - 1)
        start = max(m, top) if top is not None else m
        total = total + weight * ctx.ray(lambda i, start=start: shell * _char_value(ctx, omega, start + i), transient=0)
    return total


def tate_zeta(
    omega: MultChar,
    phi: SchwartzSpan,
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Z(s, omega, phi) = integral of phi(x) omega(x) |x|^s d^x x over a p-adic field."""
    return run_integral(omega.field, lambda ctx: mellin(ctx, omega.with_shift(1), phi), mode, s_values, cutoff)


def tate_zeta_real(omega: MultChar, phi: RealSchwartz, s: complex) -> mpmath.mpc:
    """Z(s, sgn^eps |.|^t, phi) over R from Gaussian moments.

    Only the x^k e^(-pi x^2) terms with k = eps mod 2 survive, each contributing
    pi^(-a/2) Gamma(a/2) with a = s + t + k.

    Raises:
        DivergenceError: Re(s) + t + (lowest degree of the matching parity) <= 0
    """
    if omega.field.is_padic:
        raise DomainError("real Tate integrals need a real character")
    lowest = phi.lowest_degree(omega.eps)
    if lowest is None:
        return mpmath.mpc(0)
    if complex(s).real + float(omega.t) + lowest <= 0:
        raise DivergenceError(f"Tate integral diverges at s={s} for {omega}")
    with mpmath.workdps(settings.MPMATH_DPS):
        base = mpmath.mpc(s) + mpmath.mpf(omega.t.numerator) / omega.t.denominator
        total = mpmath.mpc(0)
        for k in range(lowest, len(phi.coeffs), 2):
            if phi.coeffs[k] != 0:
                half = (base + k) / 2
                total += phi.coeffs[k] * mpmath.power(mpmath.pi, -half) * mpmath.gamma(half)
        return +total


# ---------------------------------------------------------------------------
# Whittaker values
# ---------------------------------------------------------------------------


def jacquet_whittaker(nu: CharTuple, m: int) -> RatFun:
    """W(diag(p^m, 1)) for the spherical vector of I_nu, nu of length 2.

    The Jacquet integral is summed over the valuation shells of u. On v(u) >= m the
    integrand is nu_1(p^m) q^(m/2), on v(u) = j < m it is nu_1(p^j) nu_2(p^(m-j)) q^(j - m/2);
    each piece is weighted by the integral of psi over it. Shells below v(u) = -1 carry
    no psi-mass, and for m < 0 the pieces cancel.

    Raises:
        AlgebraError: the shells of a negative m fail to cancel
    """
    if len(nu) != 2:
        raise CapabilityError("exact Jacquet integrals are available at rank 2 only")
    field = nu[0].field
    q = field.q

    def value(j: int) -> RatFun:
        c0, k0 = char_monomial(nu[0], j)
        c1, k1 = char_monomial(nu[1], m - j)
        return RatFun.monomial(c0 * c1 * Scalar.q_power(Fraction(2 * j - m, 2), q), k0 + k1)

    total = value(m) * psi_ball_integral(field, 1, m)
    for j in range(min(m, -1) - 1, m):
        shell = psi_ball_integral(field, 1, j) - psi_ball_integral(field, 1, j + 1)
        if not shell.is_zero():
            total = total + value(j) * shell
    if m < 0 and not total.is_zero():
        raise AlgebraError(f"Whittaker shells at m={m} sum to {total}, not zero")
    return total


def whittaker_torus(nu: CharTuple, m1: int, m2: int) -> RatFun:
    """W(diag(p^m1, p^m2)) = omega_nu(p^m2) W(diag(p^(m1-m2), 1)) at rank 2."""
    central = RatFun.monomial(*char_monomial(nu[0] * nu[1], m2))
    return central * jacquet_whittaker(nu, m1 - m2)


def _complete_homogeneous(values: List[RatFun], degree: int) -> RatFun:
    h = [RatFun.constant(1)] + [RatFun.constant(0)] * degree
    for a in values:
        for r in range(1, degree + 1):
            h[r] = h[r] + a * h[r - 1]
    return h[degree]


def _rat_det(rows: List[List[RatFun]]) -> RatFun:
    if len(rows) == 1:
        return rows[0][0]
    total = RatFun.constant(0)
    for j, entry in enumerate(rows[0]):
        if entry:
            minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
            term = entry * _rat_det(minor)
            total = total + term if j % 2 == 0 else total - term
    return total


def casselman_shalika(nu: CharTuple, lam: Sequence[int]) -> RatFun:
    """W(diag(p^lam)) = prod_{i<j}(1 - q^-1 a_j/a_i) delta^(1/2)(p^lam) s_lam(a); zero off the dominant cone."""
    k = len(nu)
    if len(lam) != k:
        raise DimensionError(f"weight of length {len(lam)} for a rank-{k} tuple")
    if k == 0:
        return RatFun.constant(1)
    if any(lam[i] < lam[i + 1] for i in range(k - 1)):
        return RatFun.constant(0)
    q = nu[0].field.q
    a = [RatFun.monomial(*char_monomial(omega, 1)) for omega in nu]
    out = RatFun.constant(1)
    for i in range(k):
        for j in range(i + 1, k):
            out = out * (RatFun.constant(1) - RatFun.monomial(*char_monomial(nu[j] * nu[i].inverse(), 1)) * Fraction(1, q))
    spread = sum(lam[i] - lam[j] for i in range(k) for j in range(i + 1, k))
    out = out * Scalar.q_power(Fraction(-spread, 2), q)
    for omega in nu:
        out = out * RatFun.monomial(*char_monomial(omega, lam[-1]))
    mu = [x - lam[-1] for x in lam]
    jt = [[_complete_homogeneous(a, mu[i] - i + j) if mu[i] - i + j >= 0 else RatFun.constant(0) for j in range(k)] for i in range(k)]
    return out * _rat_det(jt)


# ---------------------------------------------------------------------------
# Godement sections
# ---------------------------------------------------------------------------


def pullback_row(phi: SchwartzSpan, row: Sequence[Fraction]) -> SchwartzSpan:
    """t -> phi(t * row) as a function on k."""
    p = phi.p
    out: List[SchwartzElem] = []
    for term in phi.terms:
        centre, radius, empty = None, None, False
        for d, r in zip(term.centre, row):
            if r == 0:
                if valuation(d, p) < term.depth:
                    empty = True
                continue
            ball = (d / r, term.depth - finite_valuation(r, p))
            if centre is None:
                centre, radius = ball
            elif valuation(ball[0] - centre, p) >= min(ball[1], radius):
                if ball[1] > radius:
                    centre, radius = ball
            else:
                empty = True
        if empty or centre is None:
            continue
        phase = sum((c * r for c, r in zip(term.phase, row)), Fraction(0))
        out.append(SchwartzElem((1, 1), (phase,), (centre,), radius, term.twist, term.coeff))
    return SchwartzSpan.build(p, (1, 1), out)


def godement_hypotheses(node: SectionExpr) -> bool:
    """Absolute-convergence hypotheses of a Godement node (s-shifts ignored)."""
    if isinstance(node, GodementPlus):
        return all(ex(node.chi) > ex(omega) - 1 for omega in node.child.chars)
    if isinstance(node, GodementCirc):
        return all(ex(node.chi) > -ex(omega) for omega in node.child.chars)
    return True


def _godement_rank1_base(node: SectionExpr) -> RatFun:
    ctx = ExactContext(node.field)
    if isinstance(node, GodementPlus):
        return section_eval(node.child, ()) * node.phi.evaluate(())
    base = section_eval(node.child, mx.identity(1))
    return base * mellin(ctx, node.child.chars[0] * node.chi, node.phi)


def godement_circ_constant(node: GodementCirc) -> RatFun:
    """g°(1) at rank 2: the GL_2 integral of f(h) phi(h) chi(det h) |det h|^(1/2)."""
    if not node.phi.is_lattice_combination():
        raise CapabilityError("rank-2 g° is exact only for left-K-stable lattice phi")
    integrand = Integrand(
        [SectionAt(node.child), DetChar(node.chi.twist(Fraction(1, 2)))],
        SchwartzAt(node.phi, (0, 1)),
    )
    return g2_integral(ExactContext(node.field), integrand)


def godement_eval(node: SectionExpr, g: mx.Matrix) -> RatFun:
    """Pointwise value of g+ or g° at g.

    Raises:
        CapabilityError: rank >= 3, or a rank-2 g° whose phi is not a lattice combination
    """
    k = node.rank
    field = node.field
    if not godement_hypotheses(node):
        logger.warning("Godement node outside its convergence region; using the formal continuation")
    if k == 1:
        return _godement_rank1_base(node) * spherical_value(field, node.chars, g)
    if k >= 3:
        raise CapabilityError(f"exact Godement sections stop at rank 2, got rank {k}")
    if isinstance(node, GodementCirc):
        return godement_circ_constant(node) * spherical_value(field, node.chars, g)
    det_v = finite_valuation(mx.det(g), field.q)
    prefactor = RatFun.monomial(*char_monomial(node.chi.twist(Fraction(1, 2)), det_v))
    omega = (node.chi * node.child.chars[0].inverse()).twist(1)
    phi = pullback_row(node.phi, g[0])
    value = mellin(ExactContext(field), omega, phi)
    return prefactor * section_eval(node.child, mx.identity(1)) * value


# ---------------------------------------------------------------------------
# Rankin-Selberg and open-orbit integrals
# ---------------------------------------------------------------------------


def _exponent(field: LocalFieldDesc, offset: Fraction, reflect_s: bool) -> MultChar:
    """|.|^(s + offset), or |.|^(1 - s + offset) when reflected."""
    if reflect_s:
        return MultChar(field, t=1 + offset, shift=-1)
    return MultChar(field, t=offset, shift=1)


def _spherical_constant(f: SectionExpr) -> Tuple[RatFun, CharTuple]:
    reduced = reduce_section(f)
    if reduced is None:
        raise CapabilityError("Whittaker values need a right-K-invariant section")
    return reduced[0], reduced[1].chars


def _diagonal_translate(f: SectionExpr) -> Tuple[SectionExpr, Tuple[int, ...]]:
    """(f0, v) with f = diag(p^v_1 u_1, ..., p^v_n u_n).f0 for units u_i.

    Only translates that are not already right-K-invariant are peeled off.
    """
    if isinstance(f, RightTranslate) and reduce_section(f) is None:
        g, k = f.g, f.rank
        if all(g[i][j] == 0 for i in range(k) for j in range(k) if i != j):
            child, shift = _diagonal_translate(f.child)
            p = f.field.q
            return child, tuple(v + finite_valuation(g[i][i], p) for i, v in enumerate(shift))
    return f, (0,) * f.rank


def _check_case(case: RSCase, f: SectionExpr, f_prime: SectionExpr, phi: Optional[SchwartzSpan]) -> int:
    n = f.rank
    expected = n if case == RSCase.NN else n - 1
    if f_prime.rank != expected:
        raise DimensionError(f"case {case.value} pairs rank {n} with rank {expected}, got {f_prime.rank}")
    if case == RSCase.NN and phi is None:
        raise DomainError("the n' = n integrals need a Schwartz function")
    return n


def _z_value(ctx: Context, case: RSCase, f: SectionExpr, f_prime: SectionExpr, phi: Optional[SchwartzSpan]):
    n = _check_case(case, f, f_prime, phi)
    q = ctx.q
    field = f.field if n else f_prime.field
    if case == RSCase.NNM1 and n == 1:
        return ctx.lift(section_eval(f, mx.identity(1)) * section_eval(f_prime, ()))
    if case == RSCase.NN and n == 1:
        omega = (f.chars[0] * f_prime.chars[0]).with_shift(1)
        const = section_eval(f, mx.identity(1)) * section_eval(f_prime, mx.identity(1))
        return ctx.lift(const) * mellin(ctx, omega, phi)
    shift = (0,) * n
    if case == RSCase.NNM1 and n == 2:
        f, shift = _diagonal_translate(f)
    c, nu = _spherical_constant(f)
    c_prime, nu_prime = _spherical_constant(f_prime)
    const = ctx.lift(c * c_prime)
    if case == RSCase.NNM1 and n == 2:
        power = _exponent(field, Fraction(-1, 2), False)
        vol = ctx.const(1 - Fraction(1, q))
        # W(diag(p^m, 1) diag(p^v1, p^v2)) = omega(p^v2) W(diag(p^(m + v1 - v2), 1))
        lag = shift[0] - shift[1]
        central = _char_value(ctx, nu[0] * nu[1], shift[1])

        def shell(j: int):
            w = jacquet_whittaker(nu, j) * RatFun.monomial(*char_monomial(nu_prime[0], j - lag))
            return ctx.lift(w) * _char_value(ctx, power, j - lag)

        return const * vol * central * ctx.ray(shell, order=2)
    if case == RSCase.NN and n == 2:
        if not phi.is_lattice_combination():
            raise CapabilityError("exact Z for n = 2 needs phi to be a combination of lattice indicators")
        power = _exponent(field, Fraction(0), False)
        vol = ctx.const((1 - Fraction(1, q)) * (1 - Fraction(1, q**2)))
        central = nu[0] * nu[1] * nu_prime[0] * nu_prime[1] * power * power

        def inner(j: int):
            w = jacquet_whittaker(nu, j) * jacquet_whittaker(nu_prime, j)
            return ctx.lift(w) * _char_value(ctx, power, j) * ctx.const(Fraction(q) ** j)

        off_diagonal = ctx.ray(inner, order=4)
        total = ctx.zero()
        for t in phi.terms:
            e = t.depth
            total = total + ctx.const(t.coeff) * ctx.ray(lambda i, e=e: _char_value(ctx, central, e + i), transient=0)
        return const * vol * off_diagonal * total
    if case == RSCase.NNM1 and n == 3:
        power = _exponent(field, Fraction(-1, 2), False)
        vol = ctx.const((1 - Fraction(1, q)) * (1 - Fraction(1, q**2)))

        def column(m2: int):
            def term(j: int):
                m1 = m2 + j
                w = casselman_shalika(nu, (m1, m2, 0)) * casselman_shalika(nu_prime, (m1, m2))
                return ctx.lift(w) * _char_value(ctx, power, m1 + m2) * ctx.const(Fraction(q) ** j)

            return ctx.ray(term, order=6)

        return const * vol * ctx.ray(column, order=12)
    raise CapabilityError(f"no Rankin-Selberg evaluator for case {case.value} at n = {n}")


def rs_Z(
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan] = None,
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Rankin-Selberg integral Z(s, W_f, W_f', phi) on the diagonal torus."""
    case = RSCase(case)
    field = f.field if f.rank else f_prime.field
    return run_integral(field, lambda ctx: _z_value(ctx, case, f, f_prime, phi), mode, s_values, cutoff)


def rs_Z_normalized(
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan] = None,
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Z(s, W_f, W_f', phi) / L(s, nu x nu') for spherical f, f'; a polynomial in Y^+-1 when unramified."""
    from app.services.factors_service import pair_products

    if not (isinstance(f, SphericalBase) and isinstance(f_prime, SphericalBase)):
        raise CapabilityError("normalized Z is defined here for spherical sections only")
    L_pair = pair_products(f.chars, f_prime.chars).L_pair
    z = rs_Z(case, f, f_prime, phi, mode, s_values, cutoff)
    if z.exact is not None:
        return IntegralResult(exact=z.exact / L_pair.exact)
    z.numeric = z.numeric / L_pair.evaluate(z.s_values)
    return z


def _section_factors(ctx: Context, specs: List[SectionAt]) -> Tuple[object, List[SectionAt]]:
    const = RatFun.constant(1)
    out = []
    for spec in specs:
        c, reduced = reduce_factor(spec)
        const = const * c
        out.append(reduced)
    return ctx.lift(const), out


def _lambda_value(
    ctx: Context,
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan],
    reflect_s: bool,
):
    n = _check_case(case, f, f_prime, phi)
    field = ctx.field
    if case == RSCase.NNM1 and n == 1:
        return ctx.lift(section_eval(f, mx.make_z(1)) * section_eval(f_prime, ()))
    if case == RSCase.NN and n == 1:
        power = _exponent(field, Fraction(0), reflect_s)
        if phi.has_phase():
            const = section_eval(f, mx.make_z(1)) * section_eval(f_prime, mx.identity(1))
            return ctx.lift(const) * mellin(ctx, f.chars[0] * f_prime.chars[0] * power, phi)
        const, factors = _section_factors(ctx, [SectionAt(f, mx.make_z(1)), SectionAt(f_prime)])
        return const * g1_integral(ctx, Integrand(factors + [DetChar(power)], SchwartzAt(phi, (0,))))
    if case == RSCase.NNM1 and n == 2:
        power = _exponent(field, Fraction(-1, 2), reflect_s)
        const, factors = _section_factors(ctx, [SectionAt(f, mx.make_z(2), embed=True), SectionAt(f_prime, mx.make_z(1))])
        return const * g1_integral(ctx, Integrand(factors + [DetChar(power)]))
    if case == RSCase.NN and n == 2:
        power = _exponent(field, Fraction(0), reflect_s)
        const, factors = _section_factors(ctx, [SectionAt(f, mx.make_z(2)), SectionAt(f_prime)])
        return const * g2_integral(ctx, Integrand(factors + [DetChar(power)], SchwartzAt(phi, (1,))))
    if case == RSCase.NNM1 and n == 3:
        if ctx.mode == Mode.EXACT:
            raise CapabilityError("the (3, 2) open-orbit integral is available in numeric mode only")
        power = _exponent(field, Fraction(-1, 2), reflect_s)
        const, factors = _section_factors(ctx, [SectionAt(f, mx.make_z(3), embed=True), SectionAt(f_prime, mx.make_z(2))])
        return const * g2_integral(ctx, Integrand(factors + [DetChar(power)]))
    raise CapabilityError(f"no open-orbit evaluator for case {case.value} at n = {n}")


def lambda_open_orbit(
    case: RSCase,
    f: SectionExpr,
    f_prime: SectionExpr,
    phi: Optional[SchwartzSpan] = None,
    reflect_s: bool = False,
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
) -> IntegralResult:
    """Open-orbit integral Lambda(s, f, f'[, phi]); ``reflect_s`` evaluates at 1 - s."""
    case = RSCase(case)
    return run_integral(
        f.field,
        lambda ctx: _lambda_value(ctx, case, f, f_prime, phi, reflect_s),
        mode,
        s_values,
        cutoff,
    )

