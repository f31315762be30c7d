"""Valuation-shell summation: formal rays, p-adic line integrals and integrals over GL_1 and GL_2

Every integral in the workbench reduces to sums over valuation shells. The same
stratification runs in two contexts: ``ExactContext`` sums each infinite ray
formally (closed-form generating functions in Y), ``NumericContext`` truncates
it at a cutoff and works with complex doubles at a vector of s values.
"""

import logging
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.core import matrices as mx
from app.core.characters import MultChar, char_monomial
from app.core.exactalg import RatFun, Scalar, generating_function, sum_geometric_tail, sum_recurrent
from app.core.exceptions import CapabilityError, DivergenceWarning, DomainError, PoleCollisionError
from app.core.iwasawa import SectionExpr, critical_points, governing_forms, reduce_section, right_stabilizer, section_eval
from app.core.localfield import LocalFieldDesc, finite_valuation, psi_exact, psi_numeric, residue, valuation
from app.core.models import Mode
from app.core.schwartz import SchwartzSpan

logger = logging.getLogger(__name__)

Value = Union[RatFun, np.ndarray]


class _NotMonomial(Exception):
    pass


# ---------------------------------------------------------------------------
# Summation contexts
# ---------------------------------------------------------------------------


class ExactContext:
    """Values are RatFuns in Y; infinite rays are summed formally."""

    mode = Mode.EXACT

    def __init__(self, field: LocalFieldDesc):
        field.require_padic()
        self.field = field
        self.q = field.q
        self.rays = 0

    def zero(self) -> RatFun:
        return RatFun.constant(0)

    def lift(self, x) -> RatFun:
        if isinstance(x, RatFun):
            return x
        return RatFun.constant(x)

    def const(self, x) -> RatFun:
        return RatFun.constant(x)

    def monomial(self, coeff: Scalar, power: int) -> RatFun:
        return RatFun.monomial(coeff, power)

    def psi(self, x) -> RatFun:
        return RatFun.constant(psi_exact(x, self.q))

    def ray(self, term: Callable[[int], Value], transient: Optional[int] = None, order: Optional[int] = None) -> RatFun:
        """Formal sum of term(0) + term(1) + ...

        ``transient``: the terms are geometric from that index on; the tail is summed
        in closed form. ``order``: a-priori bound on the recurrence order of the terms,
        certifying the Berlekamp-Massey sum (RAY_ORDER_BOUND when omitted).

        Raises:
            PoleCollisionError: the generating function has a pole at the summation point
            AlgebraError: the terms need a recurrence longer than the order bound
        """
        self.rays += 1
        cache: List[RatFun] = []

        def get(i: int) -> RatFun:
            while len(cache) <= i:
                cache.append(self.lift(term(len(cache))))
            return cache[i]

        one = RatFun.constant(1)
        if transient is not None:
            value = sum_geometric_tail(get, one, transient)
            if value is not None:
                return value
            logger.debug(f"shells are not geometric past index {transient}; falling back to a recurrence")
            order = transient + 2 if order is None else order
        try:
            return _monomial_ray(get, order)
        except _NotMonomial:
            pass
        value, found = sum_recurrent(get, one, order_bound=order)
        logger.debug(f"ray summed from {len(cache)} terms, recurrence order {found}")
        return value


def _monomial_ray(get: Callable[[int], RatFun], order: Optional[int] = None) -> RatFun:
    """Rays whose terms are c_i Y^(a + b i): sum the scalar series, then substitute."""
    nonzero: List[Tuple[int, int]] = []
    shape: List[int] = []

    def coeff(i: int) -> Scalar:
        mono = get(i).as_monomial()
        if mono is None:
            raise _NotMonomial
        c, k = mono
        if c.is_zero():
            return c
        if len(nonzero) < 2:
            nonzero.append((i, k))
            if len(nonzero) == 2:
                (i0, k0), (i1, k1) = nonzero
                if (k1 - k0) % (i1 - i0):
                    raise _NotMonomial
                b = (k1 - k0) // (i1 - i0)
                shape.extend([k0 - b * i0, b])
        elif k != shape[0] + shape[1] * i:
            raise _NotMonomial
        return c

    numer, conn, _ = generating_function(coeff, Scalar(1), order_bound=order)
    if not nonzero:
        return RatFun.constant(0)
    a, b = shape if shape else (nonzero[0][1], 0)
    if b == 0:
        at_one = sum(conn, Scalar())
        if at_one.is_zero():
            raise PoleCollisionError("formal shell sum has a pole at the summation point")
        return RatFun.monomial(sum(numer, Scalar()) / at_one, a)
    return RatFun(numer, conn).substitute_power(b) * RatFun.monomial(1, a)


class NumericContext:
    """Values are complex vectors over a grid of s; rays are truncated at the cutoff."""

    mode = Mode.NUMERIC

    def __init__(self, field: LocalFieldDesc, s_values: Sequence[complex], cutoff: Optional[int] = None):
        field.require_padic()
        if cutoff is not None and cutoff < 1:
            raise DomainError("cutoff must be at least 1")
        self.field = field
        self.q = field.q
        self.s_values = np.atleast_1d(np.asarray(s_values, dtype=complex))
        self.ys = np.power(float(self.q), -self.s_values / 2)
        self.cutoff = cutoff or settings.NUMERIC_CUTOFF
        self.tail = 0.0
        self.profiles: List[List[float]] = []

    def zero(self) -> np.ndarray:
        return np.zeros_like(self.ys)

    def lift(self, x) -> np.ndarray:
        if isinstance(x, np.ndarray):
            return x
        if isinstance(x, RatFun):
            return x.evaluate_many(self.ys)
        return np.full_like(self.ys, self.const(x))

    def const(self, x) -> complex:
        if isinstance(x, (complex, float)):
            return complex(x)
        return complex(Scalar.coerce(x))

    def monomial(self, coeff: Scalar, power: int) -> np.ndarray:
        return complex(coeff) * self.ys**power

    def psi(self, x) -> complex:
        return psi_numeric(x, self.q)

    def ray(self, term: Callable[[int], Value], transient: Optional[int] = None, order: Optional[int] = None) -> np.ndarray:
        total = self.zero()
        profile: List[float] = []
        for i in range(self.cutoff + 1):
            t = self.lift(term(i))
            total = total + t
            profile.append(float(np.max(np.abs(t))))
            size = float(np.max(np.abs(total)))
            if i >= settings.RAY_MIN_TERMS and size > 0 and max(profile[-2:]) <= 1e-13 * size:
                break
        self.tail = max(self.tail, profile[-1])
        self.profiles.append(profile)
        if len(profile) > 1 and profile[-1] > profile[0] > 0:
            warnings.warn(DivergenceWarning(f"shells grow from {profile[0]:.3g} to {profile[-1]:.3g}", profile))
        return total


Context = Union[ExactContext, NumericContext]


def range_sum(
    ctx: Context,
    term: Callable[[int], Value],
    lo: Optional[int] = None,
    hi: Optional[int] = None,
    breaks: Iterable[int] = (),
    order: Optional[int] = None,
) -> Value:
    """Sum term(m) over lo <= m <= hi (None is unbounded).

    Infinite ends are summed as rays that start at the outermost break, so ``breaks``
    must contain every index where the shape of term(m) changes. ``order`` bounds the
    recurrence order of term(m) beyond the breaks.
    """
    inside = sorted({b for b in breaks if (lo is None or b >= lo) and (hi is None or b <= hi)})
    start = lo if lo is not None else (inside[0] if inside else (hi if hi is not None else 0))
    total = ctx.zero()
    if hi is None:
        top = max(inside + [start])
        total = total + ctx.ray(lambda i: term(top + i), order=order)
    else:
        top = hi + 1
    for m in range(start, top):
        total = total + ctx.lift(term(m))
    if lo is None:
        total = total + ctx.ray(lambda i: term(start - 1 - i), order=order)
    return total


# ---------------------------------------------------------------------------
# Integrand factors along lines g(x) = A + x B
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectionAt:
    """g -> f(left . E(g)); E(h) = diag(h, 1) when ``embed``"""

    section: SectionExpr
    left: Optional[mx.Matrix] = None
    embed: bool = False

    def _place(self, a: mx.Matrix, b: Optional[mx.Matrix] = None):
        if self.embed:
            a = mx.embed(a)
            if b is not None:
                b = mx.block_diag(b, ((Fraction(0),),))
        if self.left is not None:
            a = mx.mat_mul(self.left, a)
            if b is not None:
                b = mx.mat_mul(self.left, b)
        return a, b

    def value(self, ctx: Context, g: mx.Matrix) -> Value:
        placed, _ = self._place(g)
        return ctx.lift(section_eval(self.section, placed))

    def points(self, a: mx.Matrix, b: mx.Matrix) -> List[Fraction]:
        pa, pb = self._place(a, b)
        return critical_points(self.section, pa, pb)

    def forms(self, a: mx.Matrix, b: mx.Matrix) -> List[mx.XPoly]:
        pa, pb = self._place(a, b)
        return governing_forms(self.section, pa, pb)


@dataclass(frozen=True)
class DetChar:
    """g -> omega(det g), omega possibly carrying an s-shift"""

    omega: MultChar

    def value(self, ctx: Context, g: mx.Matrix) -> Value:
        c, k = char_monomial(self.omega, finite_valuation(mx.det(g), ctx.q))
        return ctx.monomial(c, k)

    def points(self, a: mx.Matrix, b: mx.Matrix) -> List[Fraction]:
        poly = mx.affine_det(a, b)
        if len(poly) > 2:
            raise CapabilityError("determinant is not affine along the line")
        return [-poly[0] / poly[1]] if len(poly) == 2 else []

    def forms(self, a: mx.Matrix, b: mx.Matrix) -> List[mx.XPoly]:
        return [mx.affine_det(a, b)]


@dataclass(frozen=True)
class SchwartzAt:
    """g -> phi(selected rows of g); consumed by the integrators as ball restrictions"""

    phi: SchwartzSpan
    rows: Tuple[int, ...]


@dataclass
class Integrand:
    factors: List[Union[SectionAt, DetChar]] = dc_field(default_factory=list)
    schwartz: Optional[SchwartzAt] = None

    def value(self, ctx: Context, g: mx.Matrix) -> Value:
        out = ctx.const(1)
        for factor in self.factors:
            out = factor.value(ctx, g) * out
        return out

    def points(self, a: mx.Matrix, b: mx.Matrix) -> List[Fraction]:
        out: List[Fraction] = []
        for factor in self.factors:
            out.extend(factor.points(a, b))
        return sorted(set(out))

    def forms(self, a: mx.Matrix, b: mx.Matrix) -> List[mx.XPoly]:
        out: List[mx.XPoly] = []
        for factor in self.factors:
            out.extend(factor.forms(a, b))
        return out


# ---------------------------------------------------------------------------
# Line integrals over k
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    """centre + p^radius O"""

    centre: Fraction
    radius: int

    def contains(self, x: Fraction, p: int) -> bool:
        return valuation(x - self.centre, p) >= self.radius

    def intersect(self, other: "Ball", p: int) -> Optional["Ball"]:
        if valuation(self.centre - other.centre, p) >= min(self.radius, other.radius):
            return self if self.radius >= other.radius else other
        return None


def _shell(ctx: Context, level: int) -> Value:
    """Volume of {x : v(x) = level}."""
    q = Fraction(ctx.q)
    return ctx.const(q ** (-level) * (1 - 1 / q))


Forms = Optional[Sequence[mx.XPoly]]


def shell_transient(forms: Sequence[mx.XPoly], centre: Fraction, start: int, step: int, p: int) -> int:
    """First i from which the integrand is geometric along x = centre + p^(start + step i).

    Each affine form P has P(centre + t) = P(centre) + beta t: its valuation is
    v(P(centre)) or v(beta) + start + step i, the smaller one once they differ. Past the
    last crossing of a constant valuation with a moving one, every minimum that
    decides a section value is attained by a fixed form.
    """
    settled: List[int] = []
    moving: List[int] = []
    for poly in forms:
        if len(poly) > 2:
            raise CapabilityError(f"form of degree {len(poly) - 1} along the line")
        lead = poly[1] if len(poly) == 2 else Fraction(0)
        at_centre = (poly[0] if poly else Fraction(0)) + lead * centre
        if at_centre:
            settled.append(finite_valuation(at_centre, p))
        if lead:
            moving.append(finite_valuation(lead, p) + start)
    crossings = [step * (c - m) + 1 for c in settled for m in moving]
    return max([0] + crossings)


def _shell_ray(ctx: Context, f: Callable[[Fraction], Value], forms: Forms, centre: Fraction, start: int, step: int) -> Value:
    """Sum over i >= 0 of the shells v(x - centre) = start + step i."""
    q = Fraction(ctx.q)
    transient = shell_transient(forms, centre, start, step, ctx.q) if forms is not None else None

    def term(i: int) -> Value:
        level = start + step * i
        return _shell(ctx, level) * f(centre + q**level)

    return ctx.ray(term, transient=transient)


def _ball_integral(
    ctx: Context,
    f: Callable[[Fraction], Value],
    centre: Fraction,
    radius: int,
    roots: List[Fraction],
    forms: Forms = None,
) -> Value:
    """Integral of f over centre + p^radius O; every root lies in the ball."""
    p = ctx.q
    q = Fraction(p)
    if not roots:
        return ctx.const(q ** (-radius)) * f(centre)
    if len(roots) == 1:
        return _shell_ray(ctx, f, forms, roots[0], radius, 1)
    centre = roots[0]
    classes: dict = {}
    for rho in roots:
        classes.setdefault(residue((rho - centre) / q**radius, p), []).append(rho)
    total = ctx.zero()
    for members in classes.values():
        total = total + _ball_integral(ctx, f, members[0], radius + 1, members, forms)
    empty = p - len(classes)
    if empty:
        a = min(set(range(p)) - set(classes))
        total = total + ctx.const(empty * q ** (-radius - 1)) * f(centre + a * q**radius)
    return total


def line_integral(
    ctx: Context,
    f: Callable[[Fraction], Value],
    roots: Iterable[Fraction],
    domain: Optional[Ball] = None,
    forms: Forms = None,
) -> Value:
    """Integral of f(x) dx over k (or a ball), f governed by the valuations of x - root.

    ``forms`` are the affine forms behind the roots; with them every shell ray is
    summed as a finite head plus a geometric tail.

    Raises:
        CapabilityError: f is constant on all of k, so the integral has no finite value
    """
    p = ctx.q
    roots = sorted(set(Fraction(r) for r in roots))
    if domain is not None:
        inside = [r for r in roots if domain.contains(r, p)]
        if not inside:
            return ctx.const(Fraction(p) ** (-domain.radius)) * f(domain.centre)
        return _ball_integral(ctx, f, inside[0], domain.radius, inside, forms)
    if not roots:
        raise CapabilityError("integrand is constant along the whole line")
    c0 = roots[0]
    if len(roots) == 1:
        return _shell_ray(ctx, f, forms, c0, 0, 1) + _shell_ray(ctx, f, forms, c0, -1, -1)
    r0 = min(finite_valuation(r - c0, p) for r in roots[1:])
    return _ball_integral(ctx, f, c0, r0, roots, forms) + _shell_ray(ctx, f, forms, c0, r0 - 1, -1)


def _schwartz_balls(phi: SchwartzSpan) -> List[Tuple[Scalar, Ball]]:
    """Phase-free one-variable terms as (coeff, ball)."""
    if phi.shape != (1, 1):
        raise DomainError(f"expected a function on k, got shape {phi.shape}")
    if phi.has_phase():
        raise CapabilityError("phase terms are not ball restrictions")
    return [(t.coeff, Ball(t.centre[0], t.depth)) for t in phi.terms]


def g1_integral(ctx: Context, integrand: Integrand) -> Value:
    """Integral over G_1 = k^x against d^x h, the line variable being h itself."""
    a, b = ((Fraction(0),),), ((Fraction(1),),)
    measure = DetChar(MultChar(ctx.field, t=-1))
    factors = list(integrand.factors) + [measure]
    full = Integrand(factors)

    def f(x: Fraction) -> Value:
        return full.value(ctx, ((x,),))

    roots, forms = full.points(a, b), full.forms(a, b)
    if integrand.schwartz is None:
        return line_integral(ctx, f, roots, forms=forms)
    total = ctx.zero()
    for coeff, ball in _schwartz_balls(integrand.schwartz.phi):
        total = total + ctx.const(coeff) * line_integral(ctx, f, roots, ball, forms)
    return total


# ---------------------------------------------------------------------------
# Integrals over GL_2
# ---------------------------------------------------------------------------


def _level(integrand: Integrand, p: int) -> Tuple[List[mx.Matrix], int, int]:
    """(K/K' representatives, level e, break spread) from the translated section factors."""
    translated = []
    for factor in integrand.factors:
        if isinstance(factor, SectionAt):
            g0 = right_stabilizer(factor.section)
            if g0 is not None:
                if factor.embed:
                    raise CapabilityError("embedded translated sections are not supported by the GL_2 integrator")
                translated.append(g0)
    if len(translated) > 1:
        raise CapabilityError("more than one translated section in a GL_2 integrand")
    spread = 0
    for factor in integrand.factors:
        if isinstance(factor, SectionAt) and factor.left is not None:
            spread = max([spread] + [abs(finite_valuation(x, p)) for row in factor.left for x in row if x])
    if not translated:
        return [mx.identity(2)], 0, spread
    g0 = translated[0]
    k1, d, _ = mx.smith_form(g0, p)
    e = finite_valuation(d[1][1], p) - finite_valuation(d[0][0], p)
    k1_inv = mx.inverse(k1)
    reps = [mx.mat_mul(mx.mat_mul(k1, r), k1_inv) for r in mx.gamma0_coset_reps(e, p)]
    for m in (g0, mx.inverse(g0)):
        spread = max([spread] + [abs(finite_valuation(x, p)) for row in m for x in row if x])
    return reps, e, spread


def _lattice_terms(schwartz: Optional[SchwartzAt]) -> List[Tuple[Scalar, Optional[int]]]:
    if schwartz is None:
        return [(Scalar(1), None)]
    phi = schwartz.phi
    if phi.shape != (len(schwartz.rows), 2):
        raise DomainError(f"rows {schwartz.rows} do not match a function of shape {phi.shape}")
    if not phi.is_lattice_combination():
        raise CapabilityError("the GL_2 integrator needs phi to be a combination of lattice indicators")
    return [(t.coeff, t.depth) for t in phi.terms]


def g2_integral(ctx: Context, integrand: Integrand) -> Value:
    """Integral over GL_2 against dg = |det g|^-2 prod dg_ij.

    Cosets G/K' are [[p^m1, 0], [x, p^m2]] kappa with kappa over K/K'; the x-sum over
    k / p^m2 O is q^m2 times a line integral. The rays in m1 and m2 are certified
    against an order bound proportional to the number of line strata.

    Raises:
        CapabilityError: non-lattice phi, several translated sections, or an embedded
            translated section
    """
    p = ctx.q
    q = Fraction(p)
    reps, e, spread = _level(integrand, p)
    vol_k = (1 - 1 / q) * (1 - 1 / q**2)
    width = spread + e + 2
    rows = integrand.schwartz.rows if integrand.schwartz is not None else ()
    lower = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))
    support = sum(len(integrand.points(kappa, mx.mat_mul(lower, kappa))) + 2 for kappa in reps)
    inner_order, outer_order = 2 * support, 3 * support
    strata = 0

    def at(m1: int, m2: int, depth: Optional[int]) -> Value:
        nonlocal strata
        diag = mx.diag(q**m1, q**m2)
        domain = Ball(Fraction(0), depth) if depth is not None and 1 in rows else None
        total = ctx.zero()
        for kappa in reps:
            a, b = mx.mat_mul(diag, kappa), mx.mat_mul(lower, kappa)

            def f(x: Fraction, a=a, b=b) -> Value:
                return integrand.value(ctx, mx.affine_at(a, b, x))

            total = total + line_integral(ctx, f, integrand.points(a, b), domain, integrand.forms(a, b))
            strata += 1
        return ctx.const(q**m2) * total

    out = ctx.zero()
    for coeff, depth in _lattice_terms(integrand.schwartz):
        lo1 = depth if depth is not None and 0 in rows else None
        lo2 = depth if depth is not None and 1 in rows else None
        fixed = set(range(-width, width + 1))
        if depth is not None:
            fixed |= {depth - 1, depth, depth + 1}

        def inner(m2: int, depth=depth, lo1=lo1, fixed=fixed) -> Value:
            breaks = fixed | {m2 + d for d in range(-width, width + 1)}
            return range_sum(ctx, lambda m1: at(m1, m2, depth), lo=lo1, breaks=breaks, order=inner_order)

        out = out + ctx.const(coeff) * range_sum(ctx, inner, lo=lo2, breaks=fixed, order=outer_order)
    logger.debug(f"GL_2 integral over {strata} line strata, {len(reps)} coset representatives")
    return ctx.const(vol_k / len(reps)) * out


def reduce_factor(factor: SectionAt) -> Tuple[RatFun, SectionAt]:
    """Pull the constant out of a right-K-invariant section factor."""
    reduced = reduce_section(factor.section)
    if reduced is None:
        return RatFun.constant(1), factor
    return reduced[0], SectionAt(reduced[1], factor.left, factor.embed)
