"""Iwasawa decomposition G = B-bar K over Q_p and principal-series sections

A section is a small expression tree. Leaves are spherical vectors; inner nodes
translate, hat-conjugate, combine, or integrate a child against a Schwartz
function (the Godement sections). Evaluation is exact and cached per (node, g).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np

from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, char_monomial, hat_dual
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import AlgebraError, CapabilityError, DimensionError, DomainError
from app.core.localfield import LocalFieldDesc, finite_valuation, valuation
from app.core.schwartz import SchwartzSpan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IwasawaFactors:
    """g = bbar * kappa with bbar lower triangular and kappa in GL_k(Z_p)"""

    bbar: mx.Matrix
    kappa: mx.Matrix

    def diagonal_valuations(self, p: int) -> List[int]:
        return [finite_valuation(self.bbar[i][i], p) for i in range(len(self.bbar))]


def iwasawa_decompose(g: mx.Matrix, p: int, rng: Optional[np.random.Generator] = None) -> IwasawaFactors:
    """Column elimination pivoted on valuation.

    Row by row from the top, the entry of least valuation among the remaining
    columns (ties: smallest column, or a random one when ``rng`` is given) is moved
    to the pivot by a signed swap, and the rest of the row is cleared with
    O-multiples of the pivot column. The column operations E give bbar = g E and
    kappa = E^-1.

    Raises:
        AlgebraError: g is singular
    """
    k = mx.size(g)
    mx.require_invertible(g)
    cols = [list(c) for c in zip(*g)] if k else []
    ops = [list(c) for c in zip(*mx.identity(k))] if k else []
    for i in range(k):
        vals = [valuation(cols[j][i], p) for j in range(i, k)]
        best = min(vals)
        candidates = [i + n for n, v in enumerate(vals) if v == best]
        j = candidates[int(rng.integers(len(candidates)))] if rng is not None else candidates[0]
        if j != i:
            for store in (cols, ops):
                store[i], store[j] = store[j], [-x for x in store[i]]
        pivot = cols[i][i]
        for j in range(i + 1, k):
            factor = cols[j][i] / pivot
            if factor:
                cols[j] = [x - factor * y for x, y in zip(cols[j], cols[i])]
                ops[j] = [x - factor * y for x, y in zip(ops[j], ops[i])]
    bbar = mx.transpose(mx.mat(cols)) if k else ()
    e = mx.transpose(mx.mat(ops)) if k else ()
    return IwasawaFactors(bbar, mx.inverse(e) if k else ())


def spherical_value(field: LocalFieldDesc, chars: CharTuple, g: mx.Matrix) -> RatFun:
    """prod_i nu_i(b_ii) |b_ii|^((2i-1-k)/2) for g = b kappa; equals 1 on K."""
    k = len(chars)
    if mx.size(g) != k:
        raise DimensionError(f"rank-{k} section evaluated at a {len(g)}x{len(g)} matrix")
    if k == 0:
        return RatFun.constant(1)
    p = field.q
    coeff, power = Scalar(1), 0
    for i, v in enumerate(iwasawa_decompose(g, p).diagonal_valuations(p), start=1):
        c, y = char_monomial(chars[i - 1], v)
        coeff = coeff * c * Scalar.q_power(Fraction(-(2 * i - 1 - k) * v, 2), p)
        power += y
    return RatFun.monomial(coeff, power)


# ---------------------------------------------------------------------------
# Section expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalBase:
    """The K-fixed vector of I_nu, normalized to 1 on K"""

    field: LocalFieldDesc
    chars: CharTuple

    @property
    def rank(self) -> int:
        return len(self.chars)


@dataclass(frozen=True)
class RightTranslate:
    """(g.f)(x) = f(x g)"""

    g: mx.Matrix
    child: "SectionExpr"

    def __post_init__(self):
        if mx.size(self.g) != self.child.rank:
            raise DimensionError(f"translating a rank-{self.child.rank} section by a {len(self.g)}x{len(self.g)} matrix")
        mx.require_invertible(self.g)

    @property
    def field(self) -> LocalFieldDesc:
        return self.child.field

    @property
    def chars(self) -> CharTuple:
        return self.child.chars

    @property
    def rank(self) -> int:
        return self.child.rank


@dataclass(frozen=True)
class Hat:
    """f^(g) = f(w g^iota w), a vector of I_(hat alpha)"""

    child: "SectionExpr"

    @property
    def field(self) -> LocalFieldDesc:
        return self.child.field

    @property
    def chars(self) -> CharTuple:
        return hat_dual(self.child.chars)

    @property
    def rank(self) -> int:
        return self.child.rank


@dataclass(frozen=True)
class GodementPlus:
    """g+_(nu', chi)(f', phi) in I_(nu', chi); the child has rank one less"""

    chi: MultChar
    child: "SectionExpr"
    phi: SchwartzSpan

    def __post_init__(self):
        k = self.child.rank + 1
        if self.phi.shape != (k - 1, k):
            raise DimensionError(f"g+ of rank {k} needs phi on k^({k - 1}x{k}), got {self.phi.shape}")

    @property
    def field(self) -> LocalFieldDesc:
        return self.child.field

    @property
    def chars(self) -> CharTuple:
        return self.child.chars + CharTuple.of(self.chi)

    @property
    def rank(self) -> int:
        return self.child.rank + 1


@dataclass(frozen=True)
class GodementCirc:
    """g°_(nu, chi)(f, phi) in I_nu"""

    chi: MultChar
    child: "SectionExpr"
    phi: SchwartzSpan

    def __post_init__(self):
        k = self.child.rank
        if self.phi.shape != (k, k):
            raise DimensionError(f"g° of rank {k} needs phi on k^({k}x{k}), got {self.phi.shape}")

    @property
    def field(self) -> LocalFieldDesc:
        return self.child.field

    @property
    def chars(self) -> CharTuple:
        return self.child.chars

    @property
    def rank(self) -> int:
        return self.child.rank


@dataclass(frozen=True)
class LinearCombo:
    terms: Tuple[Tuple[Scalar, "SectionExpr"], ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("empty linear combination of sections")
        first = self.terms[0][1]
        if any(f.chars != first.chars for _, f in self.terms):
            raise DomainError("linear combination mixes principal series")

    @property
    def field(self) -> LocalFieldDesc:
        return self.terms[0][1].field

    @property
    def chars(self) -> CharTuple:
        return self.terms[0][1].chars

    @property
    def rank(self) -> int:
        return self.terms[0][1].rank


SectionExpr = Union[SphericalBase, RightTranslate, Hat, GodementPlus, GodementCirc, LinearCombo]


def spherical(field: LocalFieldDesc, *chars: MultChar) -> SphericalBase:
    return SphericalBase(field, CharTuple(chars))


def translate(f: SectionExpr, g) -> RightTranslate:
    return RightTranslate(mx.mat(g), f)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=200_000)
def section_eval(f: SectionExpr, g: mx.Matrix) -> RatFun:
    """Exact value f(g) as a function of Y.

    Raises:
        CapabilityError: a Godement node of rank >= 3, or one whose value needs
            the numeric path
    """
    if isinstance(f, SphericalBase):
        return spherical_value(f.field, f.chars, g)
    if isinstance(f, RightTranslate):
        return section_eval(f.child, mx.mat_mul(g, f.g))
    if isinstance(f, Hat):
        return section_eval(f.child, mx.hat_conj(g) if g else g)
    if isinstance(f, LinearCombo):
        total = RatFun.constant(0)
        for coeff, term in f.terms:
            total = total + section_eval(term, g) * coeff
        return total
    if isinstance(f, (GodementPlus, GodementCirc)):
        from app.services.integrals_service import godement_eval

        return godement_eval(f, g)
    raise TypeError(f"not a section expression: {type(f).__name__}")


@lru_cache(maxsize=4096)
def reduce_section(f: SectionExpr) -> Optional[Tuple[RatFun, SphericalBase]]:
    """(c, f°) with f = c f° when f is right-K-invariant in an evident way, else None."""
    sph = SphericalBase(f.field, f.chars)
    if isinstance(f, SphericalBase):
        return RatFun.constant(1), f
    if f.rank == 1:
        return section_eval(f, mx.identity(1)), sph
    if isinstance(f, RightTranslate):
        inner = reduce_section(f.child)
        if inner is not None and mx.in_maximal_compact(f.g, f.field.q):
            return inner[0], sph
        return None
    if isinstance(f, Hat):
        inner = reduce_section(f.child)
        return (inner[0], sph) if inner is not None else None
    if isinstance(f, LinearCombo):
        total = RatFun.constant(0)
        for coeff, term in f.terms:
            inner = reduce_section(term)
            if inner is None:
                return None
            total = total + inner[0] * coeff
        return total, sph
    if isinstance(f, GodementPlus):
        # right-K-stable phi makes g+ right-K-invariant
        if f.phi.is_lattice_combination():
            return section_eval(f, mx.identity(f.rank)), sph
        return None
    if isinstance(f, GodementCirc):
        # left-K-stable phi makes g° right-K-invariant
        if f.phi.is_lattice_combination():
            return section_eval(f, mx.identity(f.rank)), sph
        return None
    return None


def as_translate(f: SectionExpr) -> Optional[Tuple[RatFun, mx.Matrix, SphericalBase]]:
    """(c, g0, f°) with f = c * (g0 . f°), when f has that shape."""
    reduced = reduce_section(f)
    if reduced is not None:
        return reduced[0], mx.identity(f.rank), reduced[1]
    if isinstance(f, RightTranslate):
        inner = as_translate(f.child)
        if inner is None:
            return None
        c, g0, sph = inner
        return c, mx.mat_mul(f.g, g0), sph
    if isinstance(f, LinearCombo) and len(f.terms) == 1:
        inner = as_translate(f.terms[0][1])
        if inner is None:
            return None
        c, g0, sph = inner
        return c * f.terms[0][0], g0, sph
    return None


def right_stabilizer(f: SectionExpr) -> Optional[mx.Matrix]:
    """The translation g0 with f = c (g0 . f°); None when f is right-K-invariant.

    f is then invariant under K' = K cap g0 K g0^-1.

    Raises:
        CapabilityError: f is not a multiple of a translated spherical vector
    """
    if reduce_section(f) is not None:
        return None
    shape = as_translate(f)
    if shape is None:
        raise CapabilityError("section is not a multiple of a translated spherical vector")
    return shape[1]


def linear_terms(f: SectionExpr) -> List[Tuple[Scalar, SectionExpr]]:
    """Flatten top-level linear combinations."""
    if not isinstance(f, LinearCombo):
        return [(Scalar(1), f)]
    out: List[Tuple[Scalar, SectionExpr]] = []
    for coeff, term in f.terms:
        out.extend((coeff * c, t) for c, t in linear_terms(term))
    return out


# ---------------------------------------------------------------------------
# Critical points along affine lines of matrices
# ---------------------------------------------------------------------------


def _root(poly: mx.XPoly) -> List[Fraction]:
    if len(poly) <= 1:
        return []
    if len(poly) > 2:
        raise CapabilityError(f"minor of degree {len(poly) - 1} along the line")
    return [-poly[0] / poly[1]]


def affine_roots(*polys: mx.XPoly) -> List[Fraction]:
    out: List[Fraction] = []
    for poly in polys:
        out.extend(_root(poly))
    return out


def _entry(a: mx.Matrix, b: mx.Matrix, i: int, j: int) -> mx.XPoly:
    coeffs = [a[i][j], b[i][j]]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def governing_forms(f: SectionExpr, a: mx.Matrix, b: mx.Matrix) -> List[mx.XPoly]:
    """Polynomials in x whose valuations determine f(A + xB).

    Raises:
        CapabilityError: a node with no exact set of governing forms
    """
    k = f.rank
    if k == 0:
        return []
    if k == 1:
        return [_entry(a, b, 0, 0)]
    if isinstance(f, SphericalBase):
        out: List[mx.XPoly] = []
        for rows in range(1, k + 1):
            out.extend(mx.top_row_minors(a, b, rows))
        return out
    if isinstance(f, RightTranslate):
        return governing_forms(f.child, mx.mat_mul(a, f.g), mx.mat_mul(b, f.g))
    if isinstance(f, LinearCombo):
        out = []
        for _, term in f.terms:
            out.extend(governing_forms(term, a, b))
        return out
    reduced = reduce_section(f)
    if reduced is not None:
        return governing_forms(reduced[1], a, b)
    if isinstance(f, Hat):
        if k != 2:
            raise CapabilityError("hat nodes expose exact critical points only at rank 2")
        flip = ((1, -1), (-1, 1))
        na = tuple(tuple(x * s for x, s in zip(ra, rs)) for ra, rs in zip(a, flip))
        nb = tuple(tuple(x * s for x, s in zip(rb, rs)) for rb, rs in zip(b, flip))
        return governing_forms(f.child, na, nb) + [mx.affine_det(a, b)]
    if isinstance(f, GodementPlus) and k == 2:
        if f.phi.has_phase():
            raise CapabilityError("g+ with a phase has no exact point set")
        out = [_entry(a, b, 0, 0), _entry(a, b, 0, 1), mx.affine_det(a, b)]
        for t in f.phi.terms:
            d1, d2 = t.centre
            cross = (d1 * a[0][1] - d2 * a[0][0], d1 * b[0][1] - d2 * b[0][0])
            out.append(cross if cross[1] else (cross[0],))
        return out
    raise CapabilityError(f"no exact critical points for {type(f).__name__} at rank {k}")


def critical_points(f: SectionExpr, a: mx.Matrix, b: mx.Matrix) -> List[Fraction]:
    """Points x where f(A + xB) stops being governed by the valuation of x - point.

    Away from the returned points, f(A + xB) depends only on the valuations of
    x - rho over the returned rho.

    Raises:
        CapabilityError: a minor of degree >= 2, or a node with no exact point set
    """
    return affine_roots(*governing_forms(f, a, b))
