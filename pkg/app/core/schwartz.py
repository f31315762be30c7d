"""Schwartz functions: elementary p-adic spans and real polynomial-times-Gaussian functions

An elementary term on k^(a x b) is

    x -> coeff * psi(twist) * psi(<c, x>) * 1[x - d in p^m O^(a x b)]

with <c, x> = trace(transpose(c) x). Spans of such terms are closed under the
Fourier transform, transposition, negation of the argument and right translation.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath

from app.core.exactalg import Scalar
from app.core.exceptions import CapabilityError, DimensionError, DomainError
from app.core.localfield import padic_fractional_part, psi_exact, psi_numeric, reduce_mod_lattice, valuation
from app.core import matrices as mx

logger = logging.getLogger(__name__)

Shape = Tuple[int, int]
Entries = Tuple[Fraction, ...]  # row-major

MAX_REFINEMENT = 4096


def _exact_root_of_unity(theta: Fraction, p: int) -> Optional[Scalar]:
    try:
        return psi_exact(theta, p)
    except CapabilityError:
        return None


@dataclass(frozen=True)
class SchwartzElem:
    """One elementary term; fields are canonical once built through ``canonical``."""

    shape: Shape
    phase: Entries
    centre: Entries
    depth: int
    twist: Fraction
    coeff: Scalar

    @property
    def dim(self) -> int:
        return self.shape[0] * self.shape[1]

    def key(self) -> tuple:
        return (self.shape, self.phase, self.centre, self.depth, self.twist)

    def has_phase(self) -> bool:
        return any(self.phase) or bool(self.twist)


def canonical(elem: SchwartzElem, p: int) -> SchwartzElem:
    """Reduce the centre mod p^m, the phase mod p^-m and fold exact twists into coeff."""
    m = elem.depth
    centre = tuple(reduce_mod_lattice(x, m, p) for x in elem.centre)
    phase = tuple(reduce_mod_lattice(c, -m, p) for c in elem.phase)
    twist = Fraction(elem.twist)
    for c_old, c_new, d in zip(elem.phase, phase, centre):
        twist += (c_old - c_new) * d
    twist = padic_fractional_part(twist, p)
    coeff = elem.coeff
    if twist:
        root = _exact_root_of_unity(twist, p)
        if root is not None:
            coeff = coeff * root
            twist = Fraction(0)
    return SchwartzElem(elem.shape, phase, centre, m, twist, coeff)


@dataclass(frozen=True)
class SchwartzSpan:
    """Finite combination of elementary terms over Q_p, kept in canonical form"""

    p: int
    shape: Shape
    terms: Tuple[SchwartzElem, ...] = ()

    @classmethod
    def build(cls, p: int, shape: Shape, terms: Iterable[SchwartzElem]) -> "SchwartzSpan":
        merged: Dict[tuple, Scalar] = {}
        proto: Dict[tuple, SchwartzElem] = {}
        for term in terms:
            if term.shape != shape:
                raise DimensionError(f"term of shape {term.shape} in a span of shape {shape}")
            c = canonical(term, p)
            k = c.key()
            merged[k] = merged.get(k, Scalar()) + c.coeff
            proto[k] = c
        kept = [
            SchwartzElem(proto[k].shape, proto[k].phase, proto[k].centre, proto[k].depth, proto[k].twist, v)
            for k, v in merged.items()
            if not v.is_zero()
        ]
        kept.sort(key=lambda t: t.key())
        return cls(p, shape, tuple(kept))

    @classmethod
    def elementary(
        cls,
        p: int,
        shape: Shape,
        depth: int = 0,
        centre: Optional[Sequence] = None,
        phase: Optional[Sequence] = None,
        coeff=1,
        twist=0,
    ) -> "SchwartzSpan":
        n = shape[0] * shape[1]
        centre = tuple(Fraction(x) for x in (centre or [0] * n))
        phase = tuple(Fraction(x) for x in (phase or [0] * n))
        if len(centre) != n or len(phase) != n:
            raise DimensionError(f"shape {shape} needs {n} entries")
        term = SchwartzElem(shape, phase, centre, depth, Fraction(twist), Scalar.coerce(coeff))
        return cls.build(p, shape, [term])

    @classmethod
    def lattice(cls, p: int, shape: Shape, depth: int = 0, coeff=1) -> "SchwartzSpan":
        """coeff * 1[p^depth O^(a x b)]."""
        return cls.elementary(p, shape, depth=depth, coeff=coeff)

    # ---- linear structure ------------------------------------------

    def __add__(self, other: "SchwartzSpan") -> "SchwartzSpan":
        self._check(other)
        return SchwartzSpan.build(self.p, self.shape, self.terms + other.terms)

    def __sub__(self, other: "SchwartzSpan") -> "SchwartzSpan":
        return self + other.scale(-1)

    def scale(self, c) -> "SchwartzSpan":
        s = Scalar.coerce(c)
        return SchwartzSpan.build(
            self.p, self.shape, [SchwartzElem(t.shape, t.phase, t.centre, t.depth, t.twist, t.coeff * s) for t in self.terms]
        )

    def _check(self, other: "SchwartzSpan") -> None:
        if other.p != self.p or other.shape != self.shape:
            raise DimensionError(f"spans over ({self.p}, {self.shape}) and ({other.p}, {other.shape}) do not combine")

    def is_zero(self) -> bool:
        return not self.terms

    def has_phase(self) -> bool:
        return any(t.has_phase() for t in self.terms)

    def max_depth(self) -> int:
        return max((t.depth for t in self.terms), default=0)

    def single_terms(self) -> List["SchwartzSpan"]:
        return [SchwartzSpan(self.p, self.shape, (t,)) for t in self.terms]

    def is_lattice_combination(self) -> bool:
        """Zero-centred, phase-free terms: combinations of 1[p^m O^(a x b)]."""
        return all(not t.has_phase() and not any(t.centre) for t in self.terms)

    def refine(self, depth: int) -> "SchwartzSpan":
        """Rewrite every term on cosets of p^depth O (depth >= every term depth)."""
        out: List[SchwartzElem] = []
        for t in self.terms:
            if depth < t.depth:
                raise DomainError(f"cannot refine depth {t.depth} to coarser depth {depth}")
            count = self.p ** ((depth - t.depth) * t.dim)
            if count > MAX_REFINEMENT:
                raise CapabilityError(f"refinement would create {count} terms")
            step = Fraction(self.p) ** t.depth
            for offsets in product(range(self.p ** (depth - t.depth)), repeat=t.dim):
                centre = tuple(d + k * step for d, k in zip(t.centre, offsets))
                out.append(SchwartzElem(t.shape, t.phase, centre, depth, t.twist, t.coeff))
        return SchwartzSpan.build(self.p, self.shape, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchwartzSpan):
            return NotImplemented
        if other.p != self.p or other.shape != self.shape:
            return False
        if self.terms == other.terms:
            return True
        depth = max(self.max_depth(), other.max_depth())
        return self.refine(depth).terms == other.refine(depth).terms

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self.terms))

    # ---- evaluation -------------------------------------------------

    def _support_hits(self, x: Entries) -> Iterable[SchwartzElem]:
        for t in self.terms:
            if all(valuation(xi - di, self.p) >= t.depth for xi, di in zip(x, t.centre)):
                yield t

    def evaluate(self, x: Sequence) -> Scalar:
        """Exact value at a rational point (row-major entries)."""
        x = tuple(Fraction(v) for v in x)
        total = Scalar()
        for t in self._support_hits(x):
            phase = t.twist + sum((c * xi for c, xi in zip(t.phase, x)), Fraction(0))
            total = total + t.coeff * psi_exact(phase, self.p)
        return total

    def evaluate_numeric(self, x: Sequence) -> complex:
        x = tuple(Fraction(v) for v in x)
        total = 0j
        for t in self._support_hits(x):
            phase = t.twist + sum((c * xi for c, xi in zip(t.phase, x)), Fraction(0))
            total += t.coeff.to_complex() * psi_numeric(phase, self.p)
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            text = f"({t.coeff})*1[x-{list(map(str, t.centre))} in p^{t.depth}]"
            if any(t.phase):
                text += f"*psi(<{list(map(str, t.phase))},x>)"
            if t.twist:
                text += f"*psi({t.twist})"
            parts.append(text)
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def fourier(phi: SchwartzSpan, conj: bool = False) -> SchwartzSpan:
    """Fourier transform against psi (conj=False) or its conjugate; self-dual measure."""
    p = phi.p
    out = []
    for t in phi.terms:
        pairing = sum((c * d for c, d in zip(t.phase, t.centre)), Fraction(0))
        coeff = t.coeff * (Fraction(p) ** (-t.depth * t.dim))
        if conj:
            phase, centre = tuple(-d for d in t.centre), t.phase
        else:
            phase, centre = t.centre, tuple(-c for c in t.phase)
        out.append(SchwartzElem(t.shape, phase, centre, -t.depth, t.twist + pairing, coeff))
    return SchwartzSpan.build(p, phi.shape, out)


def _transpose_entries(entries: Entries, shape: Shape) -> Entries:
    a, b = shape
    return tuple(entries[i * b + j] for j in range(b) for i in range(a))


def transpose(phi: SchwartzSpan) -> SchwartzSpan:
    a, b = phi.shape
    out = [
        SchwartzElem((b, a), _transpose_entries(t.phase, t.shape), _transpose_entries(t.centre, t.shape), t.depth, t.twist, t.coeff)
        for t in phi.terms
    ]
    return SchwartzSpan.build(phi.p, (b, a), out)


def negate_arg(phi: SchwartzSpan) -> SchwartzSpan:
    """x -> phi(-x)."""
    out = [
        SchwartzElem(t.shape, tuple(-c for c in t.phase), tuple(-d for d in t.centre), t.depth, t.twist, t.coeff)
        for t in phi.terms
    ]
    return SchwartzSpan.build(phi.p, phi.shape, out)


def _rows(entries: Entries, shape: Shape) -> mx.Matrix:
    a, b = shape
    return tuple(tuple(entries[i * b : (i + 1) * b]) for i in range(a))


def _flatten(m: mx.Matrix) -> Entries:
    return tuple(x for row in m for x in row)


def right_translate(phi: SchwartzSpan, g: mx.Matrix) -> SchwartzSpan:
    """(g.phi)(x) = phi(x g) for g in GL_b."""
    a, b = phi.shape
    if mx.size(g) != b:
        raise DimensionError(f"cannot translate k^({a}x{b}) by a {len(g)}x{len(g)} matrix")
    g_inv = mx.inverse(g)
    g_t = mx.transpose(g)
    p = phi.p
    out: List[SchwartzElem] = []
    for t in phi.terms:
        # lattice p^m O^b g^-1 = O^b D k2 with h = p^m g^-1 = k1 D k2
        h = mx.mat_scale(g_inv, Fraction(p) ** t.depth)
        _, d_mat, k2 = mx.smith_form(h, p)
        exps = [valuation(d_mat[i][i], p) for i in range(b)]
        units = [d_mat[i][i] for i in range(b)]
        fine = max(exps)
        per_row = 1
        for e in exps:
            per_row *= p ** (fine - e)
        if per_row**a > MAX_REFINEMENT:
            raise CapabilityError(f"right translation would create {per_row ** a} terms")
        row_offsets = []
        for ks in product(*[range(p ** (fine - e)) for e in exps]):
            vec = [Fraction(0)] * b
            for i, k in enumerate(ks):
                for j in range(b):
                    vec[j] += k * units[i] * k2[i][j]
            row_offsets.append(tuple(vec))
        base = mx.mat_mul(_rows(t.centre, t.shape), g_inv)
        phase = _flatten(mx.mat_mul(_rows(t.phase, t.shape), g_t))
        for choice in product(row_offsets, repeat=a):
            centre = tuple(base[i][j] + choice[i][j] for i in range(a) for j in range(b))
            out.append(SchwartzElem(t.shape, phase, centre, fine, t.twist, t.coeff))
    return SchwartzSpan.build(p, phi.shape, out)


def schwartz_transform(phi: SchwartzSpan, action, g: Optional[mx.Matrix] = None) -> SchwartzSpan:
    """Dispatch on a ``SchwartzAction``."""
    from app.core.models import SchwartzAction

    action = SchwartzAction(action)
    if action == SchwartzAction.TRANSPOSE:
        return transpose(phi)
    if action == SchwartzAction.NEGATE_ARG:
        return negate_arg(phi)
    if g is None:
        raise DomainError("right translation needs a matrix")
    return right_translate(phi, g)


def tensor(first: SchwartzSpan, second: SchwartzSpan, stack_rows: bool = True) -> SchwartzSpan:
    """phi1 (x) phi2 on stacked rows (or concatenated columns)."""
    if first.p != second.p:
        raise DimensionError("tensor factors live over different fields")
    (a1, b1), (a2, b2) = first.shape, second.shape
    if stack_rows and b1 != b2:
        raise DimensionError(f"row stacking needs equal widths, got {b1} and {b2}")
    if not stack_rows and a1 != a2:
        raise DimensionError(f"column concatenation needs equal heights, got {a1} and {a2}")
    depth = max(first.max_depth(), second.max_depth())
    left, right = first.refine(depth), second.refine(depth)
    shape = (a1 + a2, b1) if stack_rows else (a1, b1 + b2)

    def join(x: Entries, y: Entries) -> Entries:
        if stack_rows:
            return x + y
        rows_x, rows_y = _rows(x, (a1, b1)), _rows(y, (a2, b2))
        return tuple(v for rx, ry in zip(rows_x, rows_y) for v in rx + ry)

    out = [
        SchwartzElem(shape, join(s.phase, t.phase), join(s.centre, t.centre), depth, s.twist + t.twist, s.coeff * t.coeff)
        for s in left.terms
        for t in right.terms
    ]
    return SchwartzSpan.build(first.p, shape, out)


# ---------------------------------------------------------------------------
# Real place: P(x) exp(-pi x^2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealSchwartz:
    """x -> (sum_k coeffs[k] x^k) exp(-pi x^2); coefficients are mpmath complex numbers"""

    coeffs: Tuple = (mpmath.mpc(1),)

    @classmethod
    def gaussian_moment(cls, k: int) -> "RealSchwartz":
        """x^k exp(-pi x^2)."""
        return cls(tuple(mpmath.mpc(0) for _ in range(k)) + (mpmath.mpc(1),))

    def __call__(self, x) -> mpmath.mpc:
        return mpmath.polyval(list(reversed(self.coeffs)), x) * mpmath.exp(-mpmath.pi * x * x)

    def lowest_degree(self, parity: Optional[int] = None) -> Optional[int]:
        for k, c in enumerate(self.coeffs):
            if c != 0 and (parity is None or k % 2 == parity):
                return k
        return None

    def fourier(self, conj: bool = False) -> "RealSchwartz":
        """Transform against exp(2 pi i x y) (or its conjugate); x f -> (+-1/(2 pi i)) d/dy F(f)."""
        sign = -1 if conj else 1
        factor = sign / (2j * mpmath.pi)
        current: List = [mpmath.mpc(1)]  # transform of x^k e^{-pi x^2} is current(y) e^{-pi y^2}
        total: List = [mpmath.mpc(0)] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if k:
                deriv = [i * current[i] for i in range(1, len(current))] + [mpmath.mpc(0), mpmath.mpc(0)]
                shifted = [mpmath.mpc(0)] + [2 * mpmath.pi * v for v in current]
                current = [factor * (deriv[i] - shifted[i]) for i in range(len(current) + 1)]
            if len(total) < len(current):
                total += [mpmath.mpc(0)] * (len(current) - len(total))
            for i, v in enumerate(current):
                total[i] += c * v
        return RealSchwartz(tuple(total))
