"""The base local field: Q_p with psi of conductor O, or R with psi(x) = exp(2 pi i x)

Field elements in the exact path are rationals, read p-adically.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from app.core.exactalg import Scalar
from app.core.exceptions import CapabilityError, DomainError, UnsupportedFieldError
from app.core.models import FieldKind

Rational = Union[int, Fraction]
INFINITY = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class LocalFieldDesc:
    """Base field descriptor. For Q_p the residue cardinality is q = p."""

    kind: FieldKind
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == FieldKind.PADIC:
            if self.p is None or not is_prime(self.p):
                raise DomainError(f"p-adic field needs a prime p, got {self.p}")
        elif self.p is not None:
            raise DomainError("the real field carries no residue cardinality")

    @classmethod
    def padic(cls, p: int) -> "LocalFieldDesc":
        return cls(FieldKind.PADIC, p)

    @classmethod
    def real(cls) -> "LocalFieldDesc":
        return cls(FieldKind.REAL)

    @property
    def q(self) -> int:
        self.require_padic()
        return self.p

    @property
    def is_padic(self) -> bool:
        return self.kind == FieldKind.PADIC

    def require_padic(self) -> None:
        if self.kind != FieldKind.PADIC:
            raise UnsupportedFieldError("operation is defined for p-adic fields only")

    def __str__(self) -> str:
        return f"Q_{self.p}" if self.is_padic else "R"


def valuation(x: Rational, p: int) -> Union[int, float]:
    """Exact p-adic valuation; +inf at zero."""
    x = Fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def finite_valuation(x: Rational, p: int) -> int:
    v = valuation(x, p)
    if v == INFINITY:
        raise DomainError("valuation of zero requested where a finite value is needed")
    return v


def abs_value(x: Rational, p: int) -> Fraction:
    v = valuation(x, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(p) ** (-v)


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^v(x)."""
    x = Fraction(x)
    return x / Fraction(p) ** finite_valuation(x, p)


def residue(x: Rational, p: int) -> int:
    """Residue class mod p of an element of valuation >= 0."""
    x = Fraction(x)
    if x != 0 and valuation(x, p) < 0:
        raise DomainError(f"{x} is not p-adically integral for p={p}")
    return (x.numerator * pow(x.denominator, -1, p)) % p


def padic_fractional_part(x: Rational, p: int) -> Fraction:
    """{x}_p in [0, 1) with p-power denominator and x - {x}_p p-integral."""
    x = Fraction(x)
    den = x.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return Fraction(0)
    modulus = p**k
    top = (x.numerator * pow(den, -1, modulus)) % modulus
    return Fraction(top, modulus)


def reduce_mod_lattice(x: Rational, m: int, p: int) -> Fraction:
    """Canonical representative of x modulo p^m O."""
    scale = Fraction(p) ** m
    return padic_fractional_part(Fraction(x) / scale, p) * scale


def psi_numeric(x: Rational, p: Optional[int] = None) -> complex:
    """psi(x) as a complex double; p=None selects the real character."""
    if p is None:
        return cmath.exp(2j * math.pi * float(x))
    return cmath.exp(2j * math.pi * float(padic_fractional_part(x, p)))


def psi_exact(x: Rational, p: int) -> Scalar:
    """psi(x) in Q(i), defined when {x}_p has denominator dividing 4.

    Raises:
        CapabilityError: the value is a root of unity outside Q(i)
    """
    frac = padic_fractional_part(x, p)
    if frac == 0:
        return Scalar(1)
    if frac == Fraction(1, 2):
        return Scalar(-1)
    if frac == Fraction(1, 4):
        return Scalar(0, 1)
    if frac == Fraction(3, 4):
        return Scalar(0, -1)
    raise CapabilityError(f"psi({x}) is a primitive root of unity of order {frac.denominator}")


def psi_ball_integral(field: LocalFieldDesc, c: Rational, m: int) -> Scalar:
    """Integral of psi(c u) over p^m O: q^-m if v(c) + m >= 0, else 0."""
    field.require_padic()
    q = field.q
    if valuation(c, q) + m >= 0:
        return Scalar(Fraction(q) ** (-m))
    return Scalar(0)


def psi_ball_riemann_sum(field: LocalFieldDesc, c: Rational, m: int, depth: Optional[int] = None) -> complex:
    """Finite Riemann sum of psi(c u) over p^m O at resolution p^depth O."""
    field.require_padic()
    q = field.q
    v = valuation(c, q)
    if depth is None:
        depth = m + 2 if v == INFINITY else max(m, -v) + 2
    if depth < m:
        raise DomainError("Riemann sum depth must not be coarser than the ball")
    step = Fraction(q) ** m
    cell = float(Fraction(q) ** (-depth))
    total = 0j
    for k in range(q ** (depth - m)):
        total += psi_numeric(Fraction(c) * k * step, q)
    return total * cell
