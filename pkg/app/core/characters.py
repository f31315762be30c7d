"""Characters of k^x, character tuples, exponents and sign products"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Tuple, Union

from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import AlgebraError, DomainError, UnsupportedFieldError
from app.core.localfield import INFINITY, LocalFieldDesc, valuation

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class MultChar:
    """omega(x) = a^v(x) |x|^t (p-adic) or sgn(x)^eps |x|^t (real), times |x|^(shift*s)

    ``shift`` carries a symbolic |.|^s twist (chi_s has shift 1).
    """

    field: LocalFieldDesc
    a: Scalar = dc_field(default_factory=lambda: Scalar(1))
    t: Fraction = Fraction(0)
    eps: int = 0
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.field.is_padic:
            if self.a.is_zero():
                raise DomainError("Satake parameter must be nonzero")
            if self.eps:
                raise DomainError("p-adic unramified characters carry no sign")
        else:
            if self.eps not in (0, 1):
                raise DomainError(f"sign exponent must be 0 or 1, got {self.eps}")
            if self.a != 1:
                raise DomainError("real characters carry no Satake parameter")

    def inverse(self) -> "MultChar":
        return MultChar(self.field, self.a.inverse(), -self.t, self.eps, -self.shift)

    def __mul__(self, other: "MultChar") -> "MultChar":
        if not isinstance(other, MultChar):
            return NotImplemented
        if other.field != self.field:
            raise DomainError(f"characters over {self.field} and {other.field} do not multiply")
        return MultChar(
            self.field,
            self.a * other.a,
            self.t + other.t,
            (self.eps + other.eps) % 2,
            self.shift + other.shift,
        )

    def twist(self, t: Rational) -> "MultChar":
        """omega * |.|^t."""
        return MultChar(self.field, self.a, self.t + Fraction(t), self.eps, self.shift)

    def with_shift(self, shift: Rational) -> "MultChar":
        """omega * |.|^(shift*s) on top of the existing shift."""
        return MultChar(self.field, self.a, self.t, self.eps, self.shift + Fraction(shift))

    def at_minus_one(self) -> Scalar:
        if self.field.is_padic:
            return Scalar(1)
        return Scalar(-1 if self.eps else 1)

    def uniformizer_value(self) -> RatFun:
        """omega(p) as a monomial in Y."""
        return char_eval(self, self.field.q)

    def __str__(self) -> str:
        if self.field.is_padic:
            text = f"unr({self.a})"
        else:
            text = "sgn" if self.eps else "1"
        if self.t:
            text += f"|.|^{self.t}"
        if self.shift:
            text += f"|.|^({self.shift}s)"
        return text


def unr(field: LocalFieldDesc, a, t: Rational = 0) -> MultChar:
    field.require_padic()
    return MultChar(field, Scalar.coerce(a), Fraction(t))


def real_char(eps: int = 0, t: Rational = 0) -> MultChar:
    return MultChar(LocalFieldDesc.real(), Scalar(1), Fraction(t), eps)


def ex(omega: MultChar) -> float:
    """The real number e with |omega(x)| = |x|^e."""
    if not omega.field.is_padic:
        return float(omega.t)
    modulus = abs(omega.a.to_complex())
    return float(omega.t) - math.log(modulus) / math.log(omega.field.q)


def char_eval(omega: MultChar, x: Rational, s_shift: Rational = 0) -> RatFun:
    """a^v q^(-t v) Y^(2 shift v) with v = v(x); ``s_shift`` adds to the stored shift.

    Raises:
        DomainError: x = 0, or a twist that is not a half-integer
        UnsupportedFieldError: real characters
    """
    if not omega.field.is_padic:
        raise UnsupportedFieldError("exact character values exist only over Q_p")
    v = valuation(x, omega.field.q)
    if v == INFINITY:
        raise DomainError("character evaluated at zero")
    coeff, y_power = char_monomial(omega, v, s_shift)
    return RatFun.monomial(coeff, y_power)


@lru_cache(maxsize=65_536)
def char_monomial(omega: MultChar, v: int, s_shift: Rational = 0) -> Tuple[Scalar, int]:
    """(c, k) with omega(p^v) = c * Y**k."""
    q = omega.field.q
    shift = omega.shift + Fraction(s_shift)
    y_power = 2 * shift * v
    if y_power.denominator != 1:
        raise DomainError(f"s-shift {shift} is not a half-integer")
    try:
        q_part = Scalar.q_power(-omega.t * v, q)
    except AlgebraError as exc:
        raise DomainError(f"twist {omega.t} is not a half-integer") from exc
    return omega.a**v * q_part, int(y_power)


@dataclass(frozen=True)
class CharTuple:
    """A tuple of characters (nu_1, ..., nu_k)"""

    entries: Tuple[MultChar, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        fields = {e.field for e in self.entries}
        if len(fields) > 1:
            raise DomainError("character tuple mixes base fields")

    @classmethod
    def of(cls, *chars: MultChar) -> "CharTuple":
        return cls(tuple(chars))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[MultChar]:
        return iter(self.entries)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return CharTuple(self.entries[i])
        return self.entries[i]

    def __add__(self, other: "CharTuple") -> "CharTuple":
        return CharTuple(self.entries + tuple(other))

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def hat_dual(alpha: CharTuple) -> CharTuple:
    """(alpha_k^-1, ..., alpha_1^-1)."""
    return CharTuple(tuple(e.inverse() for e in reversed(alpha.entries)))


def check_lengths(nu: Sequence, nu_prime: Sequence) -> None:
    n, n_prime = len(nu), len(nu_prime)
    if n_prime not in (n, n - 1):
        raise DomainError(f"tuple lengths ({n}, {n_prime}) need n' in {{n, n-1}}")


def sgn_product(nu: CharTuple, nu_prime: CharTuple) -> Scalar:
    """Product of (nu_i nu'_j)(-1) over pairs j < i with i + j <= n."""
    check_lengths(nu, nu_prime)
    n = len(nu)
    result = Scalar(1)
    for i in range(1, n + 1):
        for j in range(1, min(i, len(nu_prime) + 1)):
            if i + j <= n:
                result = result * (nu[i - 1] * nu_prime[j - 1]).at_minus_one()
    return result
