"""Exact scalars in Q(i)[r]/(r^2 - q) and rational functions in Y = q^(-s/2)

Every exact integral in the workbench is a ``RatFun``. Coefficients are ``Scalar``
values with four rational coordinates over the basis {1, i, r, ir}, where r = sqrt(q).
"""

import logging
import re
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from app.config import settings
from app.core.exceptions import AlgebraError, PoleCollisionError, PoleError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
_F0 = Fraction(0)
_F1 = Fraction(1)


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


class Scalar:
    """Element a + b*i + (c + d*i)*r of Q(i)[r]/(r^2 - q)

    ``q`` is only tracked while the r-part is nonzero; purely Gaussian-rational
    values combine freely with elements over any q.
    """

    __slots__ = ("a", "b", "c", "d", "q")

    def __init__(self, a: Rational = 0, b: Rational = 0, c: Rational = 0, d: Rational = 0, q: Optional[int] = None):
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)
        if self.c or self.d:
            if q is None:
                raise AlgebraError("an r-part needs the residue cardinality q")
            self.q = q
        else:
            self.q = None

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, c: Fraction, d: Fraction, q: Optional[int]) -> "Scalar":
        obj = object.__new__(cls)
        obj.a, obj.b, obj.c, obj.d = a, b, c, d
        obj.q = q if (c or d) else None
        return obj

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw(_frac(x), _F0, _F0, _F0, None)
        if isinstance(x, complex):
            raise AlgebraError("floating point values cannot enter the exact scalar field")
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    @classmethod
    def gaussian(cls, re_part: Rational, im_part: Rational = 0) -> "Scalar":
        return cls(re_part, im_part)

    @classmethod
    def imag_unit(cls) -> "Scalar":
        return cls(0, 1)

    @classmethod
    def r_power(cls, n: int, q: int) -> "Scalar":
        """r**n = q**(n/2) for any integer n."""
        k, odd = divmod(n, 2)
        base = Fraction(q) ** k
        if odd:
            return cls._raw(_F0, _F0, base, _F0, q)
        return cls._raw(base, _F0, _F0, _F0, None)

    @classmethod
    def q_power(cls, exponent: Rational, q: int) -> "Scalar":
        """q**exponent for a half-integer exponent."""
        twice = Fraction(exponent) * 2
        if twice.denominator != 1:
            raise AlgebraError(f"q-power exponent {exponent} is not a half-integer")
        return cls.r_power(int(twice), q)

    # ---- predicates -------------------------------------------------

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def is_gaussian(self) -> bool:
        return not (self.c or self.d)

    # ---- arithmetic -------------------------------------------------

    def _q_with(self, other: "Scalar") -> Optional[int]:
        if self.q is None:
            return other.q
        if other.q is not None and other.q != self.q:
            raise AlgebraError(f"mixing scalars over q={self.q} and q={other.q}")
        return self.q

    def __add__(self, other) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._raw(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d, self._q_with(o))

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.a, -self.b, -self.c, -self.d, self.q)

    def __sub__(self, other) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._raw(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d, self._q_with(o))

    def __rsub__(self, other) -> "Scalar":
        return (-self) + other

    def __mul__(self, other) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not (o.b or o.c or o.d):
            x = o.a
            return Scalar._raw(self.a * x, self.b * x, self.c * x, self.d * x, self.q)
        if not (self.b or self.c or self.d):
            x = self.a
            return Scalar._raw(o.a * x, o.b * x, o.c * x, o.d * x, o.q)
        q = self._q_with(o)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        re_aa, im_aa = a1 * a2 - b1 * b2, a1 * b2 + b1 * a2
        re_ab = a1 * c2 - b1 * d2 + c1 * a2 - d1 * b2
        im_ab = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
        if c1 or d1:
            if c2 or d2:
                re_aa += q * (c1 * c2 - d1 * d2)
                im_aa += q * (c1 * d2 + d1 * c2)
        return Scalar._raw(re_aa, im_aa, re_ab, im_ab, q)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise AlgebraError("division by zero scalar")
        a, b, c, d = self.a, self.b, self.c, self.d
        if not (b or c or d):
            return Scalar._raw(1 / a, _F0, _F0, _F0, None)
        q = self.q or 0
        # (A + B r)^-1 = (A - B r) / (A^2 - q B^2), with A, B Gaussian
        n_re = a * a - b * b - q * (c * c - d * d)
        n_im = 2 * a * b - 2 * q * c * d
        mod = n_re * n_re + n_im * n_im
        if not mod:
            raise AlgebraError("scalar norm vanished; q is not a prime")
        inv_re, inv_im = n_re / mod, -n_im / mod
        return Scalar._raw(
            a * inv_re - b * inv_im,
            a * inv_im + b * inv_re,
            -(c * inv_re - d * inv_im),
            -(c * inv_im + d * inv_re),
            self.q,
        )

    def __truediv__(self, other) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise AlgebraError("scalar powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar._raw(_F1, _F0, _F0, _F0, None)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Scalar":
        """Complex conjugate (i -> -i, r fixed)."""
        return Scalar._raw(self.a, -self.b, self.c, -self.d, self.q)

    # ---- comparison and conversion ----------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.a == other and not (self.b or self.c or self.d)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.c == other.c and self.d == other.d

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def to_complex(self) -> complex:
        root = float(np.sqrt(self.q)) if self.q else 0.0
        return complex(float(self.a) + float(self.c) * root, float(self.b) + float(self.d) * root)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __str__(self) -> str:
        parts = []
        for value, suffix in ((self.a, ""), (self.b, "*i"), (self.c, "*r"), (self.d, "*i*r")):
            if not value:
                continue
            text = str(value) + suffix
            if parts and not text.startswith("-"):
                text = "+" + text
            parts.append(text)
        return "".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Scalar({self})" if self.q is None else f"Scalar({self}; q={self.q})"


_SCALAR_TERM = re.compile(r"([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*(i\*r|i|r)?\s*")


def parse_scalar(text: str, q: Optional[int] = None) -> Scalar:
    """Parse "2/3+1/3i", "-1/2*r" or "3/5+1/5*i*r" style strings.

    Raises:
        ValueError: on malformed input
    """
    source = text.replace(" ", "")
    if not source:
        raise ValueError("empty scalar string")
    coords = {"": _F0, "i": _F0, "r": _F0, "i*r": _F0}
    pos = 0
    while pos < len(source):
        match = _SCALAR_TERM.match(source, pos)
        if not match or match.end() == pos or not (match.group(2) or match.group(3)):
            raise ValueError(f"cannot parse scalar {text!r} at position {pos}")
        sign = -1 if match.group(1) == "-" else 1
        coeff = Fraction(match.group(2)) if match.group(2) else _F1
        coords[match.group(3) or ""] += sign * coeff
        pos = match.end()
    if (coords["r"] or coords["i*r"]) and q is None:
        raise ValueError(f"scalar {text!r} uses r but no q was given")
    return Scalar(coords[""], coords["i"], coords["r"], coords["i*r"], q)


# ---------------------------------------------------------------------------
# Dense polynomials with Scalar coefficients (lowest degree first)
# ---------------------------------------------------------------------------

Poly = Tuple[Scalar, ...]

S_ZERO = Scalar()
S_ONE = Scalar(1)


def _trim(coeffs: Sequence[Scalar]) -> Poly:
    end = len(coeffs)
    while end and coeffs[end - 1].is_zero():
        end -= 1
    return tuple(coeffs[:end])


def poly_add(p: Poly, r: Poly) -> Poly:
    if len(p) < len(r):
        p, r = r, p
    out = list(p)
    for i, c in enumerate(r):
        out[i] = out[i] + c
    return _trim(out)


def poly_neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def poly_sub(p: Poly, r: Poly) -> Poly:
    return poly_add(p, poly_neg(r))


def poly_scale(p: Poly, c: Scalar) -> Poly:
    if c.is_zero():
        return ()
    return tuple(x * c for x in p)


def poly_mul(p: Poly, r: Poly) -> Poly:
    if not p or not r:
        return ()
    if len(p) == 1:
        return poly_scale(r, p[0])
    if len(r) == 1:
        return poly_scale(p, r[0])
    out = [S_ZERO] * (len(p) + len(r) - 1)
    for i, x in enumerate(p):
        if x.is_zero():
            continue
        for j, y in enumerate(r):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_shift(p: Poly, k: int) -> Poly:
    """Multiply by Y**k, k >= 0."""
    return tuple([S_ZERO] * k) + p if p else ()


def poly_divmod(p: Poly, r: Poly) -> Tuple[Poly, Poly]:
    if not r:
        raise AlgebraError("polynomial division by zero")
    if len(p) < len(r):
        return (), p
    rem = list(p)
    lead_inv = r[-1].inverse()
    quot = [S_ZERO] * (len(p) - len(r) + 1)
    for k in range(len(p) - len(r), -1, -1):
        c = rem[k + len(r) - 1]
        if c.is_zero():
            continue
        c = c * lead_inv
        quot[k] = c
        for j, y in enumerate(r):
            if not y.is_zero():
                rem[k + j] = rem[k + j] - c * y
    return _trim(quot), _trim(rem[: len(r) - 1])


def poly_monic(p: Poly) -> Poly:
    lead = p[-1]
    if lead == 1:
        return p
    return poly_scale(p, lead.inverse())


def poly_gcd(p: Poly, r: Poly) -> Poly:
    while r:
        p, r = r, poly_divmod(p, r)[1]
    return poly_monic(p) if p else ()


def poly_eval(p: Poly, x):
    acc = S_ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _low_order(p: Poly) -> int:
    for k, c in enumerate(p):
        if not c.is_zero():
            return k
    return 0


# ---------------------------------------------------------------------------
# Rational functions in Y
# ---------------------------------------------------------------------------


class RatFun:
    """Reduced quotient num(Y)/den(Y) with a monic denominator"""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence, den: Sequence = (S_ONE,)):
        n = _trim([Scalar.coerce(c) for c in num])
        d = _trim([Scalar.coerce(c) for c in den])
        self.num, self.den = _canonical(n, d)

    @classmethod
    def _make(cls, num: Poly, den: Poly) -> "RatFun":
        obj = object.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    @classmethod
    def constant(cls, value) -> "RatFun":
        s = Scalar.coerce(value)
        return cls._make((s,) if s else (), (S_ONE,))

    @classmethod
    def monomial(cls, coeff, power: int) -> "RatFun":
        """coeff * Y**power, power may be negative."""
        s = Scalar.coerce(coeff)
        if s.is_zero():
            return cls._make((), (S_ONE,))
        if power >= 0:
            return cls._make(poly_shift((s,), power), (S_ONE,))
        return cls._make((s,), poly_shift((S_ONE,), -power))

    @classmethod
    def variable(cls) -> "RatFun":
        return cls.monomial(S_ONE, 1)

    # ---- structure --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def is_constant(self) -> bool:
        return len(self.den) == 1 and len(self.num) <= 1

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise AlgebraError(f"{self} is not constant")
        return self.num[0] if self.num else S_ZERO

    def as_monomial(self) -> Optional[Tuple[Scalar, int]]:
        """(c, k) when the function is c * Y**k, else None; zero gives (0, 0)."""
        if not self.num:
            return S_ZERO, 0
        lo = _low_order(self.num)
        if lo != len(self.num) - 1:
            return None
        dlo = _low_order(self.den)
        if dlo != len(self.den) - 1:
            return None
        return self.num[-1], lo - dlo

    # ---- arithmetic -------------------------------------------------

    @staticmethod
    def _lift(other) -> Optional["RatFun"]:
        if isinstance(other, RatFun):
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return RatFun.constant(other)
        return None

    def __add__(self, other) -> "RatFun":
        o = RatFun._lift(other)
        if o is None:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            if len(self.den) == 1:
                return RatFun._make(poly_add(self.num, o.num), self.den)
            return RatFun._build(poly_add(self.num, o.num), self.den)
        return RatFun._build(
            poly_add(poly_mul(self.num, o.den), poly_mul(o.num, self.den)),
            poly_mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun._make(poly_neg(self.num), self.den)

    def __sub__(self, other) -> "RatFun":
        o = RatFun._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "RatFun":
        return (-self) + other

    def __mul__(self, other) -> "RatFun":
        if isinstance(other, (Scalar, int, Fraction)):
            s = Scalar.coerce(other)
            if s.is_zero():
                return RatFun._make((), (S_ONE,))
            return RatFun._make(poly_scale(self.num, s), self.den)
        if not isinstance(other, RatFun):
            return NotImplemented
        if not self.num or not other.num:
            return RatFun._make((), (S_ONE,))
        if len(self.den) == 1 and len(other.den) == 1:
            return RatFun._checked(poly_mul(self.num, other.num), (S_ONE,))
        return RatFun._build(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if not self.num:
            raise AlgebraError("division by the zero rational function")
        lead = self.num[-1]
        inv = lead.inverse()
        return RatFun._make(poly_scale(self.den, inv), poly_scale(self.num, inv))

    def __truediv__(self, other) -> "RatFun":
        if isinstance(other, (Scalar, int, Fraction)):
            s = Scalar.coerce(other)
            return RatFun._make(poly_scale(self.num, s.inverse()), self.den)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFun":
        return RatFun.constant(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return self.inverse() ** (-n)
        result = RatFun.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    @staticmethod
    def _checked(num: Poly, den: Poly) -> "RatFun":
        cap = settings.RATFUN_DEGREE_CAP
        if len(num) - 1 > cap or len(den) - 1 > cap:
            raise AlgebraError(f"rational function degree exceeds cap {cap}")
        return RatFun._make(num, den)

    @staticmethod
    def _build(num: Poly, den: Poly) -> "RatFun":
        n, d = _canonical(num, den)
        return RatFun._checked(n, d)

    # ---- substitution and evaluation --------------------------------

    def substitute_power(self, k: int) -> "RatFun":
        """f(Y**k) for a nonzero integer k."""
        if k == 0:
            raise AlgebraError("substitution Y -> Y**0 is not invertible")
        num = _spread(self.num, abs(k))
        den = _spread(self.den, abs(k))
        if k > 0:
            return RatFun._build(num, den)
        # f(Y^-k): multiply through by Y^(k*deg)
        top = max(len(num), len(den)) - 1
        return RatFun._build(_reverse_pad(num, top), _reverse_pad(den, top))

    def reflect(self, q: int) -> "RatFun":
        """The substitution s -> 1 - s, i.e. Y -> q^(-1/2) / Y."""
        c = Scalar.r_power(-1, q)
        top = max(len(self.num), len(self.den)) - 1

        def flipped(p: Poly) -> Poly:
            out = [S_ZERO] * (top + 1)
            power = S_ONE
            for k, coeff in enumerate(p):
                out[top - k] = coeff * power
                power = power * c
            return _trim(out)

        return RatFun._build(flipped(self.num), flipped(self.den))

    def evaluate(self, y: complex) -> complex:
        return complex(self.evaluate_many(np.asarray([y], dtype=complex))[0])

    def evaluate_many(self, ys: np.ndarray) -> np.ndarray:
        """Floating-point values at many points; r maps to sqrt(q)."""
        ys = np.asarray(ys, dtype=complex)
        den_coeffs = np.array([c.to_complex() for c in self.den], dtype=complex)
        num_coeffs = np.array([c.to_complex() for c in self.num], dtype=complex)
        den_vals = np.polyval(den_coeffs[::-1], ys)
        scale = np.maximum(1.0, np.polyval(np.abs(den_coeffs[::-1]), np.abs(ys)))
        near = np.abs(den_vals) < settings.POLE_TOLERANCE * scale
        if np.any(near):
            bad = complex(ys[np.argmax(near)])
            roots = np.roots(den_coeffs[::-1]) if len(den_coeffs) > 1 else np.array([])
            root = complex(roots[np.argmin(np.abs(roots - bad))]) if roots.size else None
            raise PoleError(f"evaluation at Y={bad:.6g} hits a pole of {self}", root=root)
        if not len(num_coeffs):
            return np.zeros_like(ys)
        return np.polyval(num_coeffs[::-1], ys) / den_vals

    # ---- comparison and formatting ----------------------------------

    def __eq__(self, other) -> bool:
        o = RatFun._lift(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __str__(self) -> str:
        return f"{_poly_str(self.num)} / {_poly_str(self.den)}"

    def __repr__(self) -> str:
        return f"RatFun({self})"


def _poly_str(p: Poly) -> str:
    if not p:
        return "0"
    terms = []
    for k, c in enumerate(p):
        if c.is_zero():
            continue
        coeff = f"({c})"
        if k == 0:
            terms.append(coeff)
        elif k == 1:
            terms.append(f"{coeff}*Y")
        else:
            terms.append(f"{coeff}*Y^{k}")
    return " + ".join(terms)


def _spread(p: Poly, k: int) -> Poly:
    if not p or k == 1:
        return p
    out = [S_ZERO] * ((len(p) - 1) * k + 1)
    for i, c in enumerate(p):
        out[i * k] = c
    return tuple(out)


def _reverse_pad(p: Poly, top: int) -> Poly:
    out = [S_ZERO] * (top + 1)
    for i, c in enumerate(p):
        out[top - i] = c
    return _trim(out)


def _canonical(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    if not den:
        raise AlgebraError("zero denominator")
    if not num:
        return (), (S_ONE,)
    # strip a common power of Y before the Euclidean gcd
    shift = min(_low_order(num), _low_order(den))
    if shift:
        num, den = num[shift:], den[shift:]
    if len(den) > 1 and len(num) > 1:
        g = poly_gcd(num, den)
        if len(g) > 1:
            num = poly_divmod(num, g)[0]
            den = poly_divmod(den, g)[0]
    lead = den[-1]
    if lead != 1:
        inv = lead.inverse()
        num, den = poly_scale(num, inv), poly_scale(den, inv)
    return num, den


def ratfun_canonicalize(f: RatFun) -> RatFun:
    """Reduced, monic-denominator representative; idempotent."""
    return RatFun._build(f.num, f.den)


def ratfun_eval(f: RatFun, y: complex) -> complex:
    return f.evaluate(y)


# ---------------------------------------------------------------------------
# Linear recurrences and formal series sums
# ---------------------------------------------------------------------------

T = TypeVar("T", Scalar, RatFun)


def berlekamp_massey(seq: Sequence[T], one: T) -> List[T]:
    """Shortest connection polynomial [1, c1, ..., cL] generating ``seq``.

    seq[n] + c1*seq[n-1] + ... + cL*seq[n-L] = 0 for every n >= L.
    """
    zero = one - one
    conn: List[T] = [one]
    prev: List[T] = [one]
    length, gap, prev_disc = 0, 1, one
    for n, term in enumerate(seq):
        disc = term
        for i in range(1, length + 1):
            if i < len(conn):
                disc = disc + conn[i] * seq[n - i]
        if disc == 0:
            gap += 1
            continue
        factor = disc / prev_disc
        updated = list(conn) + [zero] * max(0, len(prev) + gap - len(conn))
        for i, c in enumerate(prev):
            updated[i + gap] = updated[i + gap] - factor * c
        if 2 * length <= n:
            prev, prev_disc = conn, disc
            length = n + 1 - length
            gap = 1
        else:
            gap += 1
        conn = updated
    conn = list(conn[: length + 1]) + [zero] * max(0, length + 1 - len(conn))
    return conn


def series_numerator(seq: Sequence[T], conn: Sequence[T], zero: T) -> List[T]:
    """First L coefficients of conn(X) * sum(seq[k] X^k)."""
    length = len(conn) - 1
    out = []
    for k in range(length):
        acc = zero
        for j in range(k + 1):
            if j < len(conn):
                acc = acc + conn[j] * seq[k - j]
        out.append(acc)
    return out


def recurrence_order(seq: Sequence[T], one: T) -> int:
    return len(berlekamp_massey(seq, one)) - 1


def generating_function(
    term: Callable[[int], T],
    one: T,
    order_bound: Optional[int] = None,
    verify_terms: Optional[int] = None,
) -> Tuple[List[T], List[T], int]:
    """(P, C, terms used) with sum_k term(k) X^k = P(X) / C(X).

    ``order_bound`` is an a-priori bound D on the order of the true recurrence,
    transient included. A recurrence of order L found by Berlekamp-Massey on
    N >= L + D terms is the true one; the count grows until that holds, plus
    ``verify_terms`` further terms. At most 2D + 1 + verify_terms terms are used.

    Raises:
        AlgebraError: the sequence needs a recurrence longer than the bound
    """
    bound = order_bound if order_bound is not None else settings.RAY_ORDER_BOUND
    extra = verify_terms if verify_terms is not None else settings.RAY_VERIFY_TERMS
    zero = one - one
    terms: List[T] = []
    count = min(settings.RAY_MIN_TERMS, 2 * bound + 1)
    while True:
        while len(terms) < count:
            terms.append(term(len(terms)))
        conn = berlekamp_massey(terms, one)
        order = len(conn) - 1
        if order > bound:
            raise AlgebraError(f"shell sequence needs a recurrence of order {order}, above the bound {bound}")
        needed = order + bound + 1 + extra
        if count >= needed:
            break
        count = needed
    return series_numerator(terms, conn, zero), conn, count


def sum_recurrent(
    term: Callable[[int], T],
    one: T,
    order_bound: Optional[int] = None,
    verify_terms: Optional[int] = None,
) -> Tuple[T, int]:
    """Formal value of sum_{k>=0} term(k) for a linearly recurrent sequence.

    The sum is P(1)/C(1) where C is the Berlekamp-Massey connection polynomial and
    P/C the generating function. Returns (value, recurrence order).

    Raises:
        PoleCollisionError: C(1) = 0
        AlgebraError: the sequence needs a recurrence longer than ``order_bound``
    """
    numer, conn, count = generating_function(term, one, order_bound, verify_terms)
    zero = one - one
    at_one = zero
    for c in conn:
        at_one = at_one + c
    if at_one == 0:
        raise PoleCollisionError("formal shell sum has a pole at the summation point")
    top = zero
    for c in numer:
        top = top + c
    order = len(conn) - 1
    logger.debug(f"ray summed with recurrence order {order} from {count} terms")
    return top / at_one, order


def sum_geometric_tail(term: Callable[[int], T], one: T, transient: int) -> Optional[T]:
    """sum_{k>=0} term(k) when term(k + 1) = rho * term(k) for every k >= transient.

    The head below ``transient`` is added term by term and the tail is
    term(transient) / (1 - rho). Returns None when the two terms past the first
    tail term do not share the ratio.

    Raises:
        PoleCollisionError: rho = 1
    """
    zero = one - one
    head = zero
    for k in range(transient):
        head = head + term(k)
    first, second, third = term(transient), term(transient + 1), term(transient + 2)
    if first == 0:
        return head if second == 0 and third == 0 else None
    ratio = second / first
    if third != ratio * second:
        return None
    gap = one - ratio
    if gap == 0:
        raise PoleCollisionError("geometric shell sum with ratio 1")
    return head + first / gap
