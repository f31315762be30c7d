"""Local L, epsilon and gamma factors and the identities between them"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from app.config import settings
from app.core.characters import CharTuple, MultChar, char_monomial, check_lengths, hat_dual, sgn_product
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import DomainError, PoleError
from app.core.localfield import LocalFieldDesc
from app.core.schwartz import RealSchwartz, SchwartzSpan, fourier

logger = logging.getLogger(__name__)

# Off the real axis, so no Gamma pole of a half-integer twist is ever hit.
SAMPLE_S: Tuple[complex, ...] = (0.3 + 0.4j, 0.7 - 0.2j, 1.5 + 0.1j, -0.4 + 0.9j, 2.2 - 0.6j)


# ---------------------------------------------------------------------------
# Factor values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealFactor:
    """const * prod over terms of Gamma_R(a s + b)^sign, Gamma_R(z) = pi^(-z/2) Gamma(z/2)"""

    const: Scalar = dc_field(default_factory=lambda: Scalar(1))
    terms: Tuple[Tuple[int, Fraction, Fraction], ...] = ()

    @classmethod
    def build(cls, const: Scalar, terms) -> "RealFactor":
        powers: Dict[Tuple[Fraction, Fraction], int] = defaultdict(int)
        for sign, a, b in terms:
            powers[(Fraction(a), Fraction(b))] += sign
        kept = tuple(sorted((e, a, b) for (a, b), e in powers.items() if e))
        return cls(const, kept)

    def __mul__(self, other: "RealFactor") -> "RealFactor":
        return RealFactor.build(self.const * other.const, self.terms + other.terms)

    def inverse(self) -> "RealFactor":
        return RealFactor.build(self.const.inverse(), [(-e, a, b) for e, a, b in self.terms])

    def reflect(self) -> "RealFactor":
        """s -> 1 - s."""
        return RealFactor.build(self.const, [(e, -a, a + b) for e, a, b in self.terms])

    def evaluate(self, s: complex) -> complex:
        s = mpmath.mpc(s)
        with mpmath.workdps(settings.MPMATH_DPS):
            log_value = mpmath.mpc(0)
            for e, a, b in self.terms:
                z = (float(a) * s + float(b)) / 2
                try:
                    log_value += e * (mpmath.loggamma(z) - z * mpmath.log(mpmath.pi))
                except (ValueError, ZeroDivisionError) as exc:
                    raise PoleError(f"Gamma pole at s={complex(s)}") from exc
            return complex(self.const.to_complex() * mpmath.exp(log_value))

    def __str__(self) -> str:
        parts = [str(self.const)]
        for e, a, b in self.terms:
            parts.append(f"Gamma_R({a}s + {b})^{e}")
        return " * ".join(parts)


@dataclass(frozen=True)
class FactorValue:
    """A local factor: a RatFun in Y over Q_p, a Gamma descriptor over R"""

    field: LocalFieldDesc
    exact: Optional[RatFun] = None
    archimedean: Optional[RealFactor] = None

    @classmethod
    def one(cls, field: LocalFieldDesc) -> "FactorValue":
        if field.is_padic:
            return cls(field, exact=RatFun.constant(1))
        return cls(field, archimedean=RealFactor())

    @classmethod
    def constant(cls, field: LocalFieldDesc, c: Scalar) -> "FactorValue":
        if field.is_padic:
            return cls(field, exact=RatFun.constant(c))
        return cls(field, archimedean=RealFactor(Scalar.coerce(c)))

    def _combine(self, other: "FactorValue", exact, archimedean) -> "FactorValue":
        if other.field != self.field:
            raise DomainError(f"factors over {self.field} and {other.field} do not combine")
        if self.field.is_padic:
            return FactorValue(self.field, exact=exact(self.exact, other.exact))
        return FactorValue(self.field, archimedean=archimedean(self.archimedean, other.archimedean))

    def __mul__(self, other: "FactorValue") -> "FactorValue":
        return self._combine(other, lambda x, y: x * y, lambda x, y: x * y)

    def __truediv__(self, other: "FactorValue") -> "FactorValue":
        return self._combine(other, lambda x, y: x / y, lambda x, y: x * y.inverse())

    def scale(self, c: Scalar) -> "FactorValue":
        return self * FactorValue.constant(self.field, c)

    def reflect(self) -> "FactorValue":
        """The factor at 1 - s."""
        if self.field.is_padic:
            return FactorValue(self.field, exact=self.exact.reflect(self.field.q))
        return FactorValue(self.field, archimedean=self.archimedean.reflect())

    def evaluate(self, s_values: Sequence[complex]) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s_values, dtype=complex))
        if self.field.is_padic:
            return self.exact.evaluate_many(np.power(float(self.field.q), -s / 2))
        return np.array([self.archimedean.evaluate(v) for v in s], dtype=complex)

    def __str__(self) -> str:
        return str(self.exact if self.field.is_padic else self.archimedean)


def relative_gap(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.maximum(np.abs(rhs), np.finfo(float).tiny)
    return float(np.max(np.abs(lhs - rhs) / scale))


def same_factor(lhs: FactorValue, rhs: FactorValue, tolerance: float = 1e-10) -> Tuple[bool, Optional[float]]:
    """Exact equality over Q_p, agreement at the sample points over R."""
    if lhs.field.is_padic:
        return lhs.exact == rhs.exact, None
    gap = relative_gap(lhs.evaluate(SAMPLE_S), rhs.evaluate(SAMPLE_S))
    return gap <= tolerance, gap


# ---------------------------------------------------------------------------
# Factors of one character
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalFactors:
    L: FactorValue
    epsilon: FactorValue
    gamma: FactorValue


def _padic_L(omega: MultChar) -> RatFun:
    c, k = char_monomial(omega, 1, s_shift=1)
    return RatFun.constant(1) / (RatFun.constant(1) - RatFun.monomial(c, k))


def local_factors(omega: MultChar) -> LocalFactors:
    """L(s, omega), epsilon(s, omega, psi) and gamma(s, omega, psi).

    Raises:
        DomainError: omega carries an s-shift
    """
    if omega.shift:
        raise DomainError(f"local factors take characters without an s-shift, got {omega}")
    field = omega.field
    if field.is_padic:
        L = FactorValue(field, exact=_padic_L(omega))
        dual = FactorValue(field, exact=_padic_L(omega.inverse())).reflect()
        epsilon = FactorValue.one(field)
    else:
        L = FactorValue(field, archimedean=RealFactor.build(Scalar(1), [(1, 1, omega.t + omega.eps)]))
        dual = FactorValue(field, archimedean=RealFactor.build(Scalar(1), [(1, -1, 1 - omega.t + omega.eps)]))
        epsilon = FactorValue.constant(field, Scalar.imag_unit() ** omega.eps)
    return LocalFactors(L, epsilon, epsilon * dual / L)


def gamma_factor(omega: MultChar) -> FactorValue:
    return local_factors(omega).gamma


# ---------------------------------------------------------------------------
# Products over pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairFactors:
    L_pair: FactorValue
    gamma_psi: FactorValue
    epsilon_psi: FactorValue


def _field_of(nu: CharTuple, nu_prime: CharTuple) -> LocalFieldDesc:
    if len(nu):
        return nu[0].field
    if len(nu_prime):
        return nu_prime[0].field
    raise DomainError("empty character tuples carry no base field")


def pair_products(nu: CharTuple, nu_prime: CharTuple) -> PairFactors:
    """L(s, nu x nu') over all pairs, gamma_psi and epsilon_psi over pairs with i + j <= n."""
    check_lengths(nu, nu_prime)
    field = _field_of(nu, nu_prime)
    n = len(nu)
    L_pair = gamma = epsilon = FactorValue.one(field)
    for i, a in enumerate(nu, start=1):
        for j, b in enumerate(nu_prime, start=1):
            factors = local_factors(a * b)
            L_pair = L_pair * factors.L
            if i + j <= n:
                gamma = gamma * factors.gamma
                epsilon = epsilon * factors.epsilon
    return PairFactors(L_pair, gamma, epsilon)


def gamma_psi(nu: CharTuple, nu_prime: CharTuple) -> FactorValue:
    """sgn(nu; nu') times the product of gamma factors over pairs with i + j <= n."""
    return pair_products(nu, nu_prime).gamma_psi.scale(sgn_product(nu, nu_prime))


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    """Outcome of one identity check; ``max_error`` is set on numeric comparisons"""

    name: str
    equal: bool
    lhs: str
    rhs: str
    max_error: Optional[float] = None
    s_values: List[complex] = dc_field(default_factory=list)


def check_gamma_reflection(omega: MultChar) -> IdentityCheck:
    """gamma(s, omega, psi) gamma(1 - s, omega^-1, psi) = omega(-1)."""
    lhs = gamma_factor(omega) * gamma_factor(omega.inverse()).reflect()
    rhs = FactorValue.constant(omega.field, omega.at_minus_one())
    equal, gap = same_factor(lhs, rhs)
    samples = [] if omega.field.is_padic else list(SAMPLE_S)
    return IdentityCheck("gamma-reflection", equal, str(lhs), str(rhs), gap, samples)


def check_gamma_lemma(nu: CharTuple, nu_prime: CharTuple) -> IdentityCheck:
    """Gamma_psi(s; nu; nu') against Gamma_psi(1 - s; hat nu'; hat mu) times the mixed gammas.

    mu is nu without its last entry; the mixed product runs over all pairs i, j <= n - 1.
    """
    n = len(nu)
    if n < 2 or len(nu_prime) != n - 1:
        raise DomainError(f"the gamma lemma needs n >= 2 and n' = n - 1, got ({n}, {len(nu_prime)})")
    field = nu[0].field
    mu = nu[: n - 1]
    lhs = gamma_psi(nu, nu_prime)
    sign = Scalar(1)
    for b in nu_prime:
        sign = sign * b.at_minus_one() ** n
    rhs = gamma_psi(hat_dual(nu_prime), hat_dual(mu)).reflect().scale(sign)
    for a in mu:
        for b in nu_prime:
            rhs = rhs * gamma_factor(a * b)
    equal, gap = same_factor(lhs, rhs, tolerance=1e-9)
    samples = [] if field.is_padic else list(SAMPLE_S)
    return IdentityCheck("gamma-lemma", equal, str(lhs), str(rhs), gap, samples)


def _real_test_function(omega: MultChar) -> RealSchwartz:
    return RealSchwartz.gaussian_moment(omega.eps)


def real_fe_points(omega: MultChar) -> List[complex]:
    """Interior points of the strip where both real Tate integrals converge."""
    lo = -float(omega.t)
    return [complex(lo + k / 6, 0.25 * (k - 3)) for k in range(1, 6)]


def fe_epsilon(omega: MultChar, phi=None, conj: bool = False, s_values: Optional[Sequence[complex]] = None):
    """epsilon recovered from the local functional equation with F_psi (or F_psibar) inside.

    Over Q_p returns the exact RatFun; over R returns values at ``s_values``.
    """
    from app.services.integrals_service import tate_zeta, tate_zeta_real

    factors, dual = local_factors(omega), local_factors(omega.inverse())
    if omega.field.is_padic:
        q = omega.field.q
        phi = phi if phi is not None else SchwartzSpan.lattice(q, (1, 1))
        left = tate_zeta(omega.inverse(), fourier(phi, conj=conj)).exact.reflect(q) / dual.L.reflect().exact
        right = tate_zeta(omega, phi).exact / factors.L.exact
        return left / right
    phi = phi if phi is not None else _real_test_function(omega)
    transformed = phi.fourier(conj=conj)
    s_values = list(s_values or real_fe_points(omega))
    out = []
    for s in s_values:
        left = complex(tate_zeta_real(omega.inverse(), transformed, 1 - s)) / dual.L.evaluate([1 - s])[0]
        right = complex(tate_zeta_real(omega, phi, s)) / factors.L.evaluate([s])[0]
        out.append(left / right)
    return np.array(out, dtype=complex)


def check_psi_conjugation(omega: MultChar) -> IdentityCheck:
    """epsilon(s, omega, psibar) = omega(-1) epsilon(s, omega, psi), both read off the functional equation."""
    sign = omega.at_minus_one()
    if omega.field.is_padic:
        conj = fe_epsilon(omega, conj=True)
        plain = fe_epsilon(omega)
        rhs = plain * RatFun.constant(sign)
        return IdentityCheck("psi-conjugation", conj == rhs, str(conj), str(rhs))
    points = real_fe_points(omega)
    conj = fe_epsilon(omega, conj=True, s_values=points)
    rhs = fe_epsilon(omega, s_values=points) * sign.to_complex()
    gap = relative_gap(conj, rhs)
    logger.debug(f"psi-conjugation for {omega}: epsilon(psibar) = {conj[0]}")
    return IdentityCheck(
        "psi-conjugation",
        gap <= settings.ARCHIMEDEAN_TOLERANCE,
        f"{conj[0]:.12g}",
        f"{rhs[0]:.12g}",
        gap,
        points,
    )
