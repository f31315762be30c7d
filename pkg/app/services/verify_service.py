"""Theorem and identity checks producing verification reports

Each check computes both sides of an identity independently and compares them:
canonical RatFun equality in exact mode, relative tolerance in numeric mode.
"""

import logging
import math
import time
import warnings
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.api.schemas.reports import FactorReport, MatrixReport, StripReport, VerificationReport
from app.config import settings
from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, ex, real_char, unr
from app.core.exactalg import RatFun, Scalar
from app.core.exceptions import CapabilityError, DomainError, PoleError
from app.core.iwasawa import GodementCirc, GodementPlus, Hat, iwasawa_decompose, spherical, spherical_value, translate
from app.core.localfield import LocalFieldDesc, finite_valuation
from app.core.models import Mode, Recurrence, RSCase, TheoremCase
from app.core.schwartz import RealSchwartz, SchwartzSpan, fourier, right_translate, tensor, transpose
from app.services.factors_service import (
    IdentityCheck,
    check_gamma_lemma,
    check_gamma_reflection,
    check_psi_conjugation,
    fe_epsilon,
    gamma_psi,
    local_factors,
    real_fe_points,
    relative_gap,
)
from app.services.integrals_service import (
    StripInterval,
    godement_hypotheses,
    lambda_open_orbit,
    omega_strip,
    rs_Z,
    tate_zeta,
    tate_zeta_real,
)
from app.services.oracle_service import bbar_tate_box, truncated_numeric

logger = logging.getLogger(__name__)

CONSISTENCY_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# Report plumbing
# ---------------------------------------------------------------------------


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}i"


@contextmanager
def captured_warnings():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        yield caught


def make_report(
    case_id: str,
    check: str,
    field: LocalFieldDesc,
    started: float,
    *,
    mode: Mode = Mode.EXACT,
    parameters: Optional[Dict[str, str]] = None,
    lhs: Optional[str] = None,
    rhs: Optional[str] = None,
    equal: bool = False,
    gap: Optional[float] = None,
    s_values: Sequence[complex] = (),
    convergence: Optional[Dict[str, bool]] = None,
    notes: Sequence = (),
    seed: Optional[int] = None,
) -> VerificationReport:
    report = VerificationReport(
        caseId=case_id,
        check=check,
        field=str(field),
        mode=Mode(mode).value,
        parameters=parameters or {},
        lhs=lhs,
        rhs=rhs,
        equal=bool(equal),
        maxRelativeError=gap,
        sValues=[fmt_complex(s) for s in s_values],
        convergence=convergence or {},
        warnings=sorted({str(w.message) if hasattr(w, "message") else str(w) for w in notes}),
        seed=seed,
        timing=round(time.perf_counter() - started, 6),
    )
    logger.info(f"{case_id}: {'pass' if report.equal else 'FAIL'}")
    return report


def identity_report(case_id: str, result: IdentityCheck, field: LocalFieldDesc, started: float, parameters, seed=None):
    mode = Mode.EXACT if field.is_padic else Mode.NUMERIC
    return make_report(
        case_id,
        result.name,
        field,
        started,
        mode=mode,
        parameters=parameters,
        lhs=result.lhs,
        rhs=result.rhs,
        equal=result.equal,
        gap=result.max_error,
        s_values=result.s_values,
        seed=seed,
    )


def numeric_points(strip: StripInterval, count: int) -> List[complex]:
    """Points in the middle band of the strip, where truncated shell sums decay fastest."""
    if strip.is_empty:
        return []
    lo = strip.lower if math.isfinite(strip.lower) else (strip.upper - 1.5 if math.isfinite(strip.upper) else 0.0)
    hi = strip.upper if math.isfinite(strip.upper) else lo + 1.5
    mid, half = (lo + hi) / 2, 0.15 * (hi - lo)
    return [complex(x) for x in np.linspace(mid - half, mid + half, count)]


def _ys(q: int, s_values: Sequence[complex]) -> np.ndarray:
    return np.power(float(q), -np.asarray(s_values, dtype=complex) / 2)


def _consistent(lhs: RatFun, rhs: RatFun, q: int, strip: StripInterval) -> Optional[bool]:
    """Both canonical forms evaluate to the same numbers at three points of the strip."""
    points = numeric_points(strip, 3) or [complex(0.5, 0.25)]
    try:
        gap = relative_gap(lhs.evaluate_many(_ys(q, points)), rhs.evaluate_many(_ys(q, points)))
    except PoleError:
        return None
    return gap <= CONSISTENCY_TOLERANCE


def _oracle_gap(exact: RatFun, q: int, points: Sequence[complex], integral, *args, cutoff=None, **kwargs) -> float:
    numeric = truncated_numeric(integral, *args, s_values=points, cutoff=cutoff, **kwargs)
    return relative_gap(numeric.numeric, exact.evaluate_many(_ys(q, points)))


def _z_points(nu: CharTuple, nu_prime: CharTuple, points: Sequence[complex]) -> List[complex]:
    """The points moved one unit right of the half-plane where Z converges absolutely."""
    abscissa = max((-(ex(a) + ex(b)) for a in nu for b in nu_prime), default=-math.inf)
    return [s + max(0.0, abscissa + 1 - s.real) for s in points]


# ---------------------------------------------------------------------------
# Tate functional equation
# ---------------------------------------------------------------------------


def verify_tate_fe(omega: MultChar, phi=None, case_id: str = "tate-fe", seed: Optional[int] = None) -> VerificationReport:
    """Z(1-s, omega^-1, F phi) / L(1-s, omega^-1) = epsilon Z(s, omega, phi) / L(s, omega)."""
    started = time.perf_counter()
    field = omega.field
    factors, dual = local_factors(omega), local_factors(omega.inverse())
    if field.is_padic:
        q = field.q
        phi = phi if phi is not None else SchwartzSpan.lattice(q, (1, 1))
        lhs = tate_zeta(omega.inverse(), fourier(phi)).exact.reflect(q) / dual.L.reflect().exact
        rhs = factors.epsilon.exact * tate_zeta(omega, phi).exact / factors.L.exact
        return make_report(
            case_id,
            "tate-fe",
            field,
            started,
            parameters={"omega": str(omega), "phi": str(phi), "epsilon": str(factors.epsilon)},
            lhs=str(lhs),
            rhs=str(rhs),
            equal=lhs == rhs,
            seed=seed,
        )
    phi = phi if phi is not None else RealSchwartz.gaussian_moment(omega.eps)
    points = real_fe_points(omega)
    transformed = phi.fourier()
    epsilon = factors.epsilon.evaluate([0])[0]
    lhs = np.array([complex(tate_zeta_real(omega.inverse(), transformed, 1 - s)) for s in points])
    lhs = lhs / dual.L.evaluate([1 - s for s in points])
    rhs = np.array([complex(tate_zeta_real(omega, phi, s)) for s in points]) * epsilon / factors.L.evaluate(points)
    gap = relative_gap(lhs, rhs)
    return make_report(
        case_id,
        "tate-fe",
        field,
        started,
        mode=Mode.NUMERIC,
        parameters={"omega": str(omega), "phi": "coeffs " + ",".join(fmt_complex(c) for c in phi.coeffs), "epsilon": fmt_complex(epsilon)},
        lhs=fmt_complex(lhs[0]),
        rhs=fmt_complex(rhs[0]),
        equal=gap <= settings.ARCHIMEDEAN_TOLERANCE,
        gap=gap,
        s_values=points,
        seed=seed,
    )


def verify_real_tate_values(points: Sequence[float] = (0.3, 0.7, 1.0, 1.5, 2.0)) -> VerificationReport:
    """Z(s, 1, exp(-pi x^2)) from Gaussian moments against the gamma factor L(s, 1)."""
    started = time.perf_counter()
    omega = real_char()
    lhs = np.array([complex(tate_zeta_real(omega, RealSchwartz(), s)) for s in points])
    rhs = local_factors(omega).L.evaluate(points)
    gap = relative_gap(lhs, rhs)
    return make_report(
        "tate-fe/real-gaussian",
        "tate-real",
        omega.field,
        started,
        mode=Mode.NUMERIC,
        parameters={"omega": str(omega), "phi": "exp(-pi x^2)"},
        lhs=fmt_complex(lhs[0]),
        rhs=fmt_complex(rhs[0]),
        equal=gap <= settings.ARCHIMEDEAN_TOLERANCE,
        gap=gap,
        s_values=[complex(s) for s in points],
    )


# ---------------------------------------------------------------------------
# Theorem A
# ---------------------------------------------------------------------------


def verify_theorem_A(
    case: TheoremCase,
    nu: CharTuple,
    nu_prime: CharTuple,
    phi: Optional[SchwartzSpan] = None,
    mode: Mode = Mode.EXACT,
    s_values: Optional[Sequence[complex]] = None,
    cutoff: Optional[int] = None,
    cross_check: bool = False,
    case_id: Optional[str] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Lambda(s, f, f'[, phi]) = Gamma_psi(s; nu; nu') Z(s, f, f'[, phi]) for spherical f, f'.

    Case a pairs n with n' = n and carries phi; case b pairs n with n' = n - 1.

    Raises:
        DomainError: tuple lengths do not match the case, or numeric mode with an empty strip
        PoleCollisionError: a formal sum of the exact path is singular at these parameters
    """
    started = time.perf_counter()
    case, mode = TheoremCase(case), Mode(mode)
    n = len(nu)
    expected = n if case == TheoremCase.A else n - 1
    if len(nu_prime) != expected:
        raise DomainError(f"theorem case {case.value} needs n' = {expected}, got {len(nu_prime)}")
    rs_case = RSCase.NN if case == TheoremCase.A else RSCase.NNM1
    field = nu[0].field
    q = field.q
    f, f_prime = spherical(field, *nu), spherical(field, *nu_prime)
    gamma = gamma_psi(nu, nu_prime)
    strip = omega_strip(nu, nu_prime)
    case_id = case_id or f"theorem-a/{case.value}/{n}-{len(nu_prime)}"
    parameters = {"nu": str(nu), "nuPrime": str(nu_prime), "phi": str(phi) if phi is not None else "-"}
    convergence = {"insideStrip": not strip.is_empty}

    with captured_warnings() as caught:
        if mode == Mode.EXACT:
            lam = lambda_open_orbit(rs_case, f, f_prime, phi).exact
            z = rs_Z(rs_case, f, f_prime, phi).exact
            rhs = gamma.exact * z
            equal = lam == rhs
            gap = None
            points: List[complex] = []
            if equal:
                consistent = _consistent(lam, rhs, q, strip)
                if consistent is not None:
                    convergence["canonicalConsistent"] = consistent
            if cross_check and not strip.is_empty:
                points = numeric_points(strip, 3)
                try:
                    gap = _oracle_gap(lam, q, points, lambda_open_orbit, rs_case, f, f_prime, phi, cutoff=cutoff)
                    convergence["numericOracle"] = gap <= settings.NUMERIC_TOLERANCE
                    z_gap = _oracle_gap(z, q, _z_points(nu, nu_prime, points), rs_Z, rs_case, f, f_prime, phi, cutoff=cutoff)
                    convergence["zOracle"] = z_gap <= settings.NUMERIC_TOLERANCE
                except CapabilityError as exc:
                    logger.debug(f"{case_id}: no box oracle: {exc}")
            lhs_text, rhs_text = str(lam), str(rhs)
        else:
            points = list(s_values) if s_values is not None else numeric_points(strip, 5)
            if not points:
                raise DomainError(f"empty convergence strip {strip}; pass s values explicitly")
            lam = lambda_open_orbit(rs_case, f, f_prime, phi, mode=mode, s_values=points, cutoff=cutoff)
            z = rs_Z(rs_case, f, f_prime, phi, mode=mode, s_values=points, cutoff=cutoff)
            rhs_values = gamma.evaluate(points) * z.numeric
            gap = relative_gap(lam.numeric, rhs_values)
            convergence["diverged"] = lam.diverged or z.diverged
            convergence["insideStrip"] = all(strip.contains(s) for s in points)
            equal = gap <= settings.NUMERIC_TOLERANCE
            lhs_text, rhs_text = fmt_complex(lam.numeric[0]), fmt_complex(rhs_values[0])
    return make_report(
        case_id,
        "theorem-a",
        field,
        started,
        mode=mode,
        parameters=parameters,
        lhs=lhs_text,
        rhs=rhs_text,
        equal=equal,
        gap=gap,
        s_values=points,
        convergence=convergence,
        notes=caught,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Recurrences at n = 2
# ---------------------------------------------------------------------------


def verify_recurrence(
    which: Recurrence,
    nu: CharTuple,
    nu_prime: CharTuple,
    chi: MultChar,
    phi1: SchwartzSpan,
    phi2: SchwartzSpan,
    g0: Optional[mx.Matrix] = None,
    case_id: Optional[str] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Exact check of one recurrence between open-orbit integrals at n = 2.

    prop31: nu of length 2, nu' of length 1, phi1 and phi2 on k^(1x2), f optionally
    translated by g0; Lambda(s, f, g+(f', phi1), phi2) = Lambda(s, g°_(chi_s)(f, phi1 (x) phi2), f').

    prop32: nu = mu of length 1, nu' of length 1, phi1 and phi2 on k;
    Lambda(s, g+(f_mu, phi1 (x) phi2), f') = Lambda(1 - s, hat g°_(chi_s)(f', phi1), hat f_mu, transpose phi2).
    """
    started = time.perf_counter()
    which = Recurrence(which)
    field = chi.field
    chi_s = chi.with_shift(1)
    f_prime = spherical(field, *nu_prime)
    if which == Recurrence.PROP31:
        if len(nu) != 2 or len(nu_prime) != 1:
            raise DomainError("prop31 at n = 2 takes nu of length 2 and nu' of length 1")
        f = spherical(field, *nu)
        if g0 is not None:
            f = translate(f, g0)
        plus = GodementPlus(chi, f_prime, phi1)
        circ = GodementCirc(chi_s, f, tensor(phi1, phi2))
        lhs = lambda_open_orbit(RSCase.NN, f, plus, phi2).exact
        rhs = lambda_open_orbit(RSCase.NNM1, circ, f_prime).exact
        hypotheses = {"plusConverges": godement_hypotheses(plus), "circConverges": godement_hypotheses(circ)}
    else:
        if len(nu) != 1 or len(nu_prime) != 1:
            raise DomainError("prop32 at n = 2 takes mu and nu' of length 1")
        f_mu = spherical(field, *nu)
        plus = GodementPlus(chi, f_mu, tensor(phi1, phi2, stack_rows=False))
        circ = GodementCirc(chi_s, f_prime, phi1)
        lhs = lambda_open_orbit(RSCase.NNM1, plus, f_prime).exact
        rhs = lambda_open_orbit(RSCase.NN, Hat(circ), Hat(f_mu), transpose(phi2), reflect_s=True).exact
        hypotheses = {"plusConverges": godement_hypotheses(plus), "circConverges": godement_hypotheses(circ)}
    parameters = {
        "nu": str(nu),
        "nuPrime": str(nu_prime),
        "chi": str(chi),
        "phi1": str(phi1),
        "phi2": str(phi2),
        "translate": str([[str(x) for x in row] for row in g0]) if g0 is not None else "-",
    }
    return make_report(
        case_id or f"recurrence/{which.value}",
        which.value,
        field,
        started,
        parameters=parameters,
        lhs=str(lhs),
        rhs=str(rhs),
        equal=lhs == rhs,
        convergence=hypotheses,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Factor identities
# ---------------------------------------------------------------------------


def verify_gamma_lemma(nu: CharTuple, nu_prime: CharTuple, case_id: str = "gamma-lemma", seed=None) -> VerificationReport:
    started = time.perf_counter()
    result = check_gamma_lemma(nu, nu_prime)
    return identity_report(case_id, result, nu[0].field, started, {"nu": str(nu), "nuPrime": str(nu_prime)}, seed)


def verify_reflection(omega: MultChar, case_id: str = "reflection", seed=None) -> VerificationReport:
    started = time.perf_counter()
    return identity_report(case_id, check_gamma_reflection(omega), omega.field, started, {"omega": str(omega)}, seed)


def verify_psi_conjugation(omega: MultChar, case_id: str = "psi-conjugation", seed=None) -> VerificationReport:
    started = time.perf_counter()
    return identity_report(case_id, check_psi_conjugation(omega), omega.field, started, {"omega": str(omega)}, seed)


def verify_conjugate_epsilon(omega: MultChar, expected: complex, case_id: str) -> VerificationReport:
    """epsilon(s, omega, psibar) read off the functional equation against an expected constant."""
    started = time.perf_counter()
    points = real_fe_points(omega)
    values = fe_epsilon(omega, conj=True, s_values=points)
    gap = relative_gap(values, np.full_like(values, expected))
    return make_report(
        case_id,
        "epsilon-psibar",
        omega.field,
        started,
        mode=Mode.NUMERIC,
        parameters={"omega": str(omega)},
        lhs=fmt_complex(values[0]),
        rhs=fmt_complex(expected),
        equal=gap <= settings.ARCHIMEDEAN_TOLERANCE,
        gap=gap,
        s_values=points,
    )


# ---------------------------------------------------------------------------
# Equivariance under translation
# ---------------------------------------------------------------------------


def verify_equivariance(
    n: int,
    nu: CharTuple,
    nu_prime: CharTuple,
    g: mx.Matrix,
    phi: Optional[SchwartzSpan] = None,
    mode: Mode = Mode.EXACT,
    cutoff: Optional[int] = None,
    case_id: Optional[str] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Translation behaviour of the integrals.

    n = 1: Lambda and Z of (g.f, g.f', g.phi) equal |g|^-s times the untranslated values.
    n = 2: Lambda and Z of (diag(h, 1).f, h.f') equal |h|^(1/2 - s) times the untranslated values, h = g in G_1.
    """
    started = time.perf_counter()
    mode = Mode(mode)
    field = nu[0].field
    q = field.q
    v = finite_valuation(mx.det(g), q)
    f, f_prime = spherical(field, *nu), spherical(field, *nu_prime)
    strip = omega_strip(nu, nu_prime)
    convergence: Dict[str, bool] = {}
    if n == 1:
        if phi is None:
            raise DomainError("equivariance at n = 1 needs a Schwartz function")
        factor = RatFun.monomial(1, -2 * v)
        moved = (translate(f, g), translate(f_prime, g), right_translate(phi, g))
        lam = lambda_open_orbit(RSCase.NN, *moved).exact
        lam_base = factor * lambda_open_orbit(RSCase.NN, f, f_prime, phi).exact
        z = rs_Z(RSCase.NN, *moved).exact
        z_base = factor * rs_Z(RSCase.NN, f, f_prime, phi).exact
        convergence["zSide"] = z == z_base
        equal, gap, points = lam == lam_base and z == z_base, None, []
        lhs_text, rhs_text = str(lam), str(lam_base)
    elif n == 2:
        factor = RatFun.monomial(Scalar.q_power(Fraction(-v, 2), q), -2 * v)
        moved = (translate(f, mx.block_diag(g, mx.identity(1))), translate(f_prime, g))
        if mode == Mode.EXACT:
            lam = lambda_open_orbit(RSCase.NNM1, *moved).exact
            lam_base = factor * lambda_open_orbit(RSCase.NNM1, f, f_prime).exact
            z = rs_Z(RSCase.NNM1, *moved).exact
            z_base = factor * rs_Z(RSCase.NNM1, f, f_prime).exact
            convergence["zSide"] = z == z_base
            equal, gap, points = lam == lam_base and z == z_base, None, []
            lhs_text, rhs_text = str(lam), str(lam_base)
        else:
            points = numeric_points(strip, 3)
            lam = lambda_open_orbit(RSCase.NNM1, *moved, mode=mode, s_values=points, cutoff=cutoff)
            base = lambda_open_orbit(RSCase.NNM1, f, f_prime, mode=mode, s_values=points, cutoff=cutoff)
            scaled = factor.evaluate_many(_ys(q, points)) * base.numeric
            z = rs_Z(RSCase.NNM1, *moved, mode=mode, s_values=points, cutoff=cutoff)
            z_base = rs_Z(RSCase.NNM1, f, f_prime, mode=mode, s_values=points, cutoff=cutoff)
            z_gap = relative_gap(z.numeric, factor.evaluate_many(_ys(q, points)) * z_base.numeric)
            convergence["zSide"] = z_gap <= settings.NUMERIC_TOLERANCE
            gap = max(relative_gap(lam.numeric, scaled), z_gap)
            convergence["diverged"] = lam.diverged or base.diverged or z.diverged
            equal = gap <= settings.NUMERIC_TOLERANCE
            lhs_text, rhs_text = fmt_complex(lam.numeric[0]), fmt_complex(scaled[0])
    else:
        raise DomainError(f"equivariance is checked at n = 1 and n = 2, got {n}")
    return make_report(
        case_id or f"equivariance/{n}",
        "equivariance",
        field,
        started,
        mode=mode,
        parameters={"nu": str(nu), "nuPrime": str(nu_prime), "g": str([[str(x) for x in row] for row in g]), "phi": str(phi) if phi is not None else "-"},
        lhs=lhs_text,
        rhs=rhs_text,
        equal=equal,
        gap=gap,
        s_values=points,
        convergence=convergence,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

Z2 = mx.mat([[1, 1], [0, 1]])
Z3 = mx.mat([[1, 2, 1], [0, 1, 0], [0, 0, 1]])


def describe_z(k: int) -> MatrixReport:
    z = mx.make_z(k)
    det = mx.det(z) if k else Fraction(1)
    integral = all(x.denominator == 1 for row in z for x in row)
    recursion = True
    if k >= 2:
        first, second, third = mx.z_recursion_factors(k)
        recursion = mx.mat_mul(mx.mat_mul(first, second), third) == z
    if k == 2:
        recursion = recursion and z == Z2
    if k == 3:
        # independent block product: diag(w_2, 1) * diag(1, 1, 1) * [[tz2 w2 z2, te2], [0, 1]]
        w2 = mx.make_w(2)
        corner = mx.mat_mul(mx.mat_mul(mx.transpose(Z2), w2), Z2)
        block = mx.mat([[corner[0][0], corner[0][1], 0], [corner[1][0], corner[1][1], 1], [0, 0, 1]])
        recursion = recursion and z == Z3 and mx.mat_mul(mx.block_diag(w2, mx.identity(1)), block) == Z3
    return MatrixReport(
        k=k,
        z=[[str(x) for x in row] for row in z],
        det=str(det),
        unimodular=integral and abs(det) == 1,
        recursionHolds=recursion,
    )


def verify_zk(k_max: int = 10) -> VerificationReport:
    started = time.perf_counter()
    described = [describe_z(k) for k in range(1, k_max + 1)]
    failures = [m.k for m in described if not (m.unimodular and m.recursionHolds)]
    return make_report(
        "zk",
        "zk",
        LocalFieldDesc.padic(settings.DEFAULT_Q),
        started,
        parameters={"kMax": str(k_max), "failures": str(failures)},
        equal=not failures,
    )


def verify_iwasawa(field: LocalFieldDesc, sampler, count: int = 500, k: int = 3) -> VerificationReport:
    """Round trip g = bbar kappa and right-K-invariance of spherical vectors on random data."""
    started = time.perf_counter()
    p = field.q
    failures = 0
    for _ in range(count):
        g = sampler.translate(p, k)
        parts = iwasawa_decompose(g, p, rng=sampler.rng)
        lower = all(parts.bbar[i][j] == 0 for i in range(k) for j in range(i + 1, k))
        if not (lower and mx.in_maximal_compact(parts.kappa, p) and mx.mat_mul(parts.bbar, parts.kappa) == g):
            failures += 1
    invariance_failures = 0
    for _ in range(max(1, count // 5)):
        nu = sampler.char_tuple(field, k)
        g, kappa = sampler.translate(p, k), sampler.unit_matrix(p, k)
        if spherical_value(field, nu, mx.mat_mul(g, kappa)) != spherical_value(field, nu, g):
            invariance_failures += 1
    return make_report(
        "iwasawa",
        "iwasawa",
        field,
        started,
        parameters={"count": str(count), "k": str(k), "roundTripFailures": str(failures), "invarianceFailures": str(invariance_failures)},
        equal=failures == 0 and invariance_failures == 0,
        seed=sampler.seed,
    )


def strip_report(nu: CharTuple, nu_prime: CharTuple, count: int = 5) -> StripReport:
    strip = omega_strip(nu, nu_prime)
    return StripReport(
        nu=str(nu),
        nuPrime=str(nu_prime),
        lower=strip.lower if math.isfinite(strip.lower) else None,
        upper=strip.upper if math.isfinite(strip.upper) else None,
        empty=strip.is_empty,
        interiorPoints=strip.interior_points(count),
    )


# (twists of nu, twists of nu', expected lower, expected upper) with ex = twist
OMEGA_TABLE = [
    ((0, 0), (0,), 0.0, 1.0),
    ((0,), (0,), 0.0, math.inf),
    ((Fraction(1, 2), Fraction(-1, 2)), (0,), 0.5, 0.5),
    ((0,), (), -math.inf, math.inf),
    ((0, 0), (0, 0), 0.0, 1.0),
    ((Fraction(1, 2), 0), (0, Fraction(-1, 2)), 0.5, 0.5),
    ((0, 0, 0), (0, 0), 0.0, 1.0),
    ((Fraction(-1, 2), 0), (Fraction(1, 2),), -0.5, 1.0),
    ((1,), (Fraction(-1, 2),), -0.5, math.inf),
    ((Fraction(1, 2), 0, 0), (0, 0, 0), 0.0, 0.5),
]


def verify_omega_table(field: LocalFieldDesc) -> VerificationReport:
    started = time.perf_counter()
    mismatches = []
    for idx, (twists, twists_prime, lower, upper) in enumerate(OMEGA_TABLE):
        nu = CharTuple(tuple(unr(field, 1, t) for t in twists))
        nu_prime = CharTuple(tuple(unr(field, 1, t) for t in twists_prime))
        strip = omega_strip(nu, nu_prime)
        if not (math.isclose(strip.lower, lower, abs_tol=1e-12) or strip.lower == lower):
            mismatches.append(idx)
        elif not (math.isclose(strip.upper, upper, abs_tol=1e-12) or strip.upper == upper):
            mismatches.append(idx)
    return make_report(
        "omega",
        "omega",
        field,
        started,
        parameters={"cases": str(len(OMEGA_TABLE)), "mismatches": str(mismatches)},
        equal=not mismatches,
    )


# ---------------------------------------------------------------------------
# Convergence probes
# ---------------------------------------------------------------------------

# (exponents ex(nu'_i), expected boundedness)
BBAR_GRID = [
    ((0.5, 1.5), True),
    ((-0.5, 1.5), False),
    ((0.5, 0.5), False),
    ((1.0, 2.0), True),
    ((0.2, 1.1), True),
]


def convergence_probes(field: LocalFieldDesc, cutoff: Optional[int] = None) -> List[VerificationReport]:
    """Shell behaviour of truncated sums inside and outside the convergence strip."""
    reports = []
    nu = CharTuple.of(unr(field, 1), unr(field, 1))
    nu_prime = CharTuple.of(unr(field, 1))
    f, f_prime = spherical(field, *nu), spherical(field, *nu_prime)
    for label, s, expect_divergence in (("inside", 0.5, False), ("above", 2.0, True), ("below", -1.0, True)):
        started = time.perf_counter()
        with captured_warnings() as caught:
            result = truncated_numeric(lambda_open_orbit, RSCase.NNM1, f, f_prime, s_values=[s], cutoff=cutoff)
        reports.append(
            make_report(
                f"probes/lambda-{label}",
                "probe",
                field,
                started,
                mode=Mode.NUMERIC,
                parameters={"nu": str(nu), "nuPrime": str(nu_prime), "profileTail": str(result.profile[-3:])},
                lhs=str(result.diverged),
                rhs=str(expect_divergence),
                equal=result.diverged == expect_divergence,
                s_values=[s],
                convergence={"diverged": result.diverged},
                notes=caught,
            )
        )
    started = time.perf_counter()
    mismatches = []
    for exponents, expected in BBAR_GRID:
        bounded, profile = bbar_tate_box(field, exponents)
        if bounded != expected:
            mismatches.append(str(exponents))
        logger.debug(f"lower-Borel box {exponents}: bounded={bounded}, last level {profile[-1]:.3g}")
    reports.append(
        make_report(
            "probes/bbar-tate",
            "probe",
            field,
            started,
            mode=Mode.NUMERIC,
            parameters={"grid": str([e for e, _ in BBAR_GRID]), "mismatches": str(mismatches)},
            equal=not mismatches,
        )
    )
    return reports


# ---------------------------------------------------------------------------
# Single reports for the command line
# ---------------------------------------------------------------------------


def factor_report(omega: MultChar) -> FactorReport:
    factors = local_factors(omega)
    return FactorReport(
        character=str(omega),
        field=str(omega.field),
        L=str(factors.L),
        epsilon=str(factors.epsilon),
        gamma=str(factors.gamma),
    )
