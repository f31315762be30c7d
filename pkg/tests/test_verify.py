import logging
import time
from fractions import Fraction

import pytest

from app.api.schemas.reports import VerificationReport
from app.api.schemas.suite import SUITE_ITEMS, SuiteConfig
from app.core import matrices as mx
from app.core.characters import CharTuple, real_char, unr
from app.core.exactalg import Scalar
from app.core.exceptions import DomainError, PoleCollisionError
from app.core.localfield import LocalFieldDesc
from app.core.models import Mode, Recurrence, TheoremCase
from app.core.schwartz import SchwartzSpan
from app.services.sampling_service import ParameterSampler, with_resampling
from app.services.suite_service import implication_holds, item_seed, run_suite, suite_item
from app.services.verify_service import (
    convergence_probes,
    describe_z,
    factor_report,
    strip_report,
    verify_conjugate_epsilon,
    verify_equivariance,
    verify_gamma_lemma,
    verify_iwasawa,
    verify_omega_table,
    verify_psi_conjugation,
    verify_real_tate_values,
    verify_recurrence,
    verify_reflection,
    verify_tate_fe,
    verify_theorem_A,
    verify_zk,
)
from tests.conftest import Q


# ---------------------------------------------------------------------------
# Tate functional equation and factor identities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("phi", ["lattice", "deep", "phase"])
def test_tate_fe_padic(field, phi):
    omega = unr(field, Scalar.gaussian(Fraction(2, 3), Fraction(1, 3)), Fraction(1, 2))
    spans = {
        "lattice": SchwartzSpan.lattice(Q, (1, 1)),
        "deep": SchwartzSpan.lattice(Q, (1, 1), depth=1),
        "phase": SchwartzSpan.elementary(Q, (1, 1), phase=[Fraction(2, Q)]),
    }
    report = verify_tate_fe(omega, spans[phi])
    assert report.equal, report
    assert report.check == "tate-fe"
    assert report.mode == "exact"


def test_reports_log_rendered_messages(field, caplog):
    with caplog.at_level(logging.INFO, logger="app"):
        verify_tate_fe(unr(field, Fraction(1, 2)), case_id="tate-fe/logged")
    records = [r for r in caplog.records if r.name.startswith("app.")]
    assert any(r.getMessage() == "tate-fe/logged: pass" for r in records)
    assert all(not r.args for r in records)


@pytest.mark.parametrize("eps,t", [(0, 0), (1, 0), (0, Fraction(1, 2)), (1, Fraction(-1, 2))])
def test_tate_fe_real(eps, t):
    report = verify_tate_fe(real_char(eps, t))
    assert report.equal, report
    assert report.mode == "numeric"
    assert report.maxRelativeError is not None


def test_real_tate_values_match_gamma_factor():
    report = verify_real_tate_values()
    assert report.equal
    assert len(report.sValues) == 5


def test_gamma_lemma(pair_21):
    assert verify_gamma_lemma(*pair_21).equal


@pytest.mark.parametrize("make", [lambda f: unr(f, Fraction(2, 3), Fraction(1, 2)), lambda f: unr(f, Scalar.gaussian(1, 1))])
def test_reflection_and_conjugation_padic(field, make):
    omega = make(field)
    assert verify_reflection(omega).equal
    assert verify_psi_conjugation(omega).equal


@pytest.mark.parametrize("eps", [0, 1])
def test_reflection_and_conjugation_real(eps):
    omega = real_char(eps)
    assert verify_reflection(omega).equal
    assert verify_psi_conjugation(omega).equal


def test_conjugate_epsilon_of_sign_character():
    assert verify_conjugate_epsilon(real_char(1), -1j, "eps").equal
    assert verify_conjugate_epsilon(real_char(0), 1, "eps").equal
    assert not verify_conjugate_epsilon(real_char(1), 1j, "eps").equal


def test_factor_report(field):
    report = factor_report(unr(field, 2))
    assert report.character
    assert report.L and report.epsilon and report.gamma


# ---------------------------------------------------------------------------
# Theorem checks
# ---------------------------------------------------------------------------


def test_theorem_b_rank_one(field):
    report = verify_theorem_A(TheoremCase.B, CharTuple.of(unr(field, Fraction(2, 3))), CharTuple())
    assert report.equal, report
    assert report.caseId == "theorem-a/b/1-0"


def test_theorem_a_rank_one(field):
    nu = CharTuple.of(unr(field, Fraction(2, 3)))
    nu_prime = CharTuple.of(unr(field, Scalar.gaussian(Fraction(1, 2), Fraction(1, 4))))
    report = verify_theorem_A(TheoremCase.A, nu, nu_prime, SchwartzSpan.lattice(Q, (1, 1)), cross_check=True)
    assert report.equal, report
    assert report.convergence.get("numericOracle", True)


def test_theorem_length_mismatch(field, pair_21):
    nu, nu_prime = pair_21
    with pytest.raises(DomainError):
        verify_theorem_A(TheoremCase.A, nu, nu_prime)


@pytest.mark.slow
def test_theorem_b_rank_two(pair_21):
    report = verify_theorem_A(TheoremCase.B, *pair_21)
    assert report.equal, report
    assert report.caseId == "theorem-a/b/2-1"


@pytest.mark.slow
def test_theorem_b_rank_two_numeric(field):
    nu = CharTuple.of(unr(field, 1), unr(field, Scalar.gaussian(Fraction(3, 5), Fraction(4, 5))))
    nu_prime = CharTuple.of(unr(field, Scalar.gaussian(0, 1)))
    report = verify_theorem_A(TheoremCase.B, nu, nu_prime, mode=Mode.NUMERIC)
    assert report.equal, report
    assert report.convergence["insideStrip"]


@pytest.mark.slow
def test_theorem_a_rank_two(field):
    nu = CharTuple.of(unr(field, Fraction(2, 3)), unr(field, Fraction(-1, 2)))
    nu_prime = CharTuple.of(unr(field, Fraction(3, 4)), unr(field, Fraction(1, 3)))
    report = verify_theorem_A(TheoremCase.A, nu, nu_prime, SchwartzSpan.lattice(Q, (1, 2)))
    assert report.equal, report


@pytest.mark.slow
def test_theorem_b_rank_two_against_the_box_oracle(field):
    nu = CharTuple.of(unr(field, Scalar.gaussian(Fraction(3, 5), Fraction(4, 5))), unr(field, 1))
    nu_prime = CharTuple.of(unr(field, Scalar.gaussian(0, 1)))
    report = verify_theorem_A(TheoremCase.B, nu, nu_prime, cross_check=True)
    assert report.equal, report
    assert report.convergence["numericOracle"]
    assert report.convergence["zOracle"]


@pytest.mark.slow
def test_theorem_a_rank_two_against_the_box_oracle(field):
    nu = CharTuple.of(unr(field, 4), unr(field, Fraction(1, 3)))
    nu_prime = CharTuple.of(unr(field, Fraction(5, 2)), unr(field, Fraction(2, 7)))
    report = verify_theorem_A(TheoremCase.A, nu, nu_prime, SchwartzSpan.lattice(Q, (1, 2)), cutoff=18, cross_check=True)
    assert report.equal, report
    assert report.convergence["numericOracle"]
    assert report.convergence["zOracle"]


@pytest.mark.slow
def test_theorem_b_rank_two_batch_runs_in_seconds():
    started = time.perf_counter()
    for p in (2, 5, 7):
        field = LocalFieldDesc.padic(p)
        sampler = ParameterSampler(seed=p)
        for _ in range(100):
            _, report = with_resampling(
                lambda: (sampler.char_tuple(field, 2), sampler.char_tuple(field, 1)),
                lambda pair: verify_theorem_A(TheoremCase.B, *pair),
            )
            assert report.equal, report
    assert time.perf_counter() - started < 10.0


# ---------------------------------------------------------------------------
# Recurrences and equivariance
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_recurrence_prop31(pair_21, field):
    nu, nu_prime = pair_21
    phi = SchwartzSpan.lattice(Q, (1, 2))
    report = verify_recurrence(Recurrence.PROP31, nu, nu_prime, unr(field, Fraction(1, 2)), phi, phi)
    assert report.equal, report
    assert report.parameters["translate"] == "-"


@pytest.mark.slow
def test_recurrence_prop32(field):
    phi = SchwartzSpan.lattice(Q, (1, 1))
    report = verify_recurrence(
        Recurrence.PROP32,
        CharTuple.of(unr(field, Fraction(2, 3))),
        CharTuple.of(unr(field, Fraction(5, 4))),
        unr(field, Fraction(3, 2)),
        phi,
        phi,
    )
    assert report.equal, report


def test_recurrence_rejects_wrong_lengths(field, pair_21):
    nu, nu_prime = pair_21
    phi = SchwartzSpan.lattice(Q, (1, 1))
    with pytest.raises(DomainError):
        verify_recurrence(Recurrence.PROP32, nu, nu_prime, unr(field, 1), phi, phi)


def test_equivariance_rank_one(field):
    nu = CharTuple.of(unr(field, Fraction(2, 3)))
    nu_prime = CharTuple.of(unr(field, Fraction(5, 4)))
    report = verify_equivariance(1, nu, nu_prime, mx.mat([[Q]]), SchwartzSpan.lattice(Q, (1, 1)))
    assert report.equal, report
    assert report.convergence["zSide"]


@pytest.mark.slow
@pytest.mark.parametrize("h", [Q**2, Fraction(3, Q)])
def test_equivariance_rank_two(field, pair_21, h):
    report = verify_equivariance(2, *pair_21, mx.mat([[h]]))
    assert report.equal, report
    assert report.convergence["zSide"]


@pytest.mark.slow
def test_equivariance_rank_two_numeric(field):
    nu = CharTuple.of(unr(field, Scalar.gaussian(Fraction(3, 5), Fraction(4, 5))), unr(field, 1))
    nu_prime = CharTuple.of(unr(field, Scalar.gaussian(0, 1)))
    report = verify_equivariance(2, nu, nu_prime, mx.mat([[Q]]), mode=Mode.NUMERIC, cutoff=60)
    assert report.equal, report
    assert report.convergence["zSide"]


def test_equivariance_needs_schwartz_at_rank_one(field):
    nu = CharTuple.of(unr(field, 2))
    with pytest.raises(DomainError):
        verify_equivariance(1, nu, nu, mx.mat([[Q]]))


def test_equivariance_rejects_rank_three(field):
    nu = CharTuple.of(unr(field, 2), unr(field, 3), unr(field, 4))
    with pytest.raises(DomainError):
        verify_equivariance(3, nu, nu, mx.identity(3))


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def test_describe_z3():
    report = describe_z(3)
    assert report.z == [["1", "2", "1"], ["0", "1", "0"], ["0", "0", "1"]]
    assert report.unimodular
    assert report.recursionHolds


def test_zk_up_to_ten():
    report = verify_zk()
    assert report.equal
    assert report.parameters["failures"] == "[]"


def test_omega_table(field):
    assert verify_omega_table(field).equal


def test_strip_report_bounds(field):
    one = unr(field, 1)
    report = strip_report(CharTuple.of(one, one), CharTuple.of(one))
    assert (report.lower, report.upper) == (0.0, 1.0)
    assert not report.empty
    assert len(report.interiorPoints) == 5
    assert all(0 < x < 1 for x in report.interiorPoints)


def test_strip_report_unbounded(field):
    report = strip_report(CharTuple.of(unr(field, 1)), CharTuple())
    assert report.lower is None
    assert report.upper is None


def test_iwasawa_round_trip(field, sampler):
    report = verify_iwasawa(field, sampler, count=40, k=3)
    assert report.equal, report.parameters
    assert report.seed == 1234


@pytest.mark.slow
def test_convergence_probes(field):
    reports = convergence_probes(field, cutoff=30)
    assert [r.caseId for r in reports] == [
        "probes/lambda-inside",
        "probes/lambda-above",
        "probes/lambda-below",
        "probes/bbar-tate",
    ]
    assert all(r.equal for r in reports), [r.caseId for r in reports if not r.equal]


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def test_sampler_is_reproducible(field):
    first, second = ParameterSampler(seed=7), ParameterSampler(seed=7)
    assert first.char_tuple(field, 3, twisted=True) == second.char_tuple(field, 3, twisted=True)
    assert first.translate(Q, 2) == second.translate(Q, 2)


def test_unit_satake_has_modulus_one():
    sampler = ParameterSampler(seed=3)
    for _ in range(20):
        a = sampler.unit_satake()
        assert abs(complex(a)) == pytest.approx(1.0)


def test_translate_and_unit_matrix(sampler):
    for _ in range(10):
        assert mx.det(sampler.translate(Q, 3)) != 0
        assert mx.in_maximal_compact(sampler.unit_matrix(Q, 2), Q)


def test_with_resampling_retries_pole_collisions():
    draws = iter(range(10))
    calls = []

    def check(x):
        calls.append(x)
        if x < 2:
            raise PoleCollisionError("degenerate")
        return x * 10

    assert with_resampling(lambda: next(draws), check) == (2, 20)
    assert calls == [0, 1, 2]


def test_with_resampling_gives_up():
    def check(_):
        raise PoleCollisionError("always")

    with pytest.raises(PoleCollisionError):
        with_resampling(lambda: 0, check, attempts=3)


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def _report(case_id, check, equal, field="Q_5"):
    return VerificationReport(caseId=case_id, check=check, field=field, equal=equal)


def _implication_reports(prop31=True, prop32=True, tate=True, theorem=True):
    return [
        _report("recurrence/prop31/000", "prop31", prop31),
        _report("recurrence/prop32/000", "prop32", prop32),
        _report("tate-fe/padic/000", "tate-fe", tate),
        _report("tate-fe/real/sgn", "tate-fe", False, field="R"),
        _report("theorem-a/b/2-1/000", "theorem-a", theorem),
    ]


def test_implication_holds():
    assert implication_holds(_implication_reports()) is True
    assert implication_holds(_implication_reports(theorem=False)) is False
    assert implication_holds(_implication_reports(prop31=False, theorem=False)) is True
    assert implication_holds(_implication_reports(tate=False, theorem=False)) is True


def test_implication_needs_every_group():
    reports = [r for r in _implication_reports() if r.check != "prop32"]
    assert implication_holds(reports) is None
    assert implication_holds([]) is None


def test_item_seeds_are_distinct():
    seeds = {item_seed(11, item) for item in SUITE_ITEMS}
    assert len(seeds) == len(SUITE_ITEMS)


def test_suite_item_returns_dicts():
    rows = suite_item("zk", SuiteConfig(items=["zk"], samples=1).model_dump())
    assert len(rows) == 1
    assert rows[0]["caseId"] == "zk"
    assert rows[0]["equal"]


def test_run_suite_deterministic():
    summary = run_suite(SuiteConfig(items=["zk", "omega"], samples=2, seed=5), deterministic=True)
    assert summary.total == 2
    assert summary.passed == 2
    assert summary.failed == 0
    assert summary.seed == 5
    assert summary.implicationHolds is None
    assert [r.caseId for r in summary.reports] == ["omega", "zk"]
    assert all(r.timing == 0.0 for r in summary.reports)


def test_run_suite_without_items():
    summary = run_suite(SuiteConfig(items=[]))
    assert summary.total == 0
    assert summary.reports == []


def test_suite_is_reproducible():
    config = SuiteConfig(items=["gamma-lemma"], samples=2, seed=9)
    first = run_suite(config, deterministic=True)
    second = run_suite(config, deterministic=True)
    assert first.model_dump() == second.model_dump()
