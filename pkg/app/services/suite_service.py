"""Suite battery: named items over seeded random draws, merged into one summary"""

import logging
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from app.api.schemas.reports import SuiteSummary, VerificationReport
from app.api.schemas.suite import SUITE_ITEMS, SuiteConfig
from app.config import settings
from app.core.characters import CharTuple, real_char
from app.core.exceptions import WorkbenchError
from app.core.localfield import LocalFieldDesc
from app.core.models import Mode, Recurrence, TheoremCase
from app.core.schwartz import SchwartzSpan
from app.services.sampling_service import ParameterSampler, with_resampling
from app.services.verify_service import (
    convergence_probes,
    make_report,
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

logger = logging.getLogger(__name__)

Runner = Callable[[SuiteConfig, ParameterSampler], List[VerificationReport]]


def _guarded(case_id: str, check: str, field: LocalFieldDesc, seed: int, run: Callable[[], VerificationReport]) -> VerificationReport:
    """A failing check becomes a failed report; the suite carries on."""
    started = time.perf_counter()
    try:
        return run()
    except WorkbenchError as e:
        logger.error(f"{case_id} failed: {e}")
        report = make_report(case_id, check, field, started, seed=seed)
        report.error = f"{type(e).__name__}: {e}"
        return report


def _drawn(case_id: str, check: str, field: LocalFieldDesc, sampler: ParameterSampler, draw, run) -> VerificationReport:
    """Draw parameters, resampling on pole collisions, and run one check."""
    return _guarded(case_id, check, field, sampler.seed, lambda: with_resampling(draw, run)[1])


def _padic(config: SuiteConfig) -> LocalFieldDesc:
    return LocalFieldDesc.padic(config.q)


# ---------------------------------------------------------------------------
# Items
# ---------------------------------------------------------------------------


def _theorem_a(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, q, seed = _padic(config), config.q, sampler.seed
    a, b = TheoremCase.A, TheoremCase.B
    out = []
    for i in range(config.samples):
        cid = f"theorem-a/b/1-0/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.char_tuple(field, 1), CharTuple()),
                lambda p: verify_theorem_A(b, *p, case_id=cid, seed=seed),
            )
        )
        cid = f"theorem-a/a/1-1/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.char_tuple(field, 1), sampler.char_tuple(field, 1), sampler.schwartz(q)),
                lambda p: verify_theorem_A(a, *p, case_id=cid, seed=seed),
            )
        )
        cid = f"theorem-a/b/2-1/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.char_tuple(field, 2), sampler.char_tuple(field, 1)),
                lambda p: verify_theorem_A(b, *p, cross_check=i % 10 == 0, cutoff=config.cutoff, case_id=cid, seed=seed),
            )
        )
    for i in range(max(1, config.samples // 10)):
        cid = f"theorem-a/a/2-2/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.char_tuple(field, 2), sampler.char_tuple(field, 2), sampler.lattice(q, (1, 2))),
                lambda p: verify_theorem_A(a, *p, case_id=cid, seed=seed),
            )
        )
        cid = f"theorem-a/a/2-2-numeric/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.unit_char_tuple(field, 2), sampler.unit_char_tuple(field, 2), sampler.lattice(q, (1, 2))),
                lambda p: verify_theorem_A(a, *p, mode=Mode.NUMERIC, s_values=config.sValues, cutoff=config.cutoff, case_id=cid, seed=seed),
            )
        )
    for i in range(max(1, config.samples // 20)):
        cid = f"theorem-a/b/3-2-numeric/{i:03d}"
        out.append(
            _drawn(
                cid, "theorem-a", field, sampler,
                lambda: (sampler.unit_char_tuple(field, 3), sampler.unit_char_tuple(field, 2)),
                lambda p: verify_theorem_A(b, *p, mode=Mode.NUMERIC, s_values=config.sValues, cutoff=config.cutoff, case_id=cid, seed=seed),
            )
        )
    if Mode(config.mode) == Mode.NUMERIC:
        for i in range(max(1, config.samples // 10)):
            cid = f"theorem-a/b/2-1-numeric/{i:03d}"
            out.append(
                _drawn(
                    cid, "theorem-a", field, sampler,
                    lambda: (sampler.unit_char_tuple(field, 2), sampler.unit_char_tuple(field, 1)),
                    lambda p: verify_theorem_A(b, *p, mode=Mode.NUMERIC, s_values=config.sValues, cutoff=config.cutoff, case_id=cid, seed=seed),
                )
            )
    return out


def _recurrence(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, q, seed = _padic(config), config.q, sampler.seed
    out = []
    for i in range(max(1, config.samples // 4)):
        cid = f"recurrence/prop31/{i:03d}"

        def draw31(translated=i % 2 == 1):
            depth = int(sampler.rng.integers(0, 2))
            return (
                sampler.char_tuple(field, 2),
                sampler.char_tuple(field, 1),
                sampler.character(field),
                SchwartzSpan.lattice(q, (1, 2), depth),
                SchwartzSpan.lattice(q, (1, 2), depth),
                sampler.translate(q, 2) if translated else None,
            )

        out.append(
            _drawn(cid, "prop31", field, sampler, draw31, lambda p: verify_recurrence(Recurrence.PROP31, *p, case_id=cid, seed=seed))
        )
        cid = f"recurrence/prop32/{i:03d}"

        def draw32():
            depth = int(sampler.rng.integers(0, 2))
            return (
                sampler.char_tuple(field, 1),
                sampler.char_tuple(field, 1),
                sampler.character(field),
                SchwartzSpan.lattice(q, (1, 1), depth),
                SchwartzSpan.lattice(q, (1, 1), depth),
            )

        out.append(
            _drawn(cid, "prop32", field, sampler, draw32, lambda p: verify_recurrence(Recurrence.PROP32, *p, case_id=cid, seed=seed))
        )
    return out


def _tate_fe(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, q, seed = _padic(config), config.q, sampler.seed
    out = []
    for i in range(max(1, config.samples // 2)):
        cid = f"tate-fe/padic/{i:03d}"
        out.append(
            _drawn(
                cid, "tate-fe", field, sampler,
                lambda: (sampler.character(field, twisted=True), sampler.schwartz(q)),
                lambda p: verify_tate_fe(*p, case_id=cid, seed=seed),
            )
        )
    real = LocalFieldDesc.real()
    for name, omega in (
        ("trivial", real_char()),
        ("sgn", real_char(1)),
        ("trivial-half", real_char(0, Fraction(1, 2))),
        ("sgn-minus-half", real_char(1, Fraction(-1, 2))),
    ):
        cid = f"tate-fe/real/{name}"
        out.append(_guarded(cid, "tate-fe", real, seed, lambda: verify_tate_fe(omega, case_id=cid, seed=seed)))
    out.append(_guarded("tate-fe/real-gaussian", "tate-real", real, seed, verify_real_tate_values))
    return out


def _gamma_lemma(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, seed = _padic(config), sampler.seed
    out = []
    for n in (2, 3):
        for i in range(config.samples):
            cid = f"gamma-lemma/padic/{n}/{i:03d}"
            out.append(
                _drawn(
                    cid, "gamma-lemma", field, sampler,
                    lambda: (sampler.char_tuple(field, n, twisted=True), sampler.char_tuple(field, n - 1, twisted=True)),
                    lambda p: verify_gamma_lemma(*p, case_id=cid, seed=seed),
                )
            )
    real = LocalFieldDesc.real()
    for i in range(3):
        cid = f"gamma-lemma/real/3/{i:03d}"
        out.append(
            _drawn(
                cid, "gamma-lemma", real, sampler,
                lambda: (sampler.char_tuple(real, 3, twisted=True), sampler.char_tuple(real, 2, twisted=True)),
                lambda p: verify_gamma_lemma(*p, case_id=cid, seed=seed),
            )
        )
    return out


def _configured_characters(config: SuiteConfig):
    for c in config.characters:
        field = _padic(config) if c.a is not None else LocalFieldDesc.real()
        yield c.to_char(field)


def _reflection(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, seed = _padic(config), sampler.seed
    out = []
    for i in range(max(1, config.samples // 2)):
        cid = f"reflection/padic/{i:03d}"
        out.append(
            _drawn(cid, "gamma-reflection", field, sampler, lambda: sampler.character(field, twisted=True), lambda w: verify_reflection(w, cid, seed))
        )
    fixed = [real_char(), real_char(1), real_char(1, Fraction(1, 2))] + list(_configured_characters(config))
    for i, omega in enumerate(fixed):
        cid = f"reflection/fixed/{i:03d}"
        out.append(_guarded(cid, "gamma-reflection", omega.field, seed, lambda: verify_reflection(omega, cid, seed)))
    return out


def _psi_conjugation(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, seed = _padic(config), sampler.seed
    out = []
    for i in range(5):
        cid = f"psi-conjugation/padic/{i:03d}"
        out.append(
            _drawn(cid, "psi-conjugation", field, sampler, lambda: sampler.character(field), lambda w: verify_psi_conjugation(w, cid, seed))
        )
    real = LocalFieldDesc.real()
    for name, omega in (("trivial", real_char()), ("sgn", real_char(1))):
        cid = f"psi-conjugation/real/{name}"
        out.append(_guarded(cid, "psi-conjugation", real, seed, lambda: verify_psi_conjugation(omega, cid, seed)))
    # epsilon(s, sgn, psibar) = -i, epsilon(s, 1, psibar) = 1
    for name, omega, expected in (("sgn", real_char(1), -1j), ("trivial", real_char(), 1 + 0j)):
        cid = f"psi-conjugation/epsilon-psibar/{name}"
        out.append(_guarded(cid, "epsilon-psibar", real, seed, lambda: verify_conjugate_epsilon(omega, expected, cid)))
    return out


def _equivariance(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field, q, seed = _padic(config), config.q, sampler.seed
    out = []
    count = max(1, config.samples // 10)
    for i in range(count):
        cid = f"equivariance/1/{i:03d}"
        out.append(
            _drawn(
                cid, "equivariance", field, sampler,
                lambda: (sampler.char_tuple(field, 1), sampler.char_tuple(field, 1), sampler.translate(q, 1), sampler.schwartz(q)),
                lambda p: verify_equivariance(1, *p, case_id=cid, seed=seed),
            )
        )
        for mode in (Mode.EXACT, Mode.NUMERIC):
            cid = f"equivariance/2-{mode.value}/{i:03d}"
            out.append(
                _drawn(
                    cid, "equivariance", field, sampler,
                    lambda: (sampler.unit_char_tuple(field, 2), sampler.unit_char_tuple(field, 1), sampler.translate(q, 1)),
                    lambda p: verify_equivariance(2, *p, mode=mode, cutoff=config.cutoff, case_id=cid, seed=seed),
                )
            )
    return out


def _zk(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    return [verify_zk()]


def _iwasawa(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    field = _padic(config)
    count = max(1, 5 * config.samples)
    return [verify_iwasawa(field, sampler, count=count, k=k) for k in (2, 3)]


def _omega(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    return [verify_omega_table(_padic(config))]


def _probes(config: SuiteConfig, sampler: ParameterSampler) -> List[VerificationReport]:
    return convergence_probes(_padic(config), config.cutoff)


ITEM_RUNNERS: Dict[str, Runner] = {
    "theorem-a": _theorem_a,
    "recurrence": _recurrence,
    "tate-fe": _tate_fe,
    "gamma-lemma": _gamma_lemma,
    "reflection": _reflection,
    "psi-conjugation": _psi_conjugation,
    "equivariance": _equivariance,
    "zk": _zk,
    "iwasawa": _iwasawa,
    "omega": _omega,
    "probes": _probes,
}


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def item_seed(seed: int, item: str) -> int:
    return seed + 7919 * (SUITE_ITEMS.index(item) + 1)


def suite_item(item: str, config: dict) -> List[dict]:
    """Run one named item; reports come back as plain dicts for the task backend."""
    cfg = SuiteConfig.model_validate(config)
    seed = settings.DEFAULT_SEED if cfg.seed is None else cfg.seed
    sampler = ParameterSampler(item_seed(seed, item))
    logger.info(f"Suite item {item}: {cfg.samples} samples, seed {sampler.seed}")
    return [r.model_dump() for r in ITEM_RUNNERS[item](cfg, sampler)]


def _all_pass(reports: List[VerificationReport], pred) -> Optional[bool]:
    chosen = [r for r in reports if pred(r)]
    if not chosen:
        return None
    return all(r.equal for r in chosen)


def implication_holds(reports: List[VerificationReport]) -> Optional[bool]:
    """Passing recurrences and Tate equations must come with passing (2, 1) theorem checks."""
    premises = [
        _all_pass(reports, lambda r: r.check == "prop31"),
        _all_pass(reports, lambda r: r.check == "prop32"),
        _all_pass(reports, lambda r: r.check == "tate-fe" and r.field != "R"),
    ]
    conclusion = _all_pass(reports, lambda r: r.caseId.startswith("theorem-a/b/2-1/"))
    if conclusion is None or any(p is None for p in premises):
        return None
    return conclusion or not all(premises)


def run_suite(config: SuiteConfig, deterministic: bool = False) -> SuiteSummary:
    """Dispatch every configured item as a worker task and merge the reports by case id."""
    from app.workers.tasks import run_suite_item

    seed = settings.DEFAULT_SEED if config.seed is None else config.seed
    payload = config.model_dump()
    reports: List[VerificationReport] = []
    for item in config.items:
        try:
            result = run_suite_item.delay(item, payload)
            rows = result.get(timeout=settings.SUITE_TIME_LIMIT)
        except Exception as e:
            logger.error(f"Suite item {item} did not complete: {e}")
            failed = make_report(item, item, _padic(config), time.perf_counter(), seed=item_seed(seed, item))
            failed.error = f"{type(e).__name__}: {e}"
            rows = [failed.model_dump()]
        reports.extend(VerificationReport.model_validate(r) for r in rows)
    reports.sort(key=lambda r: r.caseId)
    if deterministic:
        for r in reports:
            r.timing = 0.0
    passed = sum(r.equal for r in reports)
    summary = SuiteSummary(
        seed=seed,
        total=len(reports),
        passed=passed,
        failed=len(reports) - passed,
        implicationHolds=implication_holds(reports),
        reports=reports,
    )
    logger.info(f"Suite finished: {summary.passed}/{summary.total} passed")
    return summary
