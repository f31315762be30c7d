"""Command-line entry point of the workbench"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from app.api.schemas.reports import MatrixReport, SuiteSummary, VerificationReport
from app.api.schemas.suite import SUITE_ITEMS, SuiteConfig
from app.config import settings
from app.core.characters import CharTuple
from app.core.exceptions import WorkbenchError
from app.core.localfield import LocalFieldDesc
from app.core.models import Mode, Recurrence, TheoremCase
from app.core.schwartz import SchwartzSpan
from app.services.sampling_service import ParameterSampler, with_resampling
from app.services.suite_service import run_suite
from app.services.verify_service import (
    describe_z,
    factor_report,
    strip_report,
    verify_gamma_lemma,
    verify_omega_table,
    verify_psi_conjugation,
    verify_recurrence,
    verify_reflection,
    verify_tate_fe,
    verify_theorem_A,
    verify_zk,
)
from app.utils.parsing import parse_char_tuple, parse_character, parse_matrix, parse_schwartz

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=None, help="residue cardinality p (default DEFAULT_Q)")
    common.add_argument("--field", choices=["padic", "real"], default="padic")
    common.add_argument("--seed", type=int, default=None, help="seed for randomly drawn parameters")
    common.add_argument("--out", type=Path, default=None, help="write JSON here instead of stdout")
    common.add_argument("--deterministic", action="store_true", help="zero the timing fields")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--n", type=int, default=None, help="rank n of the first representation")
    params.add_argument("--char", default=None, help='one character, e.g. "2/3+1/3i@1/2" or "sgn"')
    params.add_argument("--nu", default=None, help="comma-separated characters of nu")
    params.add_argument("--nu-prime", dest="nu_prime", default=None, help="comma-separated characters of nu'")
    params.add_argument("--phi", default=None, help='"lattice", "lattice:1" or "phase:1/5"')
    params.add_argument("--case", choices=[c.value for c in TheoremCase], default=TheoremCase.B.value)
    params.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.EXACT.value)
    params.add_argument("--cutoff", type=int, default=None, help="shell cutoff of numeric sums")
    params.add_argument("--s", dest="s_values", default=None, help="comma-separated real sample points")
    params.add_argument("--which", choices=[r.value for r in Recurrence], default=Recurrence.PROP31.value)
    params.add_argument("--g0", default=None, help='translate of f, e.g. "1,1/5;0,5"')

    parser = argparse.ArgumentParser(prog="rs-workbench", description="Rankin-Selberg local-theory checks")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("factors", parents=[common, params], help="L, epsilon and gamma of one character")
    sub.add_parser("zk", parents=[common, params], help="the matrices z_k")
    sub.add_parser("omega", parents=[common, params], help="convergence strips")

    verify = sub.add_parser("verify", help="one identity check")
    checks = verify.add_subparsers(dest="check", required=True)
    for name in ("tate", "theorem-a", "recurrence", "gamma-lemma", "reflection", "psi-conjugation"):
        checks.add_parser(name, parents=[common, params])

    suite = sub.add_parser("suite", parents=[common], help="the seeded randomized battery")
    suite.add_argument("--config", type=Path, default=None, help="SuiteConfig JSON file")
    suite.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    suite.add_argument("--cutoff", type=int, default=None)
    suite.add_argument("--items", default=None, help=f"comma-separated subset of {', '.join(SUITE_ITEMS)}")
    return parser


# ---------------------------------------------------------------------------
# Parameter resolution: parsed when given, drawn otherwise
# ---------------------------------------------------------------------------


def _field(args) -> LocalFieldDesc:
    return LocalFieldDesc.padic(args.q) if args.field == "padic" else LocalFieldDesc.real()


def _sampler(args) -> ParameterSampler:
    return ParameterSampler(args.seed)


def _tuple(text: Optional[str], field: LocalFieldDesc, draw) -> CharTuple:
    return parse_char_tuple(text, field) if text is not None else draw()


def _s_values(args) -> Optional[List[float]]:
    if not args.s_values:
        return None
    return [float(x) for x in args.s_values.split(",")]


def _run_factors(args):
    field = _field(args)
    omega = parse_character(args.char, field) if args.char else _sampler(args).character(field, twisted=True)
    return factor_report(omega)


def _run_zk(args):
    if args.n is not None:
        return describe_z(args.n)
    return verify_zk()


def _run_omega(args):
    field = _field(args)
    if args.nu is None:
        return verify_omega_table(field)
    return strip_report(parse_char_tuple(args.nu, field), parse_char_tuple(args.nu_prime, field))


def _run_tate(args):
    field, sampler = _field(args), _sampler(args)
    omega = parse_character(args.char, field) if args.char else sampler.character(field, twisted=True)
    phi = None
    if field.is_padic:
        phi = parse_schwartz(args.phi, args.q) if args.phi else sampler.schwartz(args.q)
    return verify_tate_fe(omega, phi, seed=sampler.seed)


def _run_theorem(args):
    field, sampler = _field(args), _sampler(args)
    case, mode = TheoremCase(args.case), Mode(args.mode)
    n = args.n or 2
    n_prime = n if case == TheoremCase.A else n - 1
    pick = sampler.unit_char_tuple if mode == Mode.NUMERIC else sampler.char_tuple

    def draw():
        nu = _tuple(args.nu, field, lambda: pick(field, n))
        nu_prime = _tuple(args.nu_prime, field, lambda: pick(field, n_prime))
        phi = None
        if case == TheoremCase.A:
            shape = (1, len(nu))
            phi = parse_schwartz(args.phi, args.q, shape) if args.phi else sampler.lattice(args.q, shape)
        return nu, nu_prime, phi

    def run(params):
        nu, nu_prime, phi = params
        return verify_theorem_A(
            case, nu, nu_prime, phi, mode=mode, s_values=_s_values(args), cutoff=args.cutoff, seed=sampler.seed
        )

    return with_resampling(draw, run)[1]


def _run_recurrence(args):
    field, sampler = _field(args), _sampler(args)
    which = Recurrence(args.which)
    shape = (1, 2) if which == Recurrence.PROP31 else (1, 1)
    g0 = parse_matrix(args.g0) if args.g0 else None

    def draw():
        first = 2 if which == Recurrence.PROP31 else 1
        nu = _tuple(args.nu, field, lambda: sampler.char_tuple(field, first))
        nu_prime = _tuple(args.nu_prime, field, lambda: sampler.char_tuple(field, 1))
        chi = parse_character(args.char, field) if args.char else sampler.character(field)
        if args.phi:
            phi = parse_schwartz(args.phi, args.q, shape)
        else:
            phi = sampler.lattice(args.q, shape)
        return nu, nu_prime, chi, phi, SchwartzSpan.lattice(args.q, shape, phi.max_depth())

    def run(params):
        return verify_recurrence(which, *params, g0=g0, seed=sampler.seed)

    return with_resampling(draw, run)[1]


def _run_gamma_lemma(args):
    field, sampler = _field(args), _sampler(args)
    n = args.n or 2

    def draw():
        nu = _tuple(args.nu, field, lambda: sampler.char_tuple(field, n, twisted=True))
        nu_prime = _tuple(args.nu_prime, field, lambda: sampler.char_tuple(field, n - 1, twisted=True))
        return nu, nu_prime

    return with_resampling(draw, lambda p: verify_gamma_lemma(*p, seed=sampler.seed))[1]


def _run_single_char(check):
    def runner(args):
        field, sampler = _field(args), _sampler(args)
        omega = parse_character(args.char, field) if args.char else sampler.character(field, twisted=True)
        return check(omega, seed=sampler.seed)

    return runner


def _run_suite(args):
    if args.config is not None:
        config = SuiteConfig.model_validate_json(args.config.read_text())
    else:
        config = SuiteConfig.default()
    overrides = {}
    if args.q is not None:
        overrides["q"] = args.q
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.cutoff is not None:
        overrides["cutoff"] = args.cutoff
    if args.items:
        overrides["items"] = [i.strip() for i in args.items.split(",")]
    config = SuiteConfig.model_validate({**config.model_dump(), **overrides})
    return run_suite(config, deterministic=args.deterministic)


VERIFY_RUNNERS = {
    "tate": _run_tate,
    "theorem-a": _run_theorem,
    "recurrence": _run_recurrence,
    "gamma-lemma": _run_gamma_lemma,
    "reflection": _run_single_char(verify_reflection),
    "psi-conjugation": _run_single_char(verify_psi_conjugation),
}

COMMAND_RUNNERS = {
    "factors": _run_factors,
    "zk": _run_zk,
    "omega": _run_omega,
    "suite": _run_suite,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def passed(result: BaseModel) -> bool:
    if isinstance(result, VerificationReport):
        return result.equal
    if isinstance(result, SuiteSummary):
        return result.failed == 0
    if isinstance(result, MatrixReport):
        return result.unimodular and result.recursionHolds
    return True


def emit(result: BaseModel, out: Optional[Path]) -> None:
    text = result.model_dump_json(indent=2)
    if out is None:
        print(text)
    else:
        out.write_text(text + "\n")
        logger.info(f"Wrote {out}")


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    args = build_parser().parse_args(argv)
    if args.command != "suite" and args.q is None:
        args.q = settings.DEFAULT_Q
    runner = VERIFY_RUNNERS[args.check] if args.command == "verify" else COMMAND_RUNNERS[args.command]
    try:
        result = runner(args)
    except (WorkbenchError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 2
    if args.deterministic and isinstance(result, VerificationReport):
        result.timing = 0.0
    emit(result, args.out)
    return 0 if passed(result) else 1


if __name__ == "__main__":
    sys.exit(main())
