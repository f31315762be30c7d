import json
from fractions import Fraction

import pytest

from app.api.schemas.suite import SuiteConfig
from app.core import matrices as mx
from app.core.characters import CharTuple, real_char, unr
from app.core.exactalg import Scalar
from app.main import build_parser, main
from app.utils.parsing import parse_char_tuple, parse_character, parse_matrix, parse_schwartz
from tests.conftest import Q


def _run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def test_zk_single_matrix(capsys):
    code, out = _run(capsys, "zk", "--n", "3")
    assert code == 0
    assert out["k"] == 3
    assert out["unimodular"] and out["recursionHolds"]


def test_factors_of_given_character(capsys):
    code, out = _run(capsys, "factors", "--char", "2/3@1/2")
    assert code == 0
    assert out["field"] == f"Q_{Q}"


def test_factors_of_sign_character(capsys):
    code, out = _run(capsys, "factors", "--field", "real", "--char", "sgn")
    assert code == 0
    assert out["field"] == "R"


def test_omega_strip(capsys):
    code, out = _run(capsys, "omega", "--nu", "1,1", "--nu-prime", "1")
    assert code == 0
    assert (out["lower"], out["upper"]) == (0.0, 1.0)


def test_omega_table(capsys):
    code, out = _run(capsys, "omega")
    assert code == 0
    assert out["equal"]


def test_verify_tate(capsys):
    code, out = _run(capsys, "verify", "tate", "--char", "3/5", "--phi", "lattice", "--deterministic")
    assert code == 0
    assert out["equal"]
    assert out["timing"] == 0.0


def test_verify_gamma_lemma_with_seed(capsys):
    code, out = _run(capsys, "verify", "gamma-lemma", "--seed", "17")
    assert code == 0
    assert out["seed"] == 17


def test_verify_reflection_real(capsys):
    code, out = _run(capsys, "verify", "reflection", "--field", "real", "--char", "sgn@1/2")
    assert code == 0
    assert out["mode"] == "numeric"


def test_composite_q_is_rejected(capsys):
    assert main(["factors", "--q", "4", "--char", "2"]) == 2


def test_bad_character_is_rejected(capsys):
    assert main(["factors", "--field", "real", "--char", "chi"]) == 2


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["integrate"])


def test_suite_writes_summary(tmp_path, capsys):
    out = tmp_path / "summary.json"
    code = main(["suite", "--items", "zk,omega", "--seed", "3", "--deterministic", "--out", str(out)])
    assert code == 0
    summary = json.loads(out.read_text())
    assert summary["total"] == 2
    assert summary["seed"] == 3
    assert all(r["timing"] == 0.0 for r in summary["reports"])


def test_suite_reads_config_file(tmp_path, capsys):
    config = tmp_path / "suite.json"
    config.write_text(SuiteConfig(q=7, items=["omega"], samples=1).model_dump_json())
    code, out = _run(capsys, "suite", "--config", str(config))
    assert code == 0
    assert out["reports"][0]["field"] == "Q_7"


def test_suite_rejects_unknown_item(capsys):
    assert main(["suite", "--items", "nonsense"]) == 2


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def test_parse_padic_character(field):
    assert parse_character("2/3+1/3i@1/2", field) == unr(field, Scalar.gaussian(Fraction(2, 3), Fraction(1, 3)), Fraction(1, 2))
    assert parse_character(" 5 ", field) == unr(field, 5)


@pytest.mark.parametrize(
    "text,expected",
    [("1", real_char(0)), ("trivial", real_char(0)), ("sgn", real_char(1)), ("sgn@1/2", real_char(1, Fraction(1, 2))), ("1@-1/2", real_char(0, Fraction(-1, 2)))],
)
def test_parse_real_character(real_field, text, expected):
    assert parse_character(text, real_field) == expected


def test_parse_real_character_rejects_garbage(real_field):
    with pytest.raises(ValueError):
        parse_character("cos", real_field)


def test_parse_char_tuple(field):
    assert parse_char_tuple("", field) == CharTuple()
    assert parse_char_tuple(None, field) == CharTuple()
    assert parse_char_tuple("2,3", field) == CharTuple.of(unr(field, 2), unr(field, 3))


def test_parse_matrix():
    assert parse_matrix("1,1/5;0,5") == mx.mat([[1, Fraction(1, 5)], [0, 5]])
    with pytest.raises(ValueError):
        parse_matrix("1,2;3")


def test_parse_schwartz():
    assert parse_schwartz("lattice", Q) == parse_schwartz("lattice:0", Q)
    assert parse_schwartz("lattice:1", Q, (1, 2)).max_depth() == 1
    assert str(parse_schwartz("phase:1/5", Q))
    with pytest.raises(ValueError):
        parse_schwartz("gauss", Q)
