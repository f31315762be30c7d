from fractions import Fraction

import pytest
from pydantic import ValidationError

from app.api.schemas.suite import SUITE_ITEMS, CharacterConfig, SuiteConfig
from app.config import Settings
from app.core.characters import real_char, unr
from app.core.exactalg import Scalar


def test_settings_defaults(monkeypatch):
    monkeypatch.delenv("DEFAULT_Q", raising=False)
    current = Settings()
    assert current.DEFAULT_Q == 5
    assert current.SUITE_ALWAYS_EAGER is True
    assert 0 < current.NUMERIC_TOLERANCE < 1


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("DEFAULT_Q", "7")
    monkeypatch.setenv("NUMERIC_CUTOFF", "60")
    current = Settings()
    assert current.DEFAULT_Q == 7
    assert current.NUMERIC_CUTOFF == 60


def test_settings_are_case_sensitive(monkeypatch):
    monkeypatch.setenv("default_q", "11")
    monkeypatch.delenv("DEFAULT_Q", raising=False)
    assert Settings().DEFAULT_Q == 5


def test_default_suite_runs_every_item():
    config = SuiteConfig.default()
    assert config.items == list(SUITE_ITEMS)
    assert config.mode == "exact"


def test_suite_rejects_unknown_items():
    with pytest.raises(ValidationError):
        SuiteConfig(items=["zk", "riemann"])


def test_suite_rejects_unknown_mode():
    with pytest.raises(ValidationError):
        SuiteConfig(mode="symbolic")


def test_suite_rejects_negative_samples():
    with pytest.raises(ValidationError):
        SuiteConfig(samples=-1)


def test_suite_config_from_json():
    config = SuiteConfig.model_validate_json(
        '{"q": 3, "seed": 42, "items": ["reflection"], "characters": [{"a": "2/3", "t": "1/2"}]}'
    )
    assert config.q == 3
    assert config.seed == 42
    assert config.characters[0].t == "1/2"


def test_character_config_padic(field):
    assert CharacterConfig(a="2/3+1/3i", t="1/2").to_char(field) == unr(
        field, Scalar.gaussian(Fraction(2, 3), Fraction(1, 3)), Fraction(1, 2)
    )
    assert CharacterConfig().to_char(field) == unr(field, 1)


def test_character_config_real(real_field):
    assert CharacterConfig(eps=1, t="-1/2").to_char(real_field) == real_char(1, Fraction(-1, 2))


def test_character_config_rejects_bad_sign():
    with pytest.raises(ValidationError):
        CharacterConfig(eps=2)
