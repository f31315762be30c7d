"""Pydantic schemas for suite configuration files"""

from fractions import Fraction
from pydantic import BaseModel, Field, field_validator
from typing import List, Optional

from app.core.characters import MultChar, real_char, unr
from app.core.exactalg import parse_scalar
from app.core.localfield import LocalFieldDesc

SUITE_ITEMS = (
    "theorem-a",
    "recurrence",
    "tate-fe",
    "gamma-lemma",
    "reflection",
    "psi-conjugation",
    "equivariance",
    "zk",
    "iwasawa",
    "omega",
    "probes",
)


class CharacterConfig(BaseModel):
    """A character as {"a": "2/3+1/3i", "t": "1/2"} (Q_p) or {"eps": 1, "t": "0"} (R)."""

    a: Optional[str] = Field(default=None, description="Satake parameter (p-adic only)")
    t: str = Field(default="0", description="Half-integer twist |.|^t")
    eps: int = Field(default=0, ge=0, le=1, description="Sign exponent (real only)")

    def to_char(self, field: LocalFieldDesc) -> MultChar:
        if field.is_padic:
            return unr(field, parse_scalar(self.a or "1", field.q), Fraction(self.t))
        return real_char(self.eps, Fraction(self.t))


class SuiteConfig(BaseModel):
    """Which checks to run and with how many random draws."""

    q: int = Field(default=5, description="Residue cardinality of the p-adic field")
    seed: Optional[int] = Field(default=None, description="Seed; defaults to DEFAULT_SEED")
    samples: int = Field(default=100, ge=0, description="Random parameter sets per item")
    items: List[str] = Field(default_factory=list, description=f"Items from {', '.join(SUITE_ITEMS)}")
    mode: str = Field(default="exact", description="exact or numeric for theorem checks")
    cutoff: Optional[int] = Field(default=None, ge=1, description="Shell cutoff of numeric evaluations")
    sValues: Optional[List[float]] = Field(default=None, description="Override sample points (may leave the strip)")
    characters: List[CharacterConfig] = Field(default_factory=list, description="Fixed characters for factor checks")

    @field_validator("items")
    @classmethod
    def known_items(cls, items: List[str]) -> List[str]:
        unknown = [i for i in items if i not in SUITE_ITEMS]
        if unknown:
            raise ValueError(f"unknown suite items: {unknown}")
        return items

    @field_validator("mode")
    @classmethod
    def known_mode(cls, mode: str) -> str:
        if mode not in ("exact", "numeric"):
            raise ValueError(f"mode must be exact or numeric, got {mode}")
        return mode

    @classmethod
    def default(cls) -> "SuiteConfig":
        return cls(items=list(SUITE_ITEMS))
