"""Utilities for parsing characters, tuples and matrices from command-line text"""

from fractions import Fraction
from typing import Optional

from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, real_char, unr
from app.core.exactalg import parse_scalar
from app.core.localfield import LocalFieldDesc
from app.core.schwartz import SchwartzSpan


def parse_character(text: str, field: LocalFieldDesc) -> MultChar:
    """
    Parse one character.

    Supports:
    - p-adic: "2/3+1/3i" (Satake parameter) or "2/3+1/3i@1/2" (with twist |.|^(1/2))
    - real: "1", "sgn", "sgn@1/2", "1@-1/2"
    """
    body, _, twist = text.strip().partition("@")
    t = Fraction(twist) if twist else Fraction(0)
    if field.is_padic:
        return unr(field, parse_scalar(body, field.q), t)
    if body in ("", "1", "triv", "trivial"):
        return real_char(0, t)
    if body == "sgn":
        return real_char(1, t)
    raise ValueError(f"cannot parse real character: {text!r}")


def parse_char_tuple(text: Optional[str], field: LocalFieldDesc) -> CharTuple:
    """Comma-separated characters; empty or None gives the empty tuple."""
    if not text or not text.strip():
        return CharTuple()
    return CharTuple(tuple(parse_character(part, field) for part in text.split(",")))


def parse_matrix(text: str) -> mx.Matrix:
    """
    Parse a matrix with rows separated by ";" and entries by ",".

    Example: "1,1/5;0,5" -> [[1, 1/5], [0, 5]]
    """
    rows = [[Fraction(entry.strip()) for entry in row.split(",")] for row in text.strip().split(";")]
    if any(len(row) != len(rows[0]) for row in rows):
        raise ValueError(f"ragged matrix: {text!r}")
    return mx.mat(rows)


def parse_schwartz(text: str, p: int, shape=(1, 1)) -> SchwartzSpan:
    """
    Parse an elementary Schwartz function.

    Supports:
    - "lattice" or "lattice:1": indicator of p^depth O^shape
    - "phase:1/5": psi(c x) times the indicator of O (shape (1, 1) only)
    """
    kind, _, arg = text.strip().partition(":")
    if kind == "lattice":
        return SchwartzSpan.lattice(p, shape, depth=int(arg) if arg else 0)
    if kind == "phase":
        return SchwartzSpan.elementary(p, shape, phase=[Fraction(arg)])
    raise ValueError(f"cannot parse Schwartz function: {text!r}")
