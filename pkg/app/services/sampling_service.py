"""Seeded random parameters: Satake parameters, characters, translates and Schwartz data"""

import logging
from fractions import Fraction
from typing import Callable, List, Optional, TypeVar

import numpy as np

from app.config import settings
from app.core import matrices as mx
from app.core.characters import CharTuple, MultChar, real_char, unr
from app.core.exactalg import Scalar
from app.core.exceptions import PoleCollisionError, PoleError
from app.core.localfield import LocalFieldDesc
from app.core.schwartz import SchwartzSpan

logger = logging.getLogger(__name__)

T = TypeVar("T")

MAX_RESAMPLES = 20


class ParameterSampler:
    """Draws every random parameter of a check from one numpy Generator."""

    def __init__(self, seed: Optional[int] = None, height: Optional[int] = None):
        self.seed = settings.DEFAULT_SEED if seed is None else seed
        self.height = height or settings.SATAKE_HEIGHT
        self.rng = np.random.default_rng(self.seed)

    def rational(self, nonzero: bool = False) -> Fraction:
        while True:
            num = int(self.rng.integers(-self.height, self.height + 1))
            den = int(self.rng.integers(1, self.height + 1))
            if num or not nonzero:
                return Fraction(num, den)

    def satake(self) -> Scalar:
        """A nonzero Gaussian rational; one draw in three is purely rational."""
        re_part = self.rational()
        im_part = self.rational() if self.rng.random() < 2 / 3 else Fraction(0)
        if not re_part and not im_part:
            re_part = self.rational(nonzero=True)
        return Scalar.gaussian(re_part, im_part)

    def unit_satake(self) -> Scalar:
        """A Gaussian rational of modulus one, ((m^2 - n^2) + 2mn i) / (m^2 + n^2)."""
        while True:
            m = int(self.rng.integers(-self.height, self.height + 1))
            n = int(self.rng.integers(-self.height, self.height + 1))
            if m or n:
                norm = m * m + n * n
                return Scalar.gaussian(Fraction(m * m - n * n, norm), Fraction(2 * m * n, norm))

    def half_integer(self, bound: int = 1) -> Fraction:
        return Fraction(int(self.rng.integers(-2 * bound, 2 * bound + 1)), 2)

    def character(self, field: LocalFieldDesc, twisted: bool = False) -> MultChar:
        t = self.half_integer() if twisted else Fraction(0)
        if field.is_padic:
            return unr(field, self.satake(), t)
        return real_char(int(self.rng.integers(0, 2)), t)

    def char_tuple(self, field: LocalFieldDesc, length: int, twisted: bool = False) -> CharTuple:
        return CharTuple(tuple(self.character(field, twisted) for _ in range(length)))

    def unit_char_tuple(self, field: LocalFieldDesc, length: int) -> CharTuple:
        """Characters with ex = 0, so the convergence strip is as wide as possible."""
        return CharTuple(tuple(unr(field, self.unit_satake()) for _ in range(length)))

    def translate(self, p: int, k: int) -> mx.Matrix:
        """An invertible matrix with entries in p^[-1, 1] * {small integers}."""
        while True:
            rows = [
                [Fraction(int(self.rng.integers(-2, 3))) * Fraction(p) ** int(self.rng.integers(-1, 2)) for _ in range(k)]
                for _ in range(k)
            ]
            g = mx.mat(rows)
            if mx.det(g) != 0:
                return g

    def unit_matrix(self, p: int, k: int) -> mx.Matrix:
        """A random element of GL_k(Z_p) with entries in [0, p)."""
        while True:
            g = mx.mat([[int(self.rng.integers(0, p)) for _ in range(k)] for _ in range(k)])
            if mx.in_maximal_compact(g, p):
                return g

    def schwartz(self, p: int, shape=(1, 1), with_phase: bool = True) -> SchwartzSpan:
        """One of 1[O], 1[pO], psi(c x) 1[O] with v(c) = -1, as functions on k^shape."""
        choices = 3 if with_phase and shape == (1, 1) else 2
        pick = int(self.rng.integers(0, choices))
        if pick == 0:
            return SchwartzSpan.lattice(p, shape)
        if pick == 1:
            return SchwartzSpan.lattice(p, shape, depth=1)
        c = Fraction(int(self.rng.integers(1, p)), p)
        return SchwartzSpan.elementary(p, shape, phase=[c])

    def lattice(self, p: int, shape) -> SchwartzSpan:
        return SchwartzSpan.lattice(p, shape, depth=int(self.rng.integers(0, 2)))

    def real_s(self, count: int, lo: float, hi: float) -> List[complex]:
        return [complex(x) for x in np.sort(self.rng.uniform(lo, hi, size=count))]


def with_resampling(draw: Callable[[], T], check: Callable[[T], object], attempts: int = MAX_RESAMPLES):
    """Run ``check`` on fresh draws until no formal pole collides with the parameters.

    Returns (parameters, result of check).
    """
    last: Optional[Exception] = None
    for attempt in range(attempts):
        params = draw()
        try:
            return params, check(params)
        except (PoleCollisionError, PoleError) as exc:
            last = exc
            logger.warning(f"pole collision on draw {attempt}, resampling: {exc}")
    raise PoleCollisionError(f"no pole-free parameters after {attempts} draws: {last}")
