"""Enumerations shared across the workbench"""

import enum


class FieldKind(str, enum.Enum):
    """Base local field"""

    PADIC = "padic"
    REAL = "real"


class Mode(str, enum.Enum):
    """Evaluation mode of an integral or a check"""

    EXACT = "exact"
    NUMERIC = "numeric"


class RSCase(str, enum.Enum):
    """Shape of a Rankin-Selberg or open-orbit integral"""

    NN = "nn"  # n' = n, carries a Schwartz function
    NNM1 = "nnm1"  # n' = n - 1


class TheoremCase(str, enum.Enum):
    """Which half of the Lambda = Gamma * Z theorem is checked"""

    A = "a"
    B = "b"


class Recurrence(str, enum.Enum):
    """Recurrence relation between open-orbit integrals"""

    PROP31 = "prop31"
    PROP32 = "prop32"


class SchwartzAction(str, enum.Enum):
    """Structural transforms of Schwartz spans"""

    TRANSPOSE = "transpose"
    RIGHT_TRANSLATE = "right_translate"
    NEGATE_ARG = "negate_arg"
