"""Pydantic schemas for verification reports"""

from pydantic import BaseModel, Field
from typing import Dict, List, Optional


class VerificationReport(BaseModel):
    """Schema for one theorem or identity check."""

    caseId: str = Field(..., description="Stable identifier, e.g. theorem-a/b/2-1/003")
    check: str = Field(..., description="Check name, e.g. theorem-a, prop31, tate-fe")
    field: str = Field(..., description="Base field, Q_p or R")
    mode: str = Field(default="exact", description="exact or numeric")
    parameters: Dict[str, str] = Field(default_factory=dict, description="Parameters as exact strings")
    lhs: Optional[str] = Field(default=None, description="Canonical left side (exact) or first sample (numeric)")
    rhs: Optional[str] = Field(default=None, description="Canonical right side (exact) or first sample (numeric)")
    equal: bool = False
    maxRelativeError: Optional[float] = None
    sValues: List[str] = Field(default_factory=list, description="Sample points of numeric comparisons")
    convergence: Dict[str, bool] = Field(default_factory=dict, description="Convergence hypotheses and divergence flags")
    warnings: List[str] = Field(default_factory=list)
    error: Optional[str] = Field(default=None, description="Failure message when the check could not run")
    seed: Optional[int] = None
    timing: float = Field(default=0.0, description="Wall-clock seconds; zero in deterministic runs")


class FactorReport(BaseModel):
    """Local factors of one character."""

    character: str
    field: str
    L: str
    epsilon: str
    gamma: str


class StripReport(BaseModel):
    """Convergence strip of the open-orbit integrals."""

    nu: str
    nuPrime: str
    lower: Optional[float] = Field(..., description="Lower bound of Re(s); null for -infinity")
    upper: Optional[float] = Field(..., description="Upper bound of Re(s); null for +infinity")
    empty: bool
    interiorPoints: List[float] = Field(default_factory=list)


class MatrixReport(BaseModel):
    """The matrix z_k and its structural properties."""

    k: int
    z: List[List[str]]
    det: str
    unimodular: bool
    recursionHolds: bool


class SuiteSummary(BaseModel):
    """Aggregated suite outcome."""

    seed: int
    total: int
    passed: int
    failed: int
    implicationHolds: Optional[bool] = Field(
        default=None, description="Recurrences and Tate equation imply the (2, 1) theorem check"
    )
    reports: List[VerificationReport] = Field(default_factory=list)
