"""Exact counting for identical balls in distinct boxes under occupancy bounds."""

from .core.arithmetic import ExactRational, Natural, binomial, binomial_cached
from .core.counting import (
    CaseLabel,
    CountReport,
    InclusionExclusionTerm,
    ProblemSpec,
    ShiftedProblem,
    classify,
    count,
)
from .core.errors import (
    CapacityUrnsError,
    InfeasibleSpecError,
    InvalidSpecError,
    OutOfBandError,
    ResourceLimitError,
)

__all__ = [
    "ExactRational",
    "Natural",
    "binomial",
    "binomial_cached",
    "CaseLabel",
    "CountReport",
    "InclusionExclusionTerm",
    "ProblemSpec",
    "ShiftedProblem",
    "classify",
    "count",
    "CapacityUrnsError",
    "InfeasibleSpecError",
    "InvalidSpecError",
    "OutOfBandError",
    "ResourceLimitError",
]
