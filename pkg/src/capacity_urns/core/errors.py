"""Exception family shared by the counting library and its front ends."""

from __future__ import annotations


class CapacityUrnsError(Exception):
    """Base class for every error raised by capacity_urns."""


class InvalidSpecError(CapacityUrnsError, ValueError):
    """Raised when a problem specification is malformed (n = 0, k1 > k2, negatives)."""


class InfeasibleSpecError(CapacityUrnsError):
    """Raised when an operation needs a feasible spec and was handed an infeasible one."""


class OutOfBandError(CapacityUrnsError, ValueError):
    """Raised when a band-restricted formula is evaluated outside its band."""


class ResourceLimitError(CapacityUrnsError):
    """Raised when an oracle table would exceed the configured cell ceiling."""

    def __init__(self, message: str, *, cells: int, limit: int) -> None:
        super().__init__(message)
        self.cells = cells
        self.limit = limit
