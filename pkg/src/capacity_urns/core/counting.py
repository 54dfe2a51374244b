"""Closed-form counts for balls-into-boxes distributions with occupancy bounds.

A valid distribution of ``m`` identical balls into ``n`` distinct boxes is an
occupancy sequence ``(X1, ..., Xn)`` with ``sum(X) == m`` and
``k1 <= Xi <= k2`` for every box.  The canonical algorithm pre-places ``k1``
balls per box and counts the residual problem with one inclusion-exclusion
formula; the per-band formulas are kept as cross-checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from .arithmetic import Natural, binomial_cached
from .errors import InfeasibleSpecError, InvalidSpecError, OutOfBandError

__all__ = [
    "ProblemSpec",
    "ShiftedProblem",
    "CaseLabel",
    "InclusionExclusionTerm",
    "CountReport",
    "stars_and_bars_nonempty",
    "stars_and_bars",
    "lower_bound_feasible",
    "upper_bound_feasible",
    "count_lower_only",
    "max_violating_boxes",
    "count_upper_single_violation",
    "inclusion_exclusion_terms",
    "count_upper_only",
    "shift",
    "classify",
    "count",
    "count_by_cases",
    "count_partial_derivatives",
]

logger = logging.getLogger("capacity_urns.counting")


def _require_int(name: str, value: Any, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidSpecError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidSpecError(f"{name} must be >= {minimum}, got {value}")
    return value


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class ProblemSpec:
    """Distribute ``balls`` into ``boxes`` with ``lower <= Xi <= upper`` per box.

    ``upper=None`` means the boxes are unbounded above.
    """

    balls: int
    boxes: int
    lower: int = 0
    upper: Optional[int] = None

    def __post_init__(self) -> None:
        _require_int("balls", self.balls, minimum=0)
        _require_int("boxes", self.boxes, minimum=1)
        _require_int("lower", self.lower, minimum=0)
        if self.upper is not None:
            _require_int("upper", self.upper, minimum=0)
            if self.lower > self.upper:
                raise InvalidSpecError(
                    f"lower bound {self.lower} exceeds upper bound {self.upper}"
                )

    @property
    def bounded(self) -> bool:
        return self.upper is not None

    @property
    def effective_upper(self) -> int:
        """Upper bound with ``None`` normalized to ``balls`` (no box can hold more)."""

        return self.balls if self.upper is None else self.upper

    def as_dict(self) -> Dict[str, Optional[int]]:
        return {"m": self.balls, "n": self.boxes, "k1": self.lower, "k2": self.upper}

    def __str__(self) -> str:
        upper = "inf" if self.upper is None else str(self.upper)
        return f"(m={self.balls}, n={self.boxes}, k1={self.lower}, k2={upper})"


@dataclass(frozen=True)
class ShiftedProblem:
    """Residual problem after placing ``k1`` balls in every box."""

    residual_balls: int
    boxes: int
    residual_upper: Optional[int] = None
    residual_lower: int = 0

    def __post_init__(self) -> None:
        if self.residual_balls < 0:
            raise InfeasibleSpecError(
                f"residual balls {self.residual_balls} is negative; lower bound infeasible"
            )
        if self.residual_lower != 0:
            raise InvalidSpecError("residual lower bound is always 0")

    def as_spec(self) -> ProblemSpec:
        return ProblemSpec(self.residual_balls, self.boxes, 0, self.residual_upper)

    def as_dict(self) -> Dict[str, Optional[int]]:
        return {
            "m": self.residual_balls,
            "k1": self.residual_lower,
            "k2": self.residual_upper,
        }


class CaseLabel(Enum):
    """Parameter regions of the case taxonomy, each tied to its section string."""

    INFEASIBLE_LOWER = ("InfeasibleLowerLemma21", "§2.1.3 (Lemma 2.1)")
    INFEASIBLE_UPPER = ("InfeasibleUpperLemma22", "§2.2.2 (Lemma 2.2)")
    NO_EMPTY_BASELINE = ("NoEmptyBaseline", "§2.1.1")
    UNRESTRICTED_BASELINE = ("UnrestrictedBaseline", "§2.1.2")
    LOWER_ONLY = ("LowerOnly", "§2.1.4")
    UPPER_ONLY_SINGLE_VIOLATION = ("UpperOnlySingleViolation", "§2.2.1")
    UPPER_ONLY_INCLUSION_EXCLUSION = ("UpperOnlyInclusionExclusion", "§2.2.3")
    DOUBLE_BOUND_SHIFTED = ("DoubleBoundShifted", "§2.3")
    FEWER_BALLS_THAN_BOXES = ("FewerBallsThanBoxes", "§3")

    def __init__(self, label: str, section: str) -> None:
        self.label = label
        self.section = section

    @property
    def infeasible(self) -> bool:
        return self in (CaseLabel.INFEASIBLE_LOWER, CaseLabel.INFEASIBLE_UPPER)

    @classmethod
    def from_label(cls, label: str) -> "CaseLabel":
        for member in cls:
            if member.label == label:
                return member
        raise KeyError(label)

    def __str__(self) -> str:
        return f"{self.section} ({self.label})"


@dataclass(frozen=True)
class InclusionExclusionTerm:
    """One summand ``(-1)^(alpha+1) C(n, alpha) C(m - alpha(k+1) + n - 1, n - 1)``."""

    alpha: int
    sign: int
    choose_boxes: Natural
    remaining_count: Natural
    term_value: int

    @classmethod
    def build(cls, m: int, n: int, kappa: int, alpha: int) -> "InclusionExclusionTerm":
        sign = 1 if alpha % 2 else -1
        choose_boxes = binomial_cached(n, alpha)
        remaining = binomial_cached(m - alpha * (kappa + 1) + n - 1, n - 1)
        return cls(
            alpha=alpha,
            sign=sign,
            choose_boxes=choose_boxes,
            remaining_count=remaining,
            term_value=sign * choose_boxes * remaining,
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "sign": self.sign,
            "choose_boxes": str(self.choose_boxes),
            "remaining_count": str(self.remaining_count),
            "term_value": str(self.term_value),
        }


@dataclass(frozen=True)
class CountReport:
    """Exact count with its case label, the shift applied and the term breakdown."""

    count: Natural
    label: CaseLabel
    shifted: Optional[ShiftedProblem] = None
    terms: Tuple[InclusionExclusionTerm, ...] = field(default_factory=tuple)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "count": str(self.count),
            "label": self.label.label,
            "section": self.label.section,
            "shifted": self.shifted.as_dict() if self.shifted else None,
            "terms": [term.as_dict() for term in self.terms],
        }


def stars_and_bars_nonempty(m: int, n: int) -> Natural:
    """Ways to put ``m`` balls in ``n`` boxes with no box empty: C(m-1, n-1)."""

    return binomial_cached(m - 1, n - 1)


def stars_and_bars(m: int, n: int) -> Natural:
    """Ways to put ``m`` balls in ``n`` boxes, empty boxes allowed: C(m+n-1, n-1)."""

    return binomial_cached(m + n - 1, n - 1)


def count_partial_derivatives(variables: int, order: int) -> Natural:
    """Distinct order-``order`` partial derivatives of a smooth function of ``variables`` inputs."""

    _require_int("variables", variables, minimum=1)
    _require_int("order", order, minimum=0)
    return stars_and_bars(order, variables)


def lower_bound_feasible(m: int, n: int, k1: int) -> bool:
    return k1 <= m // n


def upper_bound_feasible(m: int, n: int, k2: int) -> bool:
    return k2 >= _ceil_div(m, n)


def max_violating_boxes(m: int, kappa: int) -> int:
    """Largest number of boxes that can each hold more than ``kappa`` of ``m`` balls."""

    return m // (kappa + 1)


def count_lower_only(m: int, n: int, k1: int) -> Natural:
    if not lower_bound_feasible(m, n, k1):
        raise InfeasibleSpecError(
            f"lower bound {k1} exceeds floor({m}/{n}) = {m // n}"
        )
    return binomial_cached(m - n * k1 + n - 1, n - 1)


def count_upper_single_violation(m: int, n: int, k2: int) -> Natural:
    """Band formula for ``floor(m/2) <= k2 < m`` where at most one box can overflow."""

    if n < 2 or not (m // 2 <= k2 < m):
        raise OutOfBandError(
            f"single-violation formula needs floor(m/2) <= k2 < m and n >= 2; "
            f"got m={m}, n={n}, k2={k2}"
        )
    return stars_and_bars(m, n) - n * binomial_cached(m - k2 + n - 2, n - 1)


def inclusion_exclusion_terms(
    m: int, n: int, kappa: int, *, limit: Optional[int] = None
) -> Tuple[InclusionExclusionTerm, ...]:
    """Terms for ``alpha = 1 .. limit``; ``limit`` defaults to ``max_violating_boxes``."""

    top = max_violating_boxes(m, kappa) if limit is None else limit
    return tuple(InclusionExclusionTerm.build(m, n, kappa, alpha) for alpha in range(1, top + 1))


def count_upper_only(m: int, n: int, k2: int) -> CountReport:
    """Count distributions with every box holding at most ``k2`` balls."""

    spec = ProblemSpec(m, n, 0, k2)
    label = classify(spec)
    if label.infeasible:
        return CountReport(0, label)
    if k2 >= m:
        return CountReport(stars_and_bars(m, n), label)
    terms = inclusion_exclusion_terms(m, n, k2)
    total = stars_and_bars(m, n) - sum(term.term_value for term in terms)
    return CountReport(total, label, terms=terms)


def shift(spec: ProblemSpec) -> ShiftedProblem:
    """Pre-place ``k1`` balls in each box and return the residual problem."""

    if not lower_bound_feasible(spec.balls, spec.boxes, spec.lower):
        raise InfeasibleSpecError(f"lower bound infeasible for {spec}")
    upper = None if spec.upper is None else spec.upper - spec.lower
    return ShiftedProblem(spec.balls - spec.boxes * spec.lower, spec.boxes, upper)


def classify(spec: ProblemSpec) -> CaseLabel:
    m, n, k1, k2 = spec.balls, spec.boxes, spec.lower, spec.upper
    if not lower_bound_feasible(m, n, k1):
        return CaseLabel.INFEASIBLE_LOWER
    if k2 is not None and not upper_bound_feasible(m, n, k2):
        return CaseLabel.INFEASIBLE_UPPER
    # A feasible spec with m < n always has k1 == 0.
    if k1 == 0 and m < n:
        return CaseLabel.FEWER_BALLS_THAN_BOXES
    # bands are decided on the residual problem after pre-placing k1 per box
    residual = m - n * k1
    if k2 is None or k2 - k1 >= residual:
        if k1 == 0:
            return CaseLabel.UNRESTRICTED_BASELINE
        if k1 == 1:
            return CaseLabel.NO_EMPTY_BASELINE
        return CaseLabel.LOWER_ONLY
    if k1 == 0:
        if k2 >= m // 2:
            return CaseLabel.UPPER_ONLY_SINGLE_VIOLATION
        return CaseLabel.UPPER_ONLY_INCLUSION_EXCLUSION
    return CaseLabel.DOUBLE_BOUND_SHIFTED


def count(spec: ProblemSpec) -> CountReport:
    """Total counting function: infeasible specs yield a labeled zero."""

    label = classify(spec)
    if label.infeasible:
        logger.debug("count %s infeasible: %s", spec, label.label)
        return CountReport(0, label)
    shifted = shift(spec)
    residual_upper = (
        shifted.residual_balls if shifted.residual_upper is None else shifted.residual_upper
    )
    inner = count_upper_only(shifted.residual_balls, spec.boxes, residual_upper)
    logger.debug("count %s -> %s via %s", spec, inner.count, label.label)
    return CountReport(inner.count, label, shifted, inner.terms)


def _omega(m: int, n: int, kappa: int) -> Natural:
    return stars_and_bars(m, n) - sum(
        term.term_value for term in inclusion_exclusion_terms(m, n, kappa)
    )


def count_by_cases(spec: ProblemSpec) -> Natural:
    """Evaluate the per-region formulas instead of the unified shifted formula.

    Double-bound regions dispatch on the residual problem: ``k2* >= m*`` is
    unrestricted, ``floor(m*/2) <= k2* < m*`` uses the single-violation form
    and anything tighter uses the full inclusion-exclusion sum.
    """

    label = classify(spec)
    m, n, k1 = spec.balls, spec.boxes, spec.lower
    if label.infeasible:
        return 0
    if label is CaseLabel.UNRESTRICTED_BASELINE:
        return stars_and_bars(m, n)
    if label is CaseLabel.NO_EMPTY_BASELINE:
        return stars_and_bars_nonempty(m, n)
    if label is CaseLabel.LOWER_ONLY:
        return count_lower_only(m, n, k1)

    residual = m - n * k1
    upper = spec.effective_upper - k1
    if upper >= residual:
        return stars_and_bars(residual, n)
    if n >= 2 and upper >= residual // 2:
        return count_upper_single_violation(residual, n, upper)
    return _omega(residual, n, upper)
