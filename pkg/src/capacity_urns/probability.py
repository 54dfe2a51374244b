"""Exact probabilities under the uniform measure on unrestricted compositions.

Every composition of ``m`` into ``n`` parts is equally likely, so the sample
space has C(m+n-1, n-1) outcomes. This is not the distinguishable-ball
(multinomial) measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

from capacity_urns.core.arithmetic import ExactRational, Natural, exact_ratio
from capacity_urns.core.counting import count_upper_only, inclusion_exclusion_terms, stars_and_bars
from capacity_urns.core.errors import InvalidSpecError

__all__ = ["ProbabilityReport", "prob_all_boxes_within", "prob_at_least_one_exceeds"]


@dataclass(frozen=True)
class ProbabilityReport:
    value: ExactRational
    numerator_count: Natural
    denominator_count: Natural

    @property
    def decimal_approx(self) -> float:
        """Display only; never fed back into computation."""

        return float(self.value)

    def render(self) -> str:
        if self.value in (0, 1):
            return str(self.value.numerator)
        raw = f"{self.numerator_count}/{self.denominator_count}"
        reduced = f"{self.value.numerator}/{self.value.denominator}"
        prefix = raw if raw == reduced else f"{raw} = {reduced}"
        return f"{prefix} ≈ {self.decimal_approx:.6f}"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "numerator_count": str(self.numerator_count),
            "denominator_count": str(self.denominator_count),
            "decimal_approx": round(self.decimal_approx, 12),
        }


def _check_args(m: int, n: int, kappa: int) -> None:
    if n < 1:
        raise InvalidSpecError(f"boxes must be >= 1, got {n}")
    if m < 0 or kappa < 0:
        raise InvalidSpecError(f"balls and kappa must be >= 0, got m={m}, kappa={kappa}")


def prob_all_boxes_within(m: int, n: int, kappa: int) -> ProbabilityReport:
    """Probability that a uniform composition keeps every box at or below ``kappa``."""

    _check_args(m, n, kappa)
    omega = count_upper_only(m, n, kappa).count
    space = stars_and_bars(m, n)
    return ProbabilityReport(exact_ratio(omega, space), omega, space)


def prob_at_least_one_exceeds(m: int, n: int, kappa: int) -> ProbabilityReport:
    """Complement of :func:`prob_all_boxes_within`, built from the alternating sum."""

    _check_args(m, n, kappa)
    space = stars_and_bars(m, n)
    if kappa >= m:
        overflow = 0
    else:
        # terms with alpha > n vanish, so the cap keeps infeasible caps exact
        terms = inclusion_exclusion_terms(m, n, kappa, limit=min(n, m // (kappa + 1)))
        overflow = sum(term.term_value for term in terms)
    return ProbabilityReport(exact_ratio(overflow, space), overflow, space)
