"""Independent ground truth for the closed forms.

Nothing here calls the binomial helpers: the dynamic-programming table and the
polynomial product count compositions from first principles, enumeration
walks them explicitly, and the sampler only borrows exact counts to weight
its choices.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from capacity_urns.config import get_dp_cell_limit
from capacity_urns.core.counting import (
    ProblemSpec,
    classify,
    count,
    max_violating_boxes,
)
from capacity_urns.core.errors import InfeasibleSpecError, InvalidSpecError, ResourceLimitError
from capacity_urns.support import GridMetrics

__all__ = [
    "Composition",
    "Mismatch",
    "VerificationReport",
    "oracle_count_dp",
    "oracle_count_polynomial",
    "enumerate_compositions",
    "check_lemma23",
    "uniform_sample",
    "grid_specs",
    "verify_grid",
    "closed_form_count",
]

logger = logging.getLogger("capacity_urns.oracle")

SEED_LIMIT = 2**64


@dataclass(frozen=True, order=True)
class Composition:
    """One occupancy assignment ``(X1, ..., Xn)``."""

    parts: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.parts)

    def count_exceeding(self, kappa: int) -> int:
        return sum(1 for part in self.parts if part > kappa)

    def satisfies(self, spec: ProblemSpec) -> bool:
        if len(self.parts) != spec.boxes or self.total != spec.balls:
            return False
        upper = spec.effective_upper
        return all(spec.lower <= part <= upper for part in self.parts)

    def __str__(self) -> str:
        return " ".join(str(part) for part in self.parts)


@dataclass(frozen=True)
class Mismatch:
    spec: ProblemSpec
    closed_form_value: int
    oracle_value: int
    oracle: str

    def as_dict(self) -> Dict[str, object]:
        return {
            "spec": self.spec.as_dict(),
            "closed_form": str(self.closed_form_value),
            "oracle": self.oracle,
            "oracle_value": str(self.oracle_value),
        }


@dataclass(frozen=True)
class VerificationReport:
    specs_checked: int
    mismatches: Tuple[Mismatch, ...]
    elapsed: float
    labels: Dict[str, int] = field(default_factory=dict)
    infeasible: int = 0
    mismatched_specs: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _check_table_size(spec: ProblemSpec, limit: Optional[int]) -> None:
    ceiling = get_dp_cell_limit() if limit is None else limit
    cells = spec.boxes * (spec.balls + 1)
    if cells > ceiling:
        logger.warning("oracle table for %s needs %d cells (limit %d)", spec, cells, ceiling)
        raise ResourceLimitError(
            f"oracle table for {spec} needs {cells} cells, limit is {ceiling}",
            cells=cells,
            limit=ceiling,
        )


def oracle_count_dp(spec: ProblemSpec, *, cell_limit: Optional[int] = None) -> int:
    """Count compositions with ``f(i, r) = sum_{j=k1}^{min(k2, r)} f(i-1, r-j)``."""

    _check_table_size(spec, cell_limit)
    m, lo, hi = spec.balls, spec.lower, spec.effective_upper
    row: List[int] = [1] + [0] * m
    for _ in range(spec.boxes):
        # prefix[r] = row[0] + ... + row[r-1]
        prefix = [0, *itertools.accumulate(row)]
        nxt = [0] * (m + 1)
        for r in range(m + 1):
            if r < lo:
                continue
            top = r - lo
            bottom = max(0, r - hi)
            nxt[r] = prefix[top + 1] - prefix[bottom]
        row = nxt
    return row[m]


def _poly_mul(left: Sequence[int], right: Sequence[int], degree_cap: int) -> List[int]:
    out = [0] * min(len(left) + len(right) - 1, degree_cap + 1)
    for i, a in enumerate(left):
        if not a or i > degree_cap:
            continue
        for j, b in enumerate(right):
            if i + j > degree_cap:
                break
            if b:
                out[i + j] += a * b
    return out


def oracle_count_polynomial(spec: ProblemSpec, *, cell_limit: Optional[int] = None) -> int:
    """Coefficient of ``x^m`` in ``(x^k1 + ... + x^k2)^n`` with degrees capped at ``m``."""

    _check_table_size(spec, cell_limit)
    m = spec.balls
    if spec.lower > m:
        return 0
    hi = min(spec.effective_upper, m)
    factor = [0] * spec.lower + [1] * (hi - spec.lower + 1)
    product = [1]
    for _ in range(spec.boxes):
        product = _poly_mul(product, factor, m)
    return product[m] if m < len(product) else 0


def enumerate_compositions(
    spec: ProblemSpec, limit: Optional[int] = None
) -> Iterator[Composition]:
    """Yield every valid composition in increasing lexicographic order."""

    if limit is not None and limit <= 0:
        return
    n, lo, hi = spec.boxes, spec.lower, spec.effective_upper
    parts: List[int] = []
    emitted = 0

    def walk(remaining: int, boxes_left: int) -> Iterator[Composition]:
        if boxes_left == 1:
            if lo <= remaining <= hi:
                yield Composition(tuple(parts) + (remaining,))
            return
        rest = boxes_left - 1
        # the other boxes must be able to absorb what this one leaves behind
        first = max(lo, remaining - hi * rest)
        last = min(hi, remaining - lo * rest)
        for value in range(first, last + 1):
            parts.append(value)
            yield from walk(remaining - value, rest)
            parts.pop()

    for composition in walk(spec.balls, n):
        yield composition
        emitted += 1
        if limit is not None and emitted >= limit:
            return


def check_lemma23(spec: ProblemSpec, kappa: int) -> bool:
    """True iff no composition of ``spec`` has more than ``floor(m/(kappa+1))`` parts above ``kappa``."""

    if kappa < 0:
        raise InvalidSpecError(f"kappa must be >= 0, got {kappa}")
    bound = max_violating_boxes(spec.balls, kappa)
    return all(c.count_exceeding(kappa) <= bound for c in enumerate_compositions(spec))


def _randbelow(rng: random.Random, bound: int) -> int:
    bits = bound.bit_length()
    value = rng.getrandbits(bits)
    while value >= bound:
        value = rng.getrandbits(bits)
    return value


def uniform_sample(spec: ProblemSpec, seed: int, draws: int) -> List[Composition]:
    """Draw ``draws`` compositions uniformly using exact conditional counts."""

    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < SEED_LIMIT:
        raise InvalidSpecError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if draws < 0:
        raise InvalidSpecError(f"draws must be >= 0, got {draws}")

    completions: Dict[Tuple[int, int], int] = {}

    def ways(balls: int, boxes: int) -> int:
        if boxes == 0:
            return 1 if balls == 0 else 0
        key = (balls, boxes)
        if key not in completions:
            completions[key] = count(ProblemSpec(balls, boxes, spec.lower, spec.upper)).count
        return completions[key]

    total = ways(spec.balls, spec.boxes)
    if total == 0:
        raise InfeasibleSpecError(f"no composition satisfies {spec}")

    rng = random.Random(seed)
    hi = spec.effective_upper
    samples: List[Composition] = []
    for _ in range(draws):
        remaining = spec.balls
        parts: List[int] = []
        for position in range(spec.boxes):
            boxes_left = spec.boxes - position
            pick = _randbelow(rng, ways(remaining, boxes_left))
            for value in range(spec.lower, min(hi, remaining) + 1):
                weight = ways(remaining - value, boxes_left - 1)
                if pick < weight:
                    break
                pick -= weight
            parts.append(value)
            remaining -= value
        samples.append(Composition(tuple(parts)))
    return samples


def closed_form_count(spec: ProblemSpec) -> int:
    return count(spec).count


def grid_specs(max_m: int, max_n: int, max_k: int) -> Iterator[ProblemSpec]:
    """Every spec with m <= max_m, 1 <= n <= max_n, k1 <= k2 <= max_k, plus unbounded k2."""

    for m in range(max_m + 1):
        for n in range(1, max_n + 1):
            for k1 in range(max_k + 1):
                for k2 in range(k1, max_k + 1):
                    yield ProblemSpec(m, n, k1, k2)
                yield ProblemSpec(m, n, k1, None)


def _check_spec(
    spec: ProblemSpec,
    closed_form: Callable[[ProblemSpec], int],
    metrics: GridMetrics,
    check_lemmas: bool,
) -> List[Mismatch]:
    found: List[Mismatch] = []
    label = classify(spec)
    expected = closed_form(spec)
    dp_value = oracle_count_dp(spec)
    poly_value = oracle_count_polynomial(spec)
    if expected != dp_value:
        found.append(Mismatch(spec, expected, dp_value, "dp"))
    if expected != poly_value:
        found.append(Mismatch(spec, expected, poly_value, "polynomial"))
    if label.infeasible and (dp_value or poly_value):
        found.append(Mismatch(spec, 0, max(dp_value, poly_value), "infeasible-label"))
    if check_lemmas and not label.infeasible:
        for kappa in range(min(spec.effective_upper, spec.balls) + 1):
            if not check_lemma23(spec, kappa):
                found.append(Mismatch(spec, max_violating_boxes(spec.balls, kappa), -1, "lemma23"))
    metrics.record(label.label, infeasible=label.infeasible, mismatch=bool(found))
    return found


def verify_grid(
    max_m: int,
    max_n: int,
    max_k: int,
    *,
    jobs: int = 1,
    check_lemmas: bool = False,
    closed_form: Optional[Callable[[ProblemSpec], int]] = None,
) -> VerificationReport:
    """Compare the closed form with both oracles on every grid spec."""

    if min(max_m, max_k) < 0 or max_n < 1:
        raise InvalidSpecError("grid bounds need max_m >= 0, max_n >= 1 and max_k >= 0")
    evaluate = closed_form or closed_form_count
    metrics = GridMetrics()
    started = time.perf_counter()
    specs = list(grid_specs(max_m, max_n, max_k))
    logger.info("verify grid: %d specs, jobs=%d", len(specs), jobs)

    def run(spec: ProblemSpec) -> List[Mismatch]:
        return _check_spec(spec, evaluate, metrics, check_lemmas)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, specs))
    else:
        results = [run(spec) for spec in specs]

    mismatches = tuple(item for batch in results for item in batch)
    elapsed = time.perf_counter() - started
    for mismatch in mismatches:
        logger.warning(
            "mismatch %s: closed form %s, %s %s",
            mismatch.spec,
            mismatch.closed_form_value,
            mismatch.oracle,
            mismatch.oracle_value,
        )
    snapshot = metrics.snapshot()
    logger.info(
        "verify grid done",
        extra={"specs_checked": snapshot["specs_checked"], "mismatches": len(mismatches)},
    )
    return VerificationReport(
        specs_checked=len(specs),
        mismatches=mismatches,
        elapsed=elapsed,
        labels=dict(snapshot["labels"]),  # type: ignore[arg-type]
        infeasible=int(snapshot["infeasible"]),  # type: ignore[call-overload]
        mismatched_specs=int(snapshot["mismatches"]),  # type: ignore[call-overload]
    )
