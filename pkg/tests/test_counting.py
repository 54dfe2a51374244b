from __future__ import annotations

import json
import time
from typing import Callable

import pytest

from conftest import grid

from capacity_urns.core.arithmetic import binomial
from capacity_urns.core.counting import (
    CaseLabel,
    ProblemSpec,
    ShiftedProblem,
    classify,
    count,
    count_by_cases,
    count_lower_only,
    count_partial_derivatives,
    count_upper_only,
    count_upper_single_violation,
    inclusion_exclusion_terms,
    lower_bound_feasible,
    max_violating_boxes,
    shift,
    stars_and_bars,
    stars_and_bars_nonempty,
    upper_bound_feasible,
)
from capacity_urns.core.errors import InfeasibleSpecError, InvalidSpecError, OutOfBandError
from capacity_urns.oracle import oracle_count_dp


@pytest.mark.parametrize(("m", "n", "expected"), [(5, 3, 6), (3, 3, 1), (2, 3, 0)])
def test_stars_and_bars_nonempty(m: int, n: int, expected: int, brute: Callable) -> None:
    assert stars_and_bars_nonempty(m, n) == expected
    assert brute(ProblemSpec(m, n, 1, None)) == expected


@pytest.mark.parametrize(("m", "n", "expected"), [(3, 2, 4), (0, 5, 1), (5, 1, 1)])
def test_stars_and_bars(m: int, n: int, expected: int, brute: Callable) -> None:
    assert stars_and_bars(m, n) == expected
    assert brute(ProblemSpec(m, n, 0, None)) == expected


@pytest.mark.parametrize(("m", "n", "k1", "expected"), [(5, 3, 2, False), (6, 3, 2, True), (0, 4, 0, True)])
def test_lower_bound_feasible(m: int, n: int, k1: int, expected: bool) -> None:
    assert lower_bound_feasible(m, n, k1) is expected


@pytest.mark.parametrize(("m", "n", "k2", "expected"), [(7, 3, 2, False), (6, 3, 2, True), (0, 3, 0, True)])
def test_upper_bound_feasible(m: int, n: int, k2: int, expected: bool) -> None:
    assert upper_bound_feasible(m, n, k2) is expected


def test_count_lower_only_examples(brute: Callable) -> None:
    assert count_lower_only(7, 3, 2) == 3 == brute(ProblemSpec(7, 3, 2, None))
    assert count_lower_only(6, 3, 2) == 1
    for m in range(10):
        for n in range(1, 5):
            assert count_lower_only(m, n, 0) == stars_and_bars(m, n)


def test_count_lower_only_rejects_infeasible_bound() -> None:
    with pytest.raises(InfeasibleSpecError):
        count_lower_only(5, 3, 2)


@pytest.mark.parametrize(("m", "kappa", "expected"), [(10, 3, 2), (5, 2, 1), (3, 5, 0)])
def test_max_violating_boxes(m: int, kappa: int, expected: int) -> None:
    assert max_violating_boxes(m, kappa) == expected


@pytest.mark.parametrize(("m", "n", "k2", "expected"), [(5, 3, 3, 12), (5, 3, 4, 18), (4, 2, 2, 1)])
def test_count_upper_single_violation(m: int, n: int, k2: int, expected: int, brute: Callable) -> None:
    assert count_upper_single_violation(m, n, k2) == expected
    assert brute(ProblemSpec(m, n, 0, k2)) == expected


@pytest.mark.parametrize(("m", "n", "k2"), [(5, 3, 1), (5, 3, 5), (5, 1, 3)])
def test_count_upper_single_violation_out_of_band(m: int, n: int, k2: int) -> None:
    with pytest.raises(OutOfBandError):
        count_upper_single_violation(m, n, k2)


def test_count_upper_only_examples() -> None:
    report = count_upper_only(5, 3, 2)
    assert report.count == 3
    assert [t.term_value for t in report.terms] == [18]

    exact_fill = count_upper_only(6, 3, 2)
    assert exact_fill.count == 1
    assert [t.term_value for t in exact_fill.terms] == [30, -3]

    infeasible = count_upper_only(7, 3, 2)
    assert infeasible.count == 0
    assert infeasible.label is CaseLabel.INFEASIBLE_UPPER
    assert infeasible.terms == ()

    loose = count_upper_only(5, 3, 5)
    assert loose.count == 21
    assert loose.terms == ()


@pytest.mark.parametrize(
    ("spec", "expected"),
    [
        (ProblemSpec(7, 3, 1, 3), ShiftedProblem(4, 3, 2)),
        (ProblemSpec(6, 3, 2, 2), ShiftedProblem(0, 3, 0)),
        (ProblemSpec(5, 2, 0, 4), ShiftedProblem(5, 2, 4)),
        (ProblemSpec(9, 3, 2, None), ShiftedProblem(3, 3, None)),
    ],
)
def test_shift(spec: ProblemSpec, expected: ShiftedProblem) -> None:
    shifted = shift(spec)
    assert shifted == expected
    assert shifted.residual_lower == 0


def test_shift_rejects_infeasible_lower_bound() -> None:
    with pytest.raises(InfeasibleSpecError):
        shift(ProblemSpec(5, 3, 2, 4))


def test_shifted_problem_rejects_negative_residual() -> None:
    with pytest.raises(InfeasibleSpecError):
        ShiftedProblem(-1, 3, None)


@pytest.mark.parametrize(
    ("spec", "expected", "label"),
    [
        (ProblemSpec(7, 3, 1, 3), 6, CaseLabel.DOUBLE_BOUND_SHIFTED),
        (ProblemSpec(5, 3, 2, 4), 0, CaseLabel.INFEASIBLE_LOWER),
        (ProblemSpec(0, 4, 0, None), 1, CaseLabel.FEWER_BALLS_THAN_BOXES),
        (ProblemSpec(2, 5, 0, 1), 10, CaseLabel.FEWER_BALLS_THAN_BOXES),
        (ProblemSpec(7, 3, 0, 2), 0, CaseLabel.INFEASIBLE_UPPER),
        (ProblemSpec(5, 3, 0, None), 21, CaseLabel.UNRESTRICTED_BASELINE),
        (ProblemSpec(5, 3, 1, None), 6, CaseLabel.NO_EMPTY_BASELINE),
        (ProblemSpec(7, 3, 2, None), 3, CaseLabel.LOWER_ONLY),
        (ProblemSpec(6, 3, 0, 2), 1, CaseLabel.UPPER_ONLY_INCLUSION_EXCLUSION),
    ],
)
def test_count_examples(spec: ProblemSpec, expected: int, label: CaseLabel, brute: Callable) -> None:
    report = count(spec)
    assert report.count == expected
    assert report.label is label
    assert brute(spec) == expected


def test_count_report_records_shift_and_terms() -> None:
    report = count(ProblemSpec(7, 3, 1, 3))
    assert report.shifted == ShiftedProblem(4, 3, 2)
    assert [(t.alpha, t.sign, t.choose_boxes, t.remaining_count) for t in report.terms] == [(1, 1, 3, 3)]
    assert report.count == stars_and_bars(4, 3) - sum(t.term_value for t in report.terms)


@pytest.mark.parametrize(
    ("spec", "label", "section"),
    [
        (ProblemSpec(5, 3, 0, 3), CaseLabel.UPPER_ONLY_SINGLE_VIOLATION, "§2.2.1"),
        (ProblemSpec(7, 3, 1, 3), CaseLabel.DOUBLE_BOUND_SHIFTED, "§2.3"),
        (ProblemSpec(7, 3, 0, 2), CaseLabel.INFEASIBLE_UPPER, "§2.2.2 (Lemma 2.2)"),
        (ProblemSpec(5, 3, 2, None), CaseLabel.INFEASIBLE_LOWER, "§2.1.3 (Lemma 2.1)"),
        (ProblemSpec(9, 3, 2, None), CaseLabel.LOWER_ONLY, "§2.1.4"),
        (ProblemSpec(10, 4, 0, 3), CaseLabel.UPPER_ONLY_INCLUSION_EXCLUSION, "§2.2.3"),
        (ProblemSpec(7, 3, 1, 6), CaseLabel.NO_EMPTY_BASELINE, "§2.1.1"),
        (ProblemSpec(9, 3, 2, 8), CaseLabel.LOWER_ONLY, "§2.1.4"),
        (ProblemSpec(4, 2, 0, 4), CaseLabel.UNRESTRICTED_BASELINE, "§2.1.2"),
    ],
)
def test_classify_examples(spec: ProblemSpec, label: CaseLabel, section: str) -> None:
    assert classify(spec) is label
    assert label.section == section
    assert CaseLabel.from_label(label.label) is label


@pytest.mark.parametrize(
    "kwargs",
    [
        {"balls": 3, "boxes": 0},
        {"balls": -1, "boxes": 2},
        {"balls": 3, "boxes": 2, "lower": -1},
        {"balls": 3, "boxes": 2, "lower": 3, "upper": 2},
        {"balls": 3, "boxes": True},
        {"balls": 2.0, "boxes": 2},
    ],
)
def test_problem_spec_rejects_malformed_input(kwargs: dict) -> None:
    with pytest.raises(InvalidSpecError):
        ProblemSpec(**kwargs)


def test_single_box_and_empty_edge_cases() -> None:
    for m in range(8):
        for k1 in range(8):
            for k2 in range(k1, 8):
                assert count(ProblemSpec(m, 1, k1, k2)).count == (1 if k1 <= m <= k2 else 0)
    for n in range(1, 6):
        for k1 in range(4):
            assert count(ProblemSpec(0, n, k1, None)).count == (1 if k1 == 0 else 0)


def test_count_matches_dp_oracle_on_grid(acceptance_grid) -> None:
    for spec in acceptance_grid:
        assert count(spec).count == oracle_count_dp(spec), spec


def test_case_formulas_agree_with_unified_count(acceptance_grid) -> None:
    for spec in acceptance_grid:
        assert count_by_cases(spec) == count(spec).count, spec


def test_shift_preserves_count(acceptance_grid) -> None:
    for spec in acceptance_grid:
        if not lower_bound_feasible(spec.balls, spec.boxes, spec.lower):
            continue
        upper = None if spec.upper is None else spec.upper - spec.lower
        residual = ProblemSpec(spec.balls - spec.boxes * spec.lower, spec.boxes, 0, upper)
        assert count(spec).count == count(residual).count, spec


def test_complement_symmetry(acceptance_grid) -> None:
    for spec in acceptance_grid:
        if spec.upper is None or spec.boxes * spec.upper < spec.balls:
            continue
        mirrored = ProblemSpec(spec.boxes * spec.upper - spec.balls, spec.boxes, 0, spec.upper - spec.lower)
        assert count(spec).count == count(mirrored).count, spec


def test_normalization_over_all_ball_counts() -> None:
    for n in range(1, 6):
        for k1 in range(7):
            for k2 in range(k1, 7):
                total = sum(count(ProblemSpec(m, n, k1, k2)).count for m in range(n * k2 + 1))
                assert total == (k2 - k1 + 1) ** n


def test_band_agreement_between_single_violation_and_full_sum() -> None:
    for m in range(31):
        for n in range(2, 7):
            for k2 in range(m // 2, m):
                assert count_upper_single_violation(m, n, k2) == count_upper_only(m, n, k2).count


def test_truncation_does_not_change_the_sum() -> None:
    for m in range(25):
        for n in range(1, 8):
            for kappa in range(m + 1):
                truncated = inclusion_exclusion_terms(m, n, kappa)
                extended = inclusion_exclusion_terms(
                    m, n, kappa, limit=max(n, max_violating_boxes(m, kappa))
                )
                assert sum(t.term_value for t in truncated) == sum(t.term_value for t in extended)


def test_term_invariants() -> None:
    for m in range(20):
        for n in range(1, 7):
            for kappa in range(m + 1):
                for term in inclusion_exclusion_terms(m, n, kappa):
                    assert term.alpha <= max_violating_boxes(m, kappa)
                    assert term.sign == (1 if term.alpha % 2 else -1)
                    assert term.term_value == term.sign * term.choose_boxes * term.remaining_count


def test_monotonicity_in_bounds() -> None:
    for m in range(13):
        for n in range(1, 6):
            for k1 in range(8):
                for k2 in range(k1, 8):
                    current = count(ProblemSpec(m, n, k1, k2)).count
                    if k1 + 1 <= k2:
                        assert count(ProblemSpec(m, n, k1 + 1, k2)).count <= current
                    assert count(ProblemSpec(m, n, k1, k2 + 1)).count >= current


def test_baselines() -> None:
    for m in range(31):
        for n in range(1, 9):
            assert count(ProblemSpec(m, n, 1, None)).count == binomial(m - 1, n - 1)
            assert count(ProblemSpec(m, n, 0, None)).count == binomial(m + n - 1, n - 1)


def test_classifier_is_total_and_infeasible_means_zero() -> None:
    for spec in grid(12, 6, 12):
        label = classify(spec)
        assert isinstance(label, CaseLabel)
        assert label.infeasible == (oracle_count_dp(spec) == 0), spec


def test_large_spec_is_fast_and_consistent() -> None:
    started = time.perf_counter()
    report = count(ProblemSpec(1000, 50, 3, 40))
    assert time.perf_counter() - started < 1.0
    assert report.count > 2**64
    mirrored = count(ProblemSpec(50 * 40 - 1000, 50, 0, 37))
    assert mirrored.count == report.count
    decoded = json.loads(json.dumps(report.as_dict()))
    assert int(decoded["count"]) == report.count


def test_count_partial_derivatives() -> None:
    # f(x, y, z) has xx, yy, zz, xy, xz, yz as second-order partials
    assert count_partial_derivatives(3, 2) == 6
    assert count_partial_derivatives(1, 7) == 1
    assert count_partial_derivatives(4, 0) == 1


def test_non_binding_upper_bound_uses_baseline_label(brute: Callable) -> None:
    for spec, expected in [(ProblemSpec(7, 3, 1, 6), 15), (ProblemSpec(9, 3, 2, 8), 10)]:
        report = count(spec)
        assert report.label is not CaseLabel.DOUBLE_BOUND_SHIFTED
        assert report.terms == ()
        assert report.count == expected == brute(spec)


def test_double_bound_label_only_when_upper_bound_binds() -> None:
    for spec in grid(12, 6, 12, unbounded=False):
        if classify(spec) is CaseLabel.DOUBLE_BOUND_SHIFTED:
            shifted = shift(spec)
            assert spec.lower >= 1
            assert shifted.residual_upper < shifted.residual_balls, spec
