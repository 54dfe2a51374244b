# -*- coding: utf-8 -*-
"""Command-line front end for counting, probabilities, enumeration and verification."""

from __future__ import annotations

import argparse
import json
import logging
import re
from typing import Any, Dict, Iterable, List, Optional, Sequence

from . import oracle
from .config import Config, get_default_jobs, resolve_log_level
from .core import counting
from .core.counting import CaseLabel, ProblemSpec
from .core.errors import CapacityUrnsError
from .probability import prob_all_boxes_within, prob_at_least_one_exceeds
from .support import setup_logging

SCHEMA_VERSION = "1"
FORMATS = ("plain", "json", "tsv")
EXIT_USAGE = 2
EXIT_MISMATCH = 3
_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")

logger = logging.getLogger("capacity_urns.cli")


class CommandError(RuntimeError):
    pass


class VerificationFailed(RuntimeError):
    pass


def _echo(message: str) -> None:
    print(message)


def _natural(value: str) -> int:
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got '{value}'") from exc
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got '{value}'")
    return number


def _positive(value: str) -> int:
    number = _natural(value)
    if number == 0:
        raise argparse.ArgumentTypeError("expected a positive integer, got '0'")
    return number


def _int_range(value: str) -> range:
    match = _RANGE_RE.match(value)
    if not match:
        raise argparse.ArgumentTypeError(f"expected a range like 0..6, got '{value}'")
    start, stop = int(match.group(1)), int(match.group(2))
    if stop < start:
        raise argparse.ArgumentTypeError(f"empty range '{value}'")
    return range(start, stop + 1)


def _upper_text(upper: Optional[int]) -> str:
    return "unbounded" if upper is None else str(upper)


def _spec_from_args(args: argparse.Namespace) -> ProblemSpec:
    return ProblemSpec(args.m, args.n, args.min, args.max)


def _tsv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = ["\t".join(header)]
    lines.extend("\t".join(str(cell) for cell in row) for row in rows)
    return "\n".join(lines)


def _emit(
    args: argparse.Namespace,
    *,
    inputs: Dict[str, Any],
    result: Dict[str, Any],
    case: Optional[CaseLabel],
    plain: List[str],
    header: Sequence[str],
    rows: List[Sequence[Any]],
) -> None:
    if args.format == "json":
        envelope = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "inputs": inputs,
            "result": result,
            "case": case.section if case is not None else None,
        }
        _echo(json.dumps(envelope, indent=2, ensure_ascii=False))
    elif args.format == "tsv":
        _echo(_tsv(header, rows))
    else:
        for line in plain:
            _echo(line)


def command_count(args: argparse.Namespace) -> None:
    spec = _spec_from_args(args)
    report = counting.count(spec)
    plain = [f"count: {report.count}", f"case: {report.label}"]
    if args.verbose:
        if report.shifted is not None:
            shifted = report.shifted
            plain.append(
                f"shift: m*={shifted.residual_balls} k1*={shifted.residual_lower} "
                f"k2*={_upper_text(shifted.residual_upper)}"
            )
        if report.terms:
            plain.append(
                _tsv(
                    ("alpha", "sign", "C(n,alpha)", "C(m*-alpha(k2*+1)+n-1,n-1)", "term"),
                    (
                        (t.alpha, "+" if t.sign > 0 else "-", t.choose_boxes, t.remaining_count, t.term_value)
                        for t in report.terms
                    ),
                )
            )
    _emit(
        args,
        inputs=spec.as_dict(),
        result=report.as_dict(),
        case=report.label,
        plain=plain,
        header=("m", "n", "k1", "k2", "count", "label", "case"),
        rows=[(spec.balls, spec.boxes, spec.lower, _upper_text(spec.upper), report.count, report.label.label, report.label.section)],
    )


def command_classify(args: argparse.Namespace) -> None:
    spec = _spec_from_args(args)
    label = counting.classify(spec)
    _emit(
        args,
        inputs=spec.as_dict(),
        result={"label": label.label, "section": label.section, "infeasible": label.infeasible},
        case=label,
        plain=[f"case: {label}"],
        header=("m", "n", "k1", "k2", "label", "case"),
        rows=[(spec.balls, spec.boxes, spec.lower, _upper_text(spec.upper), label.label, label.section)],
    )


def command_prob(args: argparse.Namespace) -> None:
    within = prob_all_boxes_within(args.m, args.n, args.kappa)
    exceeds = prob_at_least_one_exceeds(args.m, args.n, args.kappa)
    shown = exceeds if args.complement else within
    case = counting.classify(ProblemSpec(args.m, args.n, 0, args.kappa))
    _emit(
        args,
        inputs={"m": args.m, "n": args.n, "kappa": args.kappa, "complement": args.complement},
        result={"within": within.as_dict(), "exceeds": exceeds.as_dict()},
        case=case,
        plain=[shown.render()],
        header=("m", "n", "kappa", "event", "value", "numerator", "denominator", "decimal"),
        rows=[
            (args.m, args.n, args.kappa, event, f"{r.value.numerator}/{r.value.denominator}",
             r.numerator_count, r.denominator_count, f"{r.decimal_approx:.6f}")
            for event, r in (("within", within), ("exceeds", exceeds))
        ],
    )


def command_enumerate(args: argparse.Namespace) -> None:
    spec = _spec_from_args(args)
    total = 0
    for composition in oracle.enumerate_compositions(spec, args.limit):
        _echo(str(composition))
        total += 1
    _echo(f"total {total}")


def command_sample(args: argparse.Namespace) -> None:
    spec = _spec_from_args(args)
    for composition in oracle.uniform_sample(spec, args.seed, args.draws):
        _echo(str(composition))


def command_table(args: argparse.Namespace) -> None:
    if args.n_range.start < 1:
        raise CommandError("--n-range must start at 1 or above")
    rows: List[Sequence[Any]] = []
    records: List[Dict[str, Any]] = []
    for m in args.m_range:
        for n in args.n_range:
            spec = ProblemSpec(m, n, args.min, args.max)
            report = counting.count(spec)
            rows.append((m, n, spec.lower, _upper_text(spec.upper), report.count, report.label.section))
            records.append({**spec.as_dict(), "count": str(report.count), "label": report.label.label, "case": report.label.section})
    header = ("m", "n", "k1", "k2", "count", "case")
    _emit(
        args,
        inputs={
            "m_range": [args.m_range.start, args.m_range.stop - 1],
            "n_range": [args.n_range.start, args.n_range.stop - 1],
            "k1": args.min,
            "k2": args.max,
        },
        result={"rows": records},
        case=None,
        plain=[" ".join(header)] + [" ".join(str(cell) for cell in row) for row in rows],
        header=header,
        rows=rows,
    )


def command_verify(args: argparse.Namespace) -> None:
    report = oracle.verify_grid(
        args.max_m,
        args.max_n,
        args.max_k,
        jobs=args.jobs,
        check_lemmas=args.check_lemmas,
    )
    logger.info("verify finished in %.3fs", report.elapsed)
    plain = [
        f"specs checked: {report.specs_checked}",
        f"infeasible specs: {report.infeasible}",
        f"{len(report.mismatches)} mismatches",
        f"specs with mismatches: {report.mismatched_specs}",
    ]
    plain.extend(
        f"mismatch {m.spec}: closed form {m.closed_form_value}, {m.oracle} {m.oracle_value}"
        for m in report.mismatches
    )
    plain.extend(f"label {name} {tally}" for name, tally in sorted(report.labels.items()))
    _emit(
        args,
        inputs={"max_m": args.max_m, "max_n": args.max_n, "max_k": args.max_k, "check_lemmas": args.check_lemmas},
        result={
            "specs_checked": report.specs_checked,
            "infeasible": report.infeasible,
            "mismatched_specs": report.mismatched_specs,
            "mismatches": [m.as_dict() for m in report.mismatches],
            "labels": dict(sorted(report.labels.items())),
        },
        case=None,
        plain=plain,
        header=("m", "n", "k1", "k2", "closed_form", "oracle", "oracle_value"),
        rows=[
            (m.spec.balls, m.spec.boxes, m.spec.lower, _upper_text(m.spec.upper), m.closed_form_value, m.oracle, m.oracle_value)
            for m in report.mismatches
        ],
    )
    if not report.ok:
        raise VerificationFailed(f"{len(report.mismatches)} mismatches between closed form and oracles")


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("m", type=_natural, help="Number of balls")
    parser.add_argument("n", type=_natural, help="Number of boxes")
    parser.add_argument("--min", type=_natural, default=0, help="Lower occupancy bound k1 (default 0)")
    parser.add_argument("--max", type=_natural, default=None, help="Upper occupancy bound k2 (default unbounded)")


def _add_format_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="plain", help="Output format (default plain)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capacity-urns",
        description="Exact counts for distributing identical balls into distinct boxes with occupancy bounds",
    )
    parser.add_argument("--log-level", default=None, help=f"Logging level (default {Config.LOG_LEVEL})")
    parser.add_argument("--log-json", action="store_true", help="Emit structured JSON log lines on stderr")
    parser.add_argument("--log-file", action="store_true", help=f"Also log to {Config.log_file()}")
    sub = parser.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", help="Count valid distributions")
    _add_spec_arguments(count)
    _add_format_argument(count)
    count.add_argument("--verbose", action="store_true", help="Show the shift and inclusion-exclusion terms")
    count.set_defaults(func=command_count)

    classify = sub.add_parser("classify", help="Report which parameter region a spec falls in")
    _add_spec_arguments(classify)
    _add_format_argument(classify)
    classify.set_defaults(func=command_classify)

    prob = sub.add_parser("prob", help="Probability that every box holds at most kappa balls")
    prob.add_argument("m", type=_natural, help="Number of balls")
    prob.add_argument("n", type=_natural, help="Number of boxes")
    prob.add_argument("--kappa", type=_natural, required=True, help="Per-box cap")
    prob.add_argument("--complement", action="store_true", help="Show the probability that some box exceeds kappa")
    _add_format_argument(prob)
    prob.set_defaults(func=command_prob)

    enumerate_ = sub.add_parser("enumerate", help="List valid distributions in lexicographic order")
    _add_spec_arguments(enumerate_)
    enumerate_.add_argument("--limit", type=_natural, default=None, help="Stop after this many distributions")
    enumerate_.set_defaults(func=command_enumerate)

    sample = sub.add_parser("sample", help="Draw uniformly random distributions")
    _add_spec_arguments(sample)
    sample.add_argument("--draws", type=_natural, default=1)
    sample.add_argument("--seed", type=_natural, default=0, help="Unsigned 64-bit seed")
    sample.set_defaults(func=command_sample)

    table = sub.add_parser("table", help="Tabulate counts over ranges of m and n")
    table.add_argument("--m-range", type=_int_range, required=True, help="Inclusive range a..b")
    table.add_argument("--n-range", type=_int_range, required=True, help="Inclusive range c..d")
    table.add_argument("--min", type=_natural, default=0)
    table.add_argument("--max", type=_natural, default=None)
    _add_format_argument(table)
    table.set_defaults(func=command_table)

    verify = sub.add_parser("verify", help="Check closed forms against both oracles on a grid")
    verify.add_argument("--max-m", type=_natural, default=12)
    verify.add_argument("--max-n", type=_positive, default=6)
    verify.add_argument("--max-k", type=_natural, default=12)
    verify.add_argument("--jobs", type=_positive, default=None, help="Worker threads (default CAPACITY_URNS_JOBS or physical cores)")
    verify.add_argument("--check-lemmas", action="store_true", help="Also enumerate to assert the violating-box bound")
    _add_format_argument(verify)
    verify.set_defaults(func=command_verify)

    return parser


def main(argv: Optional[Iterable[str]] = None) -> None:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    setup_logging(
        resolve_log_level(args.log_level),
        json_format=args.log_json,
        log_file=Config.log_file() if args.log_file else None,
    )
    if getattr(args, "jobs", 0) is None:
        args.jobs = get_default_jobs()
    try:
        args.func(args)
    except VerificationFailed as exc:
        parser.exit(EXIT_MISMATCH, f"error: {exc}\n")
    except (CommandError, CapacityUrnsError) as exc:
        parser.exit(EXIT_USAGE, f"error: {exc}\n")


if __name__ == "__main__":
    main()
