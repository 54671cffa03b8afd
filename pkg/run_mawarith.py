#!/usr/bin/env python3
"""
Mawarith: solve, repair and score Islamic inheritance cases.

Usage:
    python run_mawarith.py parse "مات وترك: زوجة و ابن."
    python run_mawarith.py solve questions.jsonl -o solved.jsonl
    python run_mawarith.py postprocess predictions.jsonl -o repaired.jsonl --variant basic
    python run_mawarith.py eval gold.jsonl predictions.jsonl --variant all --results results.jsonl
    python run_mawarith.py report results.jsonl --figures-dir figures/

Exit status: 0 success, 1 some cases failed, 2 bad invocation or input file.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

_ROOT = Path(__file__).resolve().parent
if str(_ROOT) not in sys.path:
    sys.path.insert(0, str(_ROOT))

from core.analysis import aggregate, aggregate_frame, failed_case, results_frame, score_case
from core.batch import BatchRunner
from core.case_parser import parse_case
from core.config import Settings, load_env_file
from core.errors import DatasetFormatError, ExtractionError, MawarithError
from core.postprocessor import VALID_VARIANTS, normalize_variant, repair
from core.rule_tables import load_rulebook
from core.solver import FiqhSolver, determine_blocking
from tools.dataset_io import load_dataset, load_predictions, pair_cases, read_jsonl, write_jsonl
from tools.plots import write_figures
from tools.tables import render_report

logger = logging.getLogger("mawarith")

EXIT_OK = 0
EXIT_CASE_FAILURES = 1
EXIT_USAGE = 2

PRIMARY_VARIANT = "basic"


def _exit_status(results) -> int:
    failed = [r for r in results if not r.success]
    if failed:
        print(f"{len(failed)} of {len(results)} cases failed", file=sys.stderr)
        return EXIT_CASE_FAILURES
    return EXIT_OK


def _log_path(output: Path) -> Path:
    return output.with_name(f"{output.stem}.log.jsonl")


def _write_text(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"Wrote {path}")


def cmd_parse(args, settings: Settings) -> int:
    rulebook = load_rulebook(settings.rules_dir)
    if args.input:
        questions = [(e.case_id, e.question) for e in load_dataset(args.input, settings.field_map)]
    elif args.question:
        questions = [("-", args.question)]
    else:
        raise ValueError("Give a question or --input")

    status = EXIT_OK
    for case_id, question in questions:
        try:
            scenario = parse_case(question, rulebook.taxonomy)
        except MawarithError as e:
            print(f"[{case_id}] Error: {e}", file=sys.stderr)
            status = EXIT_CASE_FAILURES
            continue
        print(f"[{case_id}]")
        print(scenario.summary())
        if args.explain:
            outcome = determine_blocking(scenario, rulebook)
            for line in outcome.trace or ["nothing blocked"]:
                print(f"  {line}")
    return status


def cmd_solve(args, settings: Settings) -> int:
    rulebook = load_rulebook(settings.rules_dir)
    solver = FiqhSolver(rulebook, settings.solver_config)
    fields = settings.field_map
    entries = load_dataset(args.input, fields)

    def solve(question: str):
        return solver.solve(parse_case(question, rulebook.taxonomy))

    results = BatchRunner(settings.workers).run([(e.case_id, e.question) for e in entries], solve)
    rows = []
    for entry, result in zip(entries, results):
        if not result.success:
            continue
        row = {
            fields["case_id"]: entry.case_id,
            fields["question"]: entry.question,
            fields["gold"]: result.value.record.to_json(),
        }
        if args.explain:
            row["trace"] = result.value.trace
            print(f"[{entry.case_id}]\n{result.value.summary()}")
        rows.append(row)
    write_jsonl(args.output, rows)
    print(f"Solved {len(rows)} of {len(entries)} cases -> {args.output}")
    return _exit_status(results)


def cmd_postprocess(args, settings: Settings) -> int:
    variant = normalize_variant(args.variant)
    fields = settings.field_map
    predictions = load_predictions(args.input, fields)
    items = list(predictions.items())
    results = BatchRunner(settings.workers).run(
        items, lambda raw: repair(raw, variant, settings.solver_config)
    )

    rows, log_rows = [], []
    for (case_id, raw), result in zip(items, results):
        if result.success:
            rows.append({fields["case_id"]: case_id, fields["prediction"]: result.value.record.to_json()})
            log_rows.append(result.value.to_log(case_id))
        else:
            # kept as-is so eval still pairs and scores the case
            rows.append({fields["case_id"]: case_id, fields["prediction"]: raw})
            log_rows.append({"id": case_id, "variant": variant, "stages": [], "warnings": [], "error": result.error})
    write_jsonl(args.output, rows)
    log_path = _log_path(args.output)
    write_jsonl(log_path, log_rows)
    fired = sum(1 for r in log_rows if r["stages"])
    print(f"Repaired {fired} of {len(rows)} records ({variant}) -> {args.output}; log {log_path}")
    return _exit_status(results)


def _score_variant(pairs, variant: str, settings: Settings):
    def score(pair):
        entry, raw = pair
        try:
            record = repair(raw, variant, settings.solver_config).record
        except ExtractionError as e:
            logger.warning("case %s: unusable prediction (%s); scored as zero", entry.case_id, e)
            return failed_case(entry.case_id, entry.gold)
        return score_case(entry.case_id, record, entry.gold, settings.weights, settings.tolerance)

    return BatchRunner(settings.workers).run([(entry.case_id, (entry, raw)) for entry, raw in pairs], score)


def cmd_eval(args, settings: Settings) -> int:
    fields = settings.field_map
    gold = load_dataset(args.gold, fields)
    no_gold = [e.case_id for e in gold if e.gold is None]
    if no_gold:
        raise DatasetFormatError(
            f"{len(no_gold)} entries in {args.gold} have no gold record",
            [(0, f"no gold for {case_id!r}") for case_id in no_gold],
        )
    pairs = pair_cases(gold, load_predictions(args.predictions, fields))

    variants = VALID_VARIANTS if args.variant == "all" else (normalize_variant(args.variant),)
    primary = PRIMARY_VARIANT if args.variant == "all" else variants[0]
    status = EXIT_OK
    scored, means = {}, {}
    for variant in variants:
        results = _score_variant(pairs, variant, settings)
        status = max(status, _exit_status(results))
        # a case whose scoring raised still counts, as zero
        scored[variant] = [
            r.value if r.success else failed_case(entry.case_id, entry.gold)
            for (entry, _), r in zip(pairs, results)
        ]
        means[variant] = aggregate(scored[variant], settings.weights).means
        logger.info("%s: MIR-E %.2f%%", variant, 100.0 * means[variant]["mire"])

    report = aggregate(scored[primary], settings.weights)
    if args.results:
        write_jsonl(args.results, ({**s.to_json(), "variant": primary} for s in scored[primary]))
        print(f"Wrote {args.results}")
    if args.json:
        payload = {**report.to_json(), "variant": primary, "variants": means if len(variants) > 1 else None}
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")
        print(f"Wrote {args.json}")
    text = render_report(
        report,
        variants=means if len(variants) > 1 else None,
        title=f"MIR-E evaluation ({primary})",
        timestamp=not args.no_timestamp,
    )
    _write_text(text, args.report)
    return status


def cmd_report(args, settings: Settings) -> int:
    problems: list[tuple[int, str]] = []
    rows = [row for _, row in read_jsonl(args.results, problems)]
    for line_no, message in problems:
        logger.warning("%s:%d: %s", args.results, line_no, message)
    report = aggregate_frame(results_frame(rows), settings.weights)
    _write_text(render_report(report, timestamp=not args.no_timestamp), args.output)
    if args.figures_dir:
        for path in write_figures(report, args.figures_dir):
            print(f"Wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rules-dir", type=Path, default=None, help="Rule tables directory (default: rules/).")
    common.add_argument("--workers", type=int, default=None, help="Worker threads for per-case work (default: 1).")
    common.add_argument(
        "--field-map",
        default=None,
        metavar="KEY=FIELD,...",
        help="Dataset field names; keys: case_id, question, gold, prediction.",
    )
    common.add_argument(
        "--spouse-radd",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Let spouses take part in radd (default: excluded).",
    )
    common.add_argument("--weights", default=None, metavar="H,S,A,F", help="MIR-E weights (default: 0.3,0.3,0.1,0.3).")
    common.add_argument("--tolerance", default=None, help="Percentage tolerance in points (default: 0.05).")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging.")

    parser = argparse.ArgumentParser(
        description="Mawarith: solve, repair and score Islamic inheritance cases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="Show how a question is parsed.")
    p.add_argument("question", nargs="?", help="Question text.")
    p.add_argument("--input", type=Path, default=None, help="Dataset of questions instead of a single question.")
    p.add_argument("--explain", action="store_true", help="Also show the blocking decisions.")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("solve", parents=[common], help="Solve every question in a dataset.")
    p.add_argument("input", type=Path)
    p.add_argument("--output", "-o", type=Path, required=True)
    p.add_argument("--explain", action="store_true", help="Print and store the rule trace per case.")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("postprocess", parents=[common], help="Repair model outputs.")
    p.add_argument("input", type=Path)
    p.add_argument("--output", "-o", type=Path, required=True)
    p.add_argument("--variant", default=PRIMARY_VARIANT, help="original, basic or posttasil (default: basic).")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("eval", parents=[common], help="Score predictions against gold with MIR-E.")
    p.add_argument("gold", type=Path)
    p.add_argument("predictions", type=Path)
    p.add_argument("--variant", default=PRIMARY_VARIANT, help="original, basic, posttasil or all (default: basic).")
    p.add_argument("--results", type=Path, default=None, help="Write per-case result rows here.")
    p.add_argument("--report", type=Path, default=None, help="Write the text report here instead of stdout.")
    p.add_argument("--json", type=Path, default=None, help="Also write the report as JSON.")
    p.add_argument("--no-timestamp", action="store_true", help="Omit the timestamp line from the report.")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", parents=[common], help="Render the analysis tables from a results file.")
    p.add_argument("results", type=Path)
    p.add_argument("--output", "-o", type=Path, default=None)
    p.add_argument("--figures-dir", type=Path, default=None, help="Also write PNG figures here.")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    load_env_file(_ROOT / ".env")
    try:
        settings = Settings.from_env().with_flags(
            weights=args.weights,
            tolerance=args.tolerance,
            spouse_radd=args.spouse_radd,
            field_map=args.field_map,
            rules_dir=args.rules_dir,
            workers=args.workers,
        )
        if args.command == "eval" and args.variant != "all":
            normalize_variant(args.variant)
        return args.func(args, settings)
    except DatasetFormatError as e:
        for line_no, message in e.problems[:20]:
            print(f"  line {line_no}: {message}", file=sys.stderr)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (MawarithError, ValueError, FileNotFoundError, ImportError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
