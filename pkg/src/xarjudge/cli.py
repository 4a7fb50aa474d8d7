"""Command-line entry point: ``xarjudge {evaluate,compare,synth,validate}``.

Exit codes:
    0  success
    2  invalid input (missing/malformed files, bad arguments, invalid pool)
    3  judge backend failure (credentials, exhausted retries)
    4  judge answers could not be parsed after every retry
    5  model sets of the report and the survey differ
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from . import io as pool_io
from .compare import compare, render_report
from .errors import (
    JudgeError,
    ModelSetMismatch,
    VerdictError,
    WindowEvaluationError,
    XarJudgeError,
)
from .judge import JudgeConfig
from .model import EvaluationPool, ModelRoster, Strategy, validate_pool
from .prompts import PromptTemplate
from .scoring import DEFAULT_REPETITIONS, run_evaluation
from .synth import DEFAULT_DUPLICATE_RATE, generate_synthetic_pool

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BACKEND = 3
EXIT_PARSE = 4
EXIT_MISMATCH = 5


class UsageError(Exception):
    pass


def _csv(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xarjudge",
                                     description="Rank explainable activity recognition models with an LLM judge.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="judge every window of a pool and score the models")
    ev.add_argument("--pool", required=True, type=Path)
    ev.add_argument("--strategy", choices=["best", "likert"], default="best")
    ev.add_argument("--backend", choices=["http", "mock"], default="mock")
    ev.add_argument("--model", default="gpt-4-turbo", help="chat model name sent to the endpoint")
    ev.add_argument("--reps", type=_positive_int, default=DEFAULT_REPETITIONS)
    ev.add_argument("--parallelism", type=_positive_int, default=4)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", type=Path, help="report file (JSON)")
    ev.add_argument("--oracle", type=Path,
                    help="quality key for the mock backend (default: <pool>.oracle.json)")
    ev.add_argument("--template", type=Path, help="prompt template file")
    ev.add_argument("--base-url", default="https://api.openai.com/v1")
    ev.add_argument("--max-attempts", type=_positive_int, default=3)
    ev.add_argument("--timeout", type=float, default=60.0)
    ev.add_argument("--skip-failed", action="store_true",
                    help="drop windows that cannot be judged instead of aborting")
    ev.add_argument("--shuffle-options", action="store_true",
                    help="shuffle option order per window (seeded) to probe position bias")
    ev.add_argument("--survey", type=Path, help="also compare against this survey")
    ev.add_argument("--figure", type=Path, help="write a bar chart of the scores")
    ev.add_argument("--table", type=Path, help="write a per-model CSV table")

    cmp_ = sub.add_parser("compare", help="compare a report with a human survey")
    cmp_.add_argument("--report", required=True, type=Path)
    cmp_.add_argument("--survey", required=True, type=Path)
    cmp_.add_argument("--out", type=Path, help="write the report with the comparison block added")
    cmp_.add_argument("--figure", type=Path, help="write an LLM-vs-survey bar chart")
    cmp_.add_argument("--table", type=Path, help="write a per-model CSV table")

    syn = sub.add_parser("synth", help="generate an activity-balanced synthetic pool")
    syn.add_argument("--models", required=True,
                     help="number of models (ids m1..mK) or a comma-separated list of ids")
    syn.add_argument("--activities", required=True, type=_csv)
    syn.add_argument("--per-activity", required=True, type=_positive_int)
    syn.add_argument("--quality-order", type=_csv, help="model ids, best first (default: roster order)")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--duplicate-rate", type=float, default=DEFAULT_DUPLICATE_RATE)
    syn.add_argument("--out", required=True, type=Path)

    val = sub.add_parser("validate", help="check a pool file against every invariant")
    val.add_argument("--pool", required=True, type=Path)
    return parser


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_evaluate(args) -> int:
    pool = pool_io.load_pool(args.pool)
    template = PromptTemplate.from_file(args.template) if args.template else PromptTemplate.default()
    strategy = Strategy.parse(args.strategy)
    config = JudgeConfig(
        backend_kind="mock" if args.backend == "mock" else "http_chat",
        model_name=args.model,
        temperature=0.0,
        max_attempts=args.max_attempts,
        base_url=args.base_url,
        timeout_seconds=args.timeout,
        parallelism=args.parallelism,
    )
    oracle = None
    if config.backend_kind == "mock":
        oracle_path = args.oracle or pool_io.oracle_path_for(args.pool)
        oracle = pool_io.load_quality_key(oracle_path)
    survey = pool_io.load_survey(args.survey) if args.survey else None

    board = run_evaluation(pool, strategy, config, repetitions=args.reps, seed=args.seed,
                           oracle=oracle, template=template, skip_failed=args.skip_failed,
                           shuffle_options=args.shuffle_options)
    comparison = compare(board, survey) if survey is not None else None
    fingerprint = {
        "strategy": strategy.value,
        "backend": config.backend_kind,
        "model": config.model_name if config.backend_kind != "mock" else "mock",
        "temperature": config.temperature,
        "repetitions": args.reps,
        "seed": args.seed,
        "shuffle_options": args.shuffle_options,
        "skip_failed": args.skip_failed,
        "template_sha256": template.sha256,
        "pool_sha256": _sha256(args.pool),
    }
    if args.out:
        pool_io.save_report(board, comparison, args.out, config=fingerprint)
    _write_extras(args, board, comparison, survey)
    sys.stdout.write(render_report(board, comparison))
    return EXIT_OK


def _write_extras(args, board, comparison, survey) -> None:
    if args.figure or args.table:
        from .plotting import plot_scores, write_score_table

        if args.figure:
            plot_scores(board, args.figure, survey)
        if args.table:
            write_score_table(board, args.table, comparison)


def cmd_compare(args) -> int:
    report = pool_io.load_report(args.report)
    survey = pool_io.load_survey(args.survey)
    comparison = compare(report.board, survey)
    if args.out:
        pool_io.save_report(report.board, comparison, args.out, config=report.config)
    _write_extras(args, report.board, comparison, survey)
    sys.stdout.write(render_report(report.board, comparison))
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.models.strip().isdigit():
        k = int(args.models)
        if k < 1:
            raise UsageError("--models must be >= 1")
        model_ids = tuple(f"m{i}" for i in range(1, k + 1))
    else:
        model_ids = tuple(_csv(args.models))
    roster = ModelRoster(model_ids, tuple(args.activities))
    problems = [v for v in validate_pool(EvaluationPool(roster, ())) if v.path != "cases"]
    if problems:
        raise UsageError("; ".join(str(p) for p in problems))
    order = args.quality_order or list(model_ids)
    pool, key = generate_synthetic_pool(roster, args.per_activity, args.seed, order,
                                        duplicate_rate=args.duplicate_rate)
    pool_io.save_pool(pool, args.out)
    oracle_path = pool_io.oracle_path_for(args.out)
    pool_io.save_quality_key(key, oracle_path)
    print(f"wrote {len(pool)} windows ({args.per_activity} per activity) to {args.out}")
    print(f"wrote quality key to {oracle_path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = pool_io._read_json(args.pool)
    pool = pool_io.pool_from_dict(doc)
    problems = validate_pool(pool)
    if not problems:
        print(f"OK: {len(pool)} windows, {pool.roster.k} models")
        return EXIT_OK
    for p in problems:
        print(p)
    return EXIT_INVALID


COMMANDS = {
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "validate": cmd_validate,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, WindowEvaluationError):
        return EXIT_PARSE if isinstance(exc.cause, VerdictError) else EXIT_BACKEND
    if isinstance(exc, JudgeError):
        return EXIT_BACKEND
    if isinstance(exc, VerdictError):
        return EXIT_PARSE
    if isinstance(exc, ModelSetMismatch):
        return EXIT_MISMATCH
    return EXIT_INVALID


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (XarJudgeError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
