"""Pool-level judging loop: per-window score vectors, totals, normalization.

Per-window judge calls may run concurrently, but vectors are always folded in
``window_id`` order once every verdict is in, so completion order never shows
up in the results. Totals stay integers; normalization goes through exact
fractions before the final conversion to float.
"""

from __future__ import annotations

import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    EmptyPool,
    IncompleteScores,
    InvariantViolation,
    JudgeError,
    LabelNotFound,
    OutOfRangeTotal,
    RosterMismatch,
    VerdictError,
    WindowEvaluationError,
)
from .judge import JudgeConfig, make_judge
from .model import EvaluationPool, ModelRoster, QualityKey, Strategy, WindowCase, validate_pool
from .prompts import PromptTemplate, UniqueOption, build_prompt, deduplicate
from .ranking import rank_models
from .verdict import JudgeVerdict, VerdictKind, parse_verdict

logger = logging.getLogger(__name__)

DEFAULT_REPETITIONS = 5


@dataclass(frozen=True)
class ScoreVector:
    window_id: str
    values: dict


def _ids(roster: ModelRoster | Sequence[str]) -> tuple[str, ...]:
    return tuple(roster.model_ids) if isinstance(roster, ModelRoster) else tuple(roster)


def score_best_among_k(verdict: JudgeVerdict, options: Sequence[UniqueOption],
                       roster: ModelRoster | Sequence[str], window_id: str = "") -> ScoreVector:
    """1 for every model that wrote the chosen explanation, 0 for the rest."""
    if verdict.kind is not VerdictKind.BEST_CHOICE:
        raise ValueError("score_best_among_k needs a best-choice verdict")
    chosen = [o for o in options if o.label == verdict.chosen_label]
    if not chosen:
        raise LabelNotFound(f"label {verdict.chosen_label!r} not among the options")
    winners = set(chosen[0].contributors)
    return ScoreVector(window_id, {m: int(m in winners) for m in _ids(roster)})


def score_likert(verdict: JudgeVerdict, options: Sequence[UniqueOption],
                 roster: ModelRoster | Sequence[str], window_id: str = "") -> ScoreVector:
    """Every model inherits the score of the option it contributed to."""
    if verdict.kind is not VerdictKind.LIKERT_SCORES:
        raise ValueError("score_likert needs a Likert verdict")
    values = {}
    for opt in options:
        if opt.label not in verdict.scores:
            raise IncompleteScores(f"no score for option {opt.label}")
        for m in opt.contributors:
            values[m] = verdict.scores[opt.label]
    ids = _ids(roster)
    missing = [m for m in ids if m not in values]
    if missing:
        raise RosterMismatch(f"options do not cover model(s) {missing}")
    return ScoreVector(window_id, {m: values[m] for m in ids})


def score_window(strategy: Strategy, verdict: JudgeVerdict, options, roster, window_id: str = "") -> ScoreVector:
    if strategy is Strategy.BEST_AMONG_K:
        return score_best_among_k(verdict, options, roster, window_id)
    return score_likert(verdict, options, roster, window_id)


def accumulate(vectors: Sequence[ScoreVector], roster: ModelRoster | Sequence[str]) -> dict:
    ids = _ids(roster)
    if not vectors:
        raise EmptyPool("no score vectors to accumulate")
    totals = {m: 0 for m in ids}
    for vec in sorted(vectors, key=lambda v: v.window_id):
        if set(vec.values) != set(ids):
            raise RosterMismatch(f"vector for window {vec.window_id!r} is keyed by "
                                 f"{sorted(vec.values)}, roster is {list(ids)}")
        for m in ids:
            totals[m] += vec.values[m]
    return totals


def normalize(raw_totals: Mapping[str, float], strategy: Strategy | str, pool_size: int) -> dict:
    """Map totals to [0, 1]: win fraction, or Likert mean rescaled from 1..5."""
    strategy = Strategy.parse(strategy)
    if pool_size < 1:
        raise EmptyPool("pool_size must be >= 1")
    out = {}
    for m, total in raw_totals.items():
        total = Fraction(total)
        if strategy is Strategy.BEST_AMONG_K:
            if not 0 <= total <= pool_size:
                raise OutOfRangeTotal(f"{m}: total {total} outside [0, {pool_size}]")
            value = total / pool_size
        else:
            if not pool_size <= total <= 5 * pool_size:
                raise OutOfRangeTotal(f"{m}: Likert total {total} outside "
                                      f"[{pool_size}, {5 * pool_size}]")
            value = (total / pool_size - 1) / 4
        out[m] = float(value)
    return out


@dataclass(frozen=True)
class RepetitionResult:
    raw_totals: dict
    normalized: dict
    pool_size: int
    skipped: tuple[str, ...] = ()
    window_scores: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScoreBoard:
    strategy: Strategy
    model_ids: tuple[str, ...]
    repetitions: tuple[RepetitionResult, ...]
    raw_totals: dict
    normalized: dict
    std: dict
    ranking: tuple[str, ...]
    ranking_tied: bool
    winners: tuple[str, ...]

    @property
    def mean(self) -> dict:
        return self.normalized

    @property
    def single_repetition(self) -> bool:
        return len(self.repetitions) == 1

    @property
    def winner(self) -> str:
        """Single winner; on an exact tie the first co-leader in roster order."""
        return self.winners[0]

    @property
    def winner_tied(self) -> bool:
        return len(self.winners) > 1

    @property
    def repetition_values(self) -> list[dict]:
        return [r.normalized for r in self.repetitions]


def _mean(values: list) -> float:
    return float(sum(Fraction(v) for v in values) / len(values))


def finalize_board(strategy: Strategy, model_ids: Sequence[str],
                   repetitions: Sequence[RepetitionResult]) -> ScoreBoard:
    if not repetitions:
        raise ValueError("need at least one repetition")
    ids = tuple(model_ids)
    raw = {}
    for m in ids:
        avg = sum(Fraction(r.raw_totals[m]) for r in repetitions) / len(repetitions)
        raw[m] = int(avg) if avg.denominator == 1 else float(avg)
    mean = {m: _mean([r.normalized[m] for r in repetitions]) for m in ids}
    if len(repetitions) == 1:
        std = {m: 0.0 for m in ids}
    else:
        std = {m: statistics.stdev([r.normalized[m] for r in repetitions]) for m in ids}
    ranking = rank_models(mean, ids)
    top = mean[ranking.order[0]]
    winners = tuple(m for m in ranking.order if mean[m] == top)
    return ScoreBoard(Strategy.parse(strategy), ids, tuple(repetitions), raw, mean, std,
                      ranking.order, ranking.has_ties, winners)


def judge_case(case: WindowCase, roster: ModelRoster, strategy: Strategy, judge,
               template: PromptTemplate, max_attempts: int = 1,
               shuffle_seed=None) -> tuple[list[UniqueOption], JudgeVerdict]:
    """Ask the judge about one window, re-asking when the answer cannot be parsed."""
    options = deduplicate(case, roster, shuffle_seed=shuffle_seed)
    bundle = build_prompt(strategy, case, options, template)
    labels = bundle.labels
    last: Exception | None = None
    for _ in range(max(1, max_attempts)):
        try:
            response = judge.complete(bundle)
        except JudgeError as exc:
            raise WindowEvaluationError(case.window_id, exc) from exc
        try:
            return options, parse_verdict(response.raw_text, strategy, labels)
        except VerdictError as exc:
            logger.warning("window %s: unusable judge answer (%s), asking again", case.window_id, exc)
            last = exc
    raise WindowEvaluationError(case.window_id, last)


def evaluate_once(pool: EvaluationPool, strategy: Strategy, judge, *, template: PromptTemplate,
                  max_attempts: int = 1, parallelism: int = 1, skip_failed: bool = False,
                  shuffle_seed=None) -> RepetitionResult:
    roster = pool.roster

    def work(case):
        try:
            options, verdict = judge_case(case, roster, strategy, judge, template,
                                          max_attempts, shuffle_seed)
        except WindowEvaluationError as exc:
            return case.window_id, exc
        return case.window_id, score_window(strategy, verdict, options, roster, case.window_id)

    if parallelism > 1 and len(pool.cases) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool_exec:
            results = list(pool_exec.map(work, pool.cases))
    else:
        results = [work(c) for c in pool.cases]

    results.sort(key=lambda item: item[0])
    vectors, skipped = [], []
    for wid, res in results:
        if isinstance(res, WindowEvaluationError):
            if not skip_failed:
                raise res
            logger.warning("skipping window %s for every model: %s", wid, res)
            skipped.append(wid)
        else:
            vectors.append(res)
    if not vectors:
        raise EmptyPool("every window failed; nothing to score")
    totals = accumulate(vectors, roster)
    return RepetitionResult(
        raw_totals=totals,
        normalized=normalize(totals, strategy, len(vectors)),
        pool_size=len(vectors),
        skipped=tuple(skipped),
        window_scores={v.window_id: dict(v.values) for v in vectors},
    )


def run_evaluation(pool: EvaluationPool, strategy: Strategy | str, judge_config: JudgeConfig,
                   repetitions: int = DEFAULT_REPETITIONS, seed: int = 0, *,
                   oracle: QualityKey | None = None, judge=None,
                   template: PromptTemplate | None = None, skip_failed: bool = False,
                   shuffle_options: bool = False) -> ScoreBoard:
    """Judge every window ``repetitions`` times and aggregate per model.

    ``judge`` overrides the backend built from ``judge_config``; ``oracle`` is
    only needed by the mock backend. Prompts are identical across repetitions.
    """
    strategy = Strategy.parse(strategy)
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    problems = validate_pool(pool)
    if problems:
        raise InvariantViolation(problems)
    template = template or PromptTemplate.default()
    own_judge = judge is None
    if own_judge:
        judge = make_judge(judge_config, oracle)
    try:
        reps = [
            evaluate_once(pool, strategy, judge, template=template,
                          max_attempts=judge_config.max_attempts,
                          parallelism=judge_config.parallelism, skip_failed=skip_failed,
                          shuffle_seed=seed if shuffle_options else None)
            for _ in range(repetitions)
        ]
    finally:
        if own_judge and hasattr(judge, "close"):
            judge.close()
    return finalize_board(strategy, pool.roster.model_ids, reps)
