"""Compare LLM-derived rankings with human survey results; text reports."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ModelSetMismatch
from .ranking import kendall_tau, rank_models
from .scoring import ScoreBoard


@dataclass(frozen=True)
class SurveyBenchmark:
    dataset_name: str
    scores: dict
    participant_count: int


@dataclass(frozen=True)
class ComparisonReport:
    kendall_tau: float
    exact_rank_match: bool
    per_model_delta: dict
    llm_ranking: tuple[str, ...]
    survey_ranking: tuple[str, ...]
    dataset_name: str = ""


def compare(board: ScoreBoard, survey: SurveyBenchmark) -> ComparisonReport:
    """Rank both sides (roster order breaks ties) and measure agreement.

    Deltas are LLM minus survey normalized score; they depend on how each side
    was normalized, so only the rankings are directly comparable.
    """
    if set(board.model_ids) != set(survey.scores):
        raise ModelSetMismatch(
            f"board models {sorted(board.model_ids)} != survey models {sorted(survey.scores)}")
    llm = rank_models(board.normalized, board.model_ids).order
    human = rank_models(survey.scores, board.model_ids).order
    tau = kendall_tau(llm, human) if len(llm) >= 2 else 1.0
    delta = {m: board.normalized[m] - survey.scores[m] for m in board.model_ids}
    return ComparisonReport(tau, llm == human, delta, llm, human, survey.dataset_name)


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def render_report(board: ScoreBoard, comparison: ComparisonReport | None = None) -> str:
    n_reps = len(board.repetitions)
    sizes = sorted({r.pool_size for r in board.repetitions})
    width = max(len("model"), *(len(m) for m in board.model_ids))
    lines = [
        f"strategy: {board.strategy.value}",
        f"windows scored: {'/'.join(str(s) for s in sizes)}",
        f"repetitions: {n_reps}" + (" (single repetition, std reported as 0)" if n_reps == 1 else ""),
        "",
        f"{'model':<{width}}  {'raw':>9}  {'mean':>7}  {'std':>7}",
    ]
    for m in board.ranking:
        raw = board.raw_totals[m]
        raw_s = str(raw) if isinstance(raw, int) else f"{raw:.2f}"
        lines.append(f"{m:<{width}}  {raw_s:>9}  {_fmt(board.normalized[m]):>7}  {_fmt(board.std[m]):>7}")
    lines.append("")
    lines.append("ranking: " + " > ".join(board.ranking) + (" (ties broken by roster order)" if board.ranking_tied else ""))
    lines.append("winner: " + ", ".join(board.winners) + (" (tie)" if board.winner_tied else ""))
    skipped = sorted({w for r in board.repetitions for w in r.skipped})
    if skipped:
        lines.append("skipped windows: " + ", ".join(skipped))
    if comparison is not None:
        lines += [
            "",
            f"survey: {comparison.dataset_name}" if comparison.dataset_name else "survey:",
            "survey ranking: " + " > ".join(comparison.survey_ranking),
            f"kendall tau: {_fmt(comparison.kendall_tau)}",
            f"exact rank match: {'yes' if comparison.exact_rank_match else 'no'}",
            "delta (llm - survey): " + ", ".join(
                f"{m}={comparison.per_model_delta[m]:+.4f}" for m in board.model_ids),
        ]
    return "\n".join(lines) + "\n"
