"""Bar charts of per-model scores, optionally next to survey scores."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .compare import ComparisonReport, SurveyBenchmark  # noqa: E402
from .errors import IoFailure  # noqa: E402
from .scoring import ScoreBoard  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "xarjudge",
}

LLM_COLOR = "#4c72b0"
SURVEY_COLOR = "#dd8452"


def plot_scores(board: ScoreBoard, path: str | Path, survey: SurveyBenchmark | None = None,
                title: str | None = None):
    """Write a bar chart of normalized means (with std error bars) to ``path``.

    Bars follow the board's ranking. With a survey, its scores are drawn as a
    second bar per model. Returns the figure after saving it.
    """
    models = list(board.ranking)
    x = range(len(models))
    width = 0.38 if survey is not None else 0.6
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(1.2 * len(models) + 2.4, 3.2))
        shift = -width / 2 if survey is not None else 0.0
        ax.bar([i + shift for i in x], [board.normalized[m] for m in models], width,
               yerr=[board.std[m] for m in models], capsize=3, color=LLM_COLOR,
               label=f"LLM ({board.strategy.value})")
        if survey is not None:
            ax.bar([i + width / 2 for i in x], [survey.scores[m] for m in models], width,
                   color=SURVEY_COLOR, label=f"survey ({survey.dataset_name})")
            ax.legend(frameon=False, loc="upper right")
        ax.set_xticks(list(x))
        ax.set_xticklabels(models)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("normalized score")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
    plt.close(fig)
    return fig


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    # drop timestamps/versions so identical data gives identical files
    metadata = {".png": {"Software": None}, ".svg": {"Date": None, "Creator": None},
                ".pdf": {"CreationDate": None, "Creator": None, "Producer": None}}.get(path.suffix.lower())
    try:
        fig.savefig(path, dpi=150, metadata=metadata)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_score_table(board: ScoreBoard, path: str | Path,
                      comparison: ComparisonReport | None = None, delimiter: str = ",") -> None:
    """Per-model table (rank, raw, mean, std[, delta]) as delimited text."""
    header = ["rank", "model", "raw_total", "mean", "std"]
    if comparison is not None:
        header.append("delta_vs_survey")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter=delimiter)
            writer.writerow(header)
            for i, m in enumerate(board.ranking, start=1):
                row = [i, m, board.raw_totals[m], repr(board.normalized[m]), repr(board.std[m])]
                if comparison is not None:
                    row.append(repr(comparison.per_model_delta[m]))
                writer.writerow(row)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
