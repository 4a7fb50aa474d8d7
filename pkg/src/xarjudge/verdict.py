"""Parse the machine-readable final line out of a chain-of-thought completion.

Only the text after the *last* marker is considered, so the judge can mention
labels or even draft answers while reasoning. There is no prose fallback: a
completion without a usable final line is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    IncompleteScores,
    MalformedFinalLine,
    MissingFinalLine,
    OutOfRangeScore,
    StrategyMismatch,
    UnknownLabel,
)
from .model import Strategy

FINAL_MARKER = "FINAL:"
SCORES_MARKER = "SCORES:"
LIKERT_RANGE = range(1, 6)

_WRAPPING = " \t*\"'`()[]<>."
_ITEM = re.compile(r"^\s*([A-Za-z]+)\s*[=:]\s*([+-]?\d+)\s*$")


class VerdictKind(str, Enum):
    BEST_CHOICE = "best_choice"
    LIKERT_SCORES = "likert_scores"


@dataclass(frozen=True)
class JudgeVerdict:
    kind: VerdictKind
    chosen_label: str | None = None
    scores: dict = field(default_factory=dict)
    reasoning: str = ""


def _marker_for(strategy: Strategy) -> tuple[str, str]:
    if strategy is Strategy.BEST_AMONG_K:
        return FINAL_MARKER, SCORES_MARKER
    return SCORES_MARKER, FINAL_MARKER


def _payload(text: str, marker: str) -> str:
    start = text.rfind(marker) + len(marker)
    line = text[start:].splitlines()
    return line[0] if line else ""


def parse_verdict(raw_text: str | bytes, strategy: Strategy | str, expected_labels) -> JudgeVerdict:
    strategy = Strategy.parse(strategy)
    expected = list(expected_labels)
    if not expected:
        raise ValueError("expected_labels must be non-empty")
    if isinstance(raw_text, (bytes, bytearray)):
        raw_text = bytes(raw_text).decode("utf-8", errors="replace")
    text = str(raw_text)

    marker, other = _marker_for(strategy)
    if marker not in text:
        if other in text:
            raise StrategyMismatch(f"found {other!r} but {strategy.value} expects {marker!r}")
        raise MissingFinalLine(f"no {marker!r} line in judge output")
    payload = _payload(text, marker)

    if strategy is Strategy.BEST_AMONG_K:
        label = payload.strip(_WRAPPING)
        if not label:
            raise MissingFinalLine(f"{marker!r} line carries no label")
        if label not in expected:
            raise UnknownLabel(f"label {label!r} not among {expected}")
        return JudgeVerdict(VerdictKind.BEST_CHOICE, chosen_label=label, reasoning=text)

    body = payload.strip().rstrip(".").strip()
    if not body:
        raise MissingFinalLine(f"{marker!r} line carries no scores")
    scores: dict[str, int] = {}
    for item in re.split(r"[;,]", body):
        if not item.strip():
            continue
        m = _ITEM.match(item.strip(" \t*\"'`."))
        if m is None:
            raise MalformedFinalLine(f"cannot read score item {item.strip()!r}")
        label, value = m.group(1), int(m.group(2))
        if label not in expected:
            raise UnknownLabel(f"label {label!r} not among {expected}")
        if value not in LIKERT_RANGE:
            raise OutOfRangeScore(f"score {value} for {label} outside 1..5")
        if label in scores and scores[label] != value:
            raise MalformedFinalLine(f"conflicting scores for {label}")
        scores[label] = value
    missing = [lab for lab in expected if lab not in scores]
    if missing:
        raise IncompleteScores(f"no score for option(s) {', '.join(missing)}")
    ordered = {lab: scores[lab] for lab in expected}
    return JudgeVerdict(VerdictKind.LIKERT_SCORES, scores=ordered, reasoning=text)


def render_final_line(verdict: JudgeVerdict) -> str:
    if verdict.kind is VerdictKind.BEST_CHOICE:
        return f"{FINAL_MARKER} {verdict.chosen_label}"
    return SCORES_MARKER + " " + "; ".join(f"{k}={v}" for k, v in verdict.scores.items())
