"""Domain types for evaluation pools: windows, candidate explanations, rosters.

The types are plain frozen dataclasses and deliberately accept invalid
states; :func:`validate_pool` reports every invariant violation as data so a
loader can show all problems at once.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum


class Strategy(str, Enum):
    BEST_AMONG_K = "best_among_k"
    LIKERT = "likert"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, Strategy):
            return value
        aliases = {"best": cls.BEST_AMONG_K, "likert_scoring": cls.LIKERT, "scoring": cls.LIKERT}
        key = str(value).strip().lower().replace("-", "_")
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class HighLevelEvent:
    name: str
    offset_seconds: float


@dataclass(frozen=True)
class EventWindow:
    window_id: str
    duration_seconds: float
    predicted_activity: str
    events: tuple[HighLevelEvent, ...] = ()


@dataclass(frozen=True)
class ExplanationCandidate:
    model_id: str
    text: str


@dataclass(frozen=True)
class WindowCase:
    window: EventWindow
    candidates: tuple[ExplanationCandidate, ...]

    @property
    def window_id(self) -> str:
        return self.window.window_id

    def text_for(self, model_id: str) -> str:
        for cand in self.candidates:
            if cand.model_id == model_id:
                return cand.text
        raise KeyError(model_id)


@dataclass(frozen=True)
class ModelRoster:
    model_ids: tuple[str, ...]
    activity_set: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.model_ids)


@dataclass(frozen=True)
class EvaluationPool:
    roster: ModelRoster
    cases: tuple[WindowCase, ...]

    def __len__(self) -> int:
        return len(self.cases)


@dataclass(frozen=True)
class Violation:
    """One broken invariant. ``window_id`` is None for pool-level problems."""

    window_id: str | None
    path: str
    message: str

    def __str__(self) -> str:
        where = f"[{self.window_id}] " if self.window_id is not None else ""
        return f"{where}{self.path}: {self.message}"


def _validate_roster(roster: ModelRoster) -> list[Violation]:
    out = []
    if len(roster.model_ids) < 1:
        out.append(Violation(None, "roster.model_ids", "roster must list at least one model"))
    for mid, n in Counter(roster.model_ids).items():
        if n > 1:
            out.append(Violation(None, "roster.model_ids", f"duplicate model id {mid!r}"))
    for i, mid in enumerate(roster.model_ids):
        if not str(mid).strip():
            out.append(Violation(None, f"roster.model_ids[{i}]", "model id is empty"))
    if len(roster.activity_set) < 1:
        out.append(Violation(None, "roster.activity_set", "activity set is empty"))
    for act, n in Counter(roster.activity_set).items():
        if n > 1:
            out.append(Violation(None, "roster.activity_set", f"duplicate activity {act!r}"))
    return out


def _validate_case(i: int, case: WindowCase, roster: ModelRoster) -> list[Violation]:
    w = case.window
    wid = w.window_id
    base = f"cases[{i}]"
    out = []
    if not str(wid).strip():
        out.append(Violation(wid, f"{base}.window.window_id", "window id is empty"))
    if not w.duration_seconds > 0:
        out.append(Violation(wid, f"{base}.window.duration_seconds",
                             f"must be > 0, got {w.duration_seconds!r}"))
    if w.predicted_activity not in roster.activity_set:
        out.append(Violation(wid, f"{base}.window.predicted_activity",
                             f"{w.predicted_activity!r} not in roster activity set"))
    prev = None
    for j, ev in enumerate(w.events):
        path = f"{base}.window.events[{j}]"
        if not str(ev.name).strip():
            out.append(Violation(wid, f"{path}.name", "event name is empty"))
        if ev.offset_seconds < 0:
            out.append(Violation(wid, f"{path}.offset_seconds", "offset is negative"))
        if ev.offset_seconds > w.duration_seconds:
            out.append(Violation(wid, f"{path}.offset_seconds",
                                 f"offset {ev.offset_seconds} exceeds window duration "
                                 f"{w.duration_seconds}"))
        if prev is not None and ev.offset_seconds < prev:
            out.append(Violation(wid, f"{path}.offset_seconds",
                                 "events not sorted by offset"))
        prev = ev.offset_seconds

    seen = Counter(c.model_id for c in case.candidates)
    for j, cand in enumerate(case.candidates):
        path = f"{base}.candidates[{j}]"
        if cand.model_id not in roster.model_ids:
            out.append(Violation(wid, f"{path}.model_id",
                                 f"model {cand.model_id!r} not in roster"))
        if not cand.text.strip():
            out.append(Violation(wid, f"{path}.text", "explanation text is empty"))
    for mid in roster.model_ids:
        if seen[mid] == 0:
            out.append(Violation(wid, f"{base}.candidates",
                                 f"missing candidate for model {mid!r}"))
        elif seen[mid] > 1:
            out.append(Violation(wid, f"{base}.candidates",
                                 f"model {mid!r} appears {seen[mid]} times"))
    return out


def validate_pool(pool: EvaluationPool) -> list[Violation]:
    """Return every invariant violation in ``pool``; an empty list means valid."""
    out = _validate_roster(pool.roster)
    if not pool.cases:
        out.append(Violation(None, "cases", "empty pool"))
    ids = Counter(c.window.window_id for c in pool.cases)
    for wid, n in sorted(ids.items()):
        if n > 1:
            out.append(Violation(wid, "cases", f"window id {wid!r} used {n} times"))
    for i, case in enumerate(pool.cases):
        out.extend(_validate_case(i, case, pool.roster))
    return out


@dataclass(frozen=True)
class QualityKey:
    """Hidden ground-truth ordering of models, best first (synthetic pools only)."""

    order: tuple[str, ...]

    def rank(self, model_id: str) -> int:
        return self.order.index(model_id)

    def __contains__(self, model_id: object) -> bool:
        return model_id in self.order

    def likert_score(self, model_id: str) -> int:
        """Evenly spaced 5..1 by rank: three models get 5/3/1, two get 5/1."""
        k = len(self.order)
        if k == 1:
            return 5
        # half-up rounding on an exact rational; ranks and k are small ints
        return 5 - (8 * self.rank(model_id) + (k - 1)) // (2 * (k - 1))
