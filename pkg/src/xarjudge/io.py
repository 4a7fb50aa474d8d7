"""JSON persistence for pools, quality keys, surveys, and evaluation reports.

Pool and survey documents are read strictly: unknown keys are rejected so a
typo never silently drops data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .compare import ComparisonReport, SurveyBenchmark
from .errors import InvariantViolation, IoFailure, MalformedDocument, SchemaViolation
from .model import (
    EvaluationPool,
    EventWindow,
    ExplanationCandidate,
    HighLevelEvent,
    ModelRoster,
    QualityKey,
    Strategy,
    WindowCase,
    validate_pool,
)
from .scoring import RepetitionResult, ScoreBoard

REPORT_FORMAT = "xarjudge-report/1"


# --- low-level helpers --------------------------------------------------------


def _read_json(path: str | Path) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedDocument(f"{path}: not UTF-8 text ({exc})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: invalid JSON ({exc})") from exc


def _write_json(doc: Any, path: str | Path) -> None:
    path = Path(path)
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _obj(value: Any, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise SchemaViolation(path or "<root>", f"expected an object, got {type(value).__name__}")
    for key in required:
        if key not in value:
            raise SchemaViolation(f"{path}.{key}" if path else key, "missing required field")
    extra = sorted(set(value) - set(required) - set(optional))
    if extra:
        raise SchemaViolation(f"{path}.{extra[0]}" if path else extra[0], "unknown field")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected a string, got {type(value).__name__}")
    return value


def _num(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected a number, got {type(value).__name__}")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(path, f"expected an integer, got {type(value).__name__}")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaViolation(path, f"expected a list, got {type(value).__name__}")
    return value


def _str_list(value: Any, path: str) -> tuple[str, ...]:
    return tuple(_str(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path)))


# --- pools ------------------------------------------------------------------------


def pool_to_dict(pool: EvaluationPool) -> dict:
    return {
        "roster": {
            "model_ids": list(pool.roster.model_ids),
            "activity_set": list(pool.roster.activity_set),
        },
        "cases": [
            {
                "window": {
                    "window_id": c.window.window_id,
                    "duration_seconds": c.window.duration_seconds,
                    "predicted_activity": c.window.predicted_activity,
                    "events": [{"name": e.name, "offset_seconds": e.offset_seconds}
                               for e in c.window.events],
                },
                "candidates": [{"model_id": x.model_id, "text": x.text} for x in c.candidates],
            }
            for c in pool.cases
        ],
    }


def pool_from_dict(doc: Any) -> EvaluationPool:
    """Build a pool from a parsed document; schema checks only, no invariants."""
    doc = _obj(doc, "", ("roster", "cases"))
    r = _obj(doc["roster"], "roster", ("model_ids", "activity_set"))
    roster = ModelRoster(_str_list(r["model_ids"], "roster.model_ids"),
                         _str_list(r["activity_set"], "roster.activity_set"))
    cases = []
    for i, raw_case in enumerate(_list(doc["cases"], "cases")):
        cp = f"cases[{i}]"
        c = _obj(raw_case, cp, ("window", "candidates"))
        w = _obj(c["window"], f"{cp}.window",
                 ("window_id", "duration_seconds", "predicted_activity"), ("events",))
        events = []
        for j, raw_ev in enumerate(_list(w.get("events", []), f"{cp}.window.events")):
            ep = f"{cp}.window.events[{j}]"
            ev = _obj(raw_ev, ep, ("name", "offset_seconds"))
            events.append(HighLevelEvent(_str(ev["name"], f"{ep}.name"),
                                         _num(ev["offset_seconds"], f"{ep}.offset_seconds")))
        window = EventWindow(
            _str(w["window_id"], f"{cp}.window.window_id"),
            _num(w["duration_seconds"], f"{cp}.window.duration_seconds"),
            _str(w["predicted_activity"], f"{cp}.window.predicted_activity"),
            tuple(events),
        )
        cands = []
        for j, raw_cand in enumerate(_list(c["candidates"], f"{cp}.candidates")):
            xp = f"{cp}.candidates[{j}]"
            x = _obj(raw_cand, xp, ("model_id", "text"))
            cands.append(ExplanationCandidate(_str(x["model_id"], f"{xp}.model_id"),
                                              _str(x["text"], f"{xp}.text")))
        cases.append(WindowCase(window, tuple(cands)))
    return EvaluationPool(roster, tuple(cases))


def load_pool(path: str | Path) -> EvaluationPool:
    pool = pool_from_dict(_read_json(path))
    problems = validate_pool(pool)
    if problems:
        raise InvariantViolation(problems)
    return pool


def save_pool(pool: EvaluationPool, path: str | Path) -> None:
    _write_json(pool_to_dict(pool), path)


# --- quality keys (mock oracle sidecars) -------------------------------------------


def oracle_path_for(pool_path: str | Path) -> Path:
    p = Path(pool_path)
    return p.with_name(p.stem + ".oracle.json")


def save_quality_key(key: QualityKey, path: str | Path) -> None:
    _write_json({"quality_order": list(key.order)}, path)


def load_quality_key(path: str | Path) -> QualityKey:
    doc = _obj(_read_json(path), "", ("quality_order",))
    return QualityKey(_str_list(doc["quality_order"], "quality_order"))


# --- surveys ------------------------------------------------------------------------


def survey_from_dict(doc: Any) -> SurveyBenchmark:
    doc = _obj(doc, "", ("dataset_name", "participant_count", "scores"))
    name = _str(doc["dataset_name"], "dataset_name")
    count = _int(doc["participant_count"], "participant_count")
    if count < 1:
        raise SchemaViolation("participant_count", "must be a positive integer")
    raw = doc["scores"]
    if not isinstance(raw, dict) or not raw:
        raise SchemaViolation("scores", "expected a non-empty object of model_id -> number")
    scores = {}
    for m, v in raw.items():
        v = _num(v, f"scores.{m}")
        if not 0 <= v <= 1:
            raise SchemaViolation(f"scores.{m}", f"normalized score {v} outside [0, 1]")
        scores[m] = v
    return SurveyBenchmark(name, scores, count)


def load_survey(path: str | Path) -> SurveyBenchmark:
    return survey_from_dict(_read_json(path))


def save_survey(survey: SurveyBenchmark, path: str | Path) -> None:
    _write_json({"dataset_name": survey.dataset_name,
                 "participant_count": survey.participant_count,
                 "scores": dict(survey.scores)}, path)


# --- reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    board: ScoreBoard
    comparison: ComparisonReport | None = None
    config: dict | None = None


def board_to_dict(board: ScoreBoard) -> dict:
    return {
        "strategy": board.strategy.value,
        "model_ids": list(board.model_ids),
        "raw_totals": dict(board.raw_totals),
        "normalized": dict(board.normalized),
        "mean": dict(board.normalized),
        "std": dict(board.std),
        "ranking": list(board.ranking),
        "ranking_tied": board.ranking_tied,
        "winners": list(board.winners),
        "winner_tied": board.winner_tied,
        "single_repetition": board.single_repetition,
        "repetitions": [
            {
                "raw_totals": dict(r.raw_totals),
                "normalized": dict(r.normalized),
                "pool_size": r.pool_size,
                "skipped": list(r.skipped),
                "window_scores": {w: dict(v) for w, v in r.window_scores.items()},
            }
            for r in board.repetitions
        ],
    }


def board_from_dict(doc: dict) -> ScoreBoard:
    try:
        reps = tuple(
            RepetitionResult(
                raw_totals=dict(r["raw_totals"]),
                normalized=dict(r["normalized"]),
                pool_size=int(r["pool_size"]),
                skipped=tuple(r["skipped"]),
                window_scores={w: dict(v) for w, v in r["window_scores"].items()},
            )
            for r in doc["repetitions"]
        )
        return ScoreBoard(
            strategy=Strategy.parse(doc["strategy"]),
            model_ids=tuple(doc["model_ids"]),
            repetitions=reps,
            raw_totals=dict(doc["raw_totals"]),
            normalized=dict(doc["normalized"]),
            std=dict(doc["std"]),
            ranking=tuple(doc["ranking"]),
            ranking_tied=bool(doc["ranking_tied"]),
            winners=tuple(doc["winners"]),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaViolation("board", f"malformed score board ({exc!r})") from exc


def comparison_to_dict(c: ComparisonReport) -> dict:
    return {
        "dataset_name": c.dataset_name,
        "kendall_tau": c.kendall_tau,
        "exact_rank_match": c.exact_rank_match,
        "per_model_delta": dict(c.per_model_delta),
        "llm_ranking": list(c.llm_ranking),
        "survey_ranking": list(c.survey_ranking),
    }


def comparison_from_dict(doc: dict) -> ComparisonReport:
    try:
        return ComparisonReport(
            kendall_tau=float(doc["kendall_tau"]),
            exact_rank_match=bool(doc["exact_rank_match"]),
            per_model_delta=dict(doc["per_model_delta"]),
            llm_ranking=tuple(doc["llm_ranking"]),
            survey_ranking=tuple(doc["survey_ranking"]),
            dataset_name=str(doc.get("dataset_name", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation("comparison", f"malformed comparison ({exc!r})") from exc


def save_report(board: ScoreBoard, comparison: ComparisonReport | None, path: str | Path,
                config: dict | None = None) -> None:
    doc: dict[str, Any] = {"format": REPORT_FORMAT}
    if config is not None:
        doc["config"] = dict(config)
    doc["board"] = board_to_dict(board)
    if comparison is not None:
        doc["comparison"] = comparison_to_dict(comparison)
    _write_json(doc, path)


def load_report(path: str | Path) -> Report:
    doc = _obj(_read_json(path), "", ("format", "board"), ("config", "comparison"))
    if doc["format"] != REPORT_FORMAT:
        raise SchemaViolation("format", f"unsupported report format {doc['format']!r}")
    comparison = comparison_from_dict(doc["comparison"]) if "comparison" in doc else None
    return Report(board_from_dict(doc["board"]), comparison, doc.get("config"))
