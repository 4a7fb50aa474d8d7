"""Exception hierarchy shared by every stage of the judging pipeline."""

from __future__ import annotations


class XarJudgeError(Exception):
    """Base class for all errors raised by xarjudge."""


# --- pool loading / generation ---------------------------------------------


class MalformedDocument(XarJudgeError, ValueError):
    """The file is not syntactically valid JSON."""


class SchemaViolation(XarJudgeError, ValueError):
    """A JSON document has missing, extra, or mistyped fields."""

    def __init__(self, field_path: str, message: str) -> None:
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


class InvariantViolation(XarJudgeError, ValueError):
    """A structurally valid pool breaks one or more domain invariants."""

    def __init__(self, violations) -> None:
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} invariant violation(s): {lines}")


class IoFailure(XarJudgeError, OSError):
    """Writing an output file failed."""


class InvalidQualityOrder(XarJudgeError, ValueError):
    """The quality ordering is not a permutation of the roster."""


# --- prompts -----------------------------------------------------------------


class TemplateMissingPlaceholder(XarJudgeError, ValueError):
    """A prompt template lacks a required ``{placeholder}`` or section."""


# --- judge backends ----------------------------------------------------------


class JudgeError(XarJudgeError):
    """Base class for judge backend failures."""


class BackendUnavailable(JudgeError):
    """Transient failures persisted through every allowed attempt."""


class AuthFailure(JudgeError):
    """The endpoint rejected (or we lack) the API credential."""


class EmptyCompletion(JudgeError):
    """The backend answered but the completion text was empty."""


class UnknownModel(JudgeError, KeyError):
    """The mock judge was asked about a model absent from its oracle."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


# --- verdict parsing ---------------------------------------------------------


class VerdictError(XarJudgeError, ValueError):
    """The judge completion could not be turned into a verdict."""


class MissingFinalLine(VerdictError):
    pass


class MalformedFinalLine(VerdictError):
    """A final-line marker was found but its payload could not be lexed."""


class UnknownLabel(VerdictError):
    pass


class IncompleteScores(VerdictError):
    pass


class OutOfRangeScore(VerdictError):
    pass


class StrategyMismatch(VerdictError):
    pass


# --- scoring / comparison ----------------------------------------------------


class ScoringError(XarJudgeError, ValueError):
    pass


class LabelNotFound(ScoringError):
    pass


class RosterMismatch(ScoringError):
    pass


class OutOfRangeTotal(ScoringError):
    pass


class EmptyPool(ScoringError):
    pass


class WindowEvaluationError(XarJudgeError):
    """Judging one window failed for good; names the window and keeps the cause."""

    def __init__(self, window_id: str, cause: Exception) -> None:
        super().__init__(f"window {window_id!r}: {type(cause).__name__}: {cause}")
        self.window_id = window_id
        self.cause = cause


class ModelSetMismatch(XarJudgeError, ValueError):
    pass


class NotSamePermutationDomain(XarJudgeError, ValueError):
    pass


class TooFewItems(XarJudgeError, ValueError):
    pass
