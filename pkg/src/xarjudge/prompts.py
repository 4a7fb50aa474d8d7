"""Candidate deduplication, option labelling, and prompt rendering."""

from __future__ import annotations

import hashlib
import random
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import TemplateMissingPlaceholder
from .model import ModelRoster, Strategy, WindowCase

LABELS = string.ascii_uppercase

SECTION_NAMES = ("system", "criteria", "best_among_k", "likert", "user")
SYSTEM_PLACEHOLDERS = ("duration_seconds", "criteria", "format_instruction")
USER_PLACEHOLDERS = ("activity", "options")


@dataclass(frozen=True)
class UniqueOption:
    label: str
    text: str
    contributors: tuple[str, ...]


@dataclass(frozen=True)
class PromptBundle:
    strategy: Strategy
    system_message: str
    user_message: str
    options: tuple[UniqueOption, ...]
    window_id: str

    @property
    def labels(self) -> list[str]:
        return [o.label for o in self.options]


def canonicalize(text: str) -> str:
    """Trim and collapse whitespace runs; case is left alone."""
    return " ".join(text.split())


def deduplicate(case: WindowCase, roster: ModelRoster | None = None,
                shuffle_seed: int | str | None = None) -> list[UniqueOption]:
    """Merge identical explanations into labelled options.

    Contributors follow roster order (candidate order when no roster is
    given). Labels follow first occurrence unless ``shuffle_seed`` is set, in
    which case the option order is shuffled deterministically before labelling.
    """
    order = roster.model_ids if roster is not None else tuple(c.model_id for c in case.candidates)
    texts = {c.model_id: c.text for c in case.candidates}
    groups: dict[str, list[str]] = {}
    display: dict[str, str] = {}
    for mid in order:
        key = canonicalize(texts[mid])
        groups.setdefault(key, []).append(mid)
        display.setdefault(key, key)
    keys = list(groups)
    if shuffle_seed is not None:
        random.Random(f"{shuffle_seed}:{case.window.window_id}").shuffle(keys)
    if len(keys) > len(LABELS):
        raise ValueError(f"at most {len(LABELS)} distinct explanations per window are supported")
    return [UniqueOption(LABELS[i], display[k], tuple(groups[k])) for i, k in enumerate(keys)]


def format_seconds(value: float) -> str:
    return f"{value:g}"


def format_instruction(strategy: Strategy, labels: list[str]) -> str:
    if strategy is Strategy.BEST_AMONG_K:
        return "FINAL: <label>"
    return "SCORES: " + "; ".join(f"{lab}=<n>" for lab in labels)


def render_options(options: list[UniqueOption] | tuple[UniqueOption, ...]) -> str:
    return "\n".join(f"{o.label}) {o.text}" for o in options)


def _placeholders(text: str) -> set[str]:
    # "" stands for a positional "{}" field
    try:
        return {name for _, name, _, _ in string.Formatter().parse(text) if name is not None}
    except ValueError as exc:
        raise TemplateMissingPlaceholder(f"unbalanced braces in template: {exc}") from exc


@dataclass(frozen=True)
class PromptTemplate:
    """Sectioned prompt template; see ``templates/default.txt`` for the layout."""

    sections: dict
    source: str = ""

    @classmethod
    def parse(cls, source: str) -> "PromptTemplate":
        sections: dict[str, list[str]] = {}
        current = None
        for line in source.splitlines():
            stripped = line.strip()
            if stripped.startswith("[") and stripped.endswith("]") and stripped[1:-1] in SECTION_NAMES:
                current = stripped[1:-1]
                sections[current] = []
            elif current is not None:
                sections[current].append(line)
        joined = {name: "\n".join(lines).strip("\n") for name, lines in sections.items()}
        tmpl = cls(joined, source)
        tmpl.check()
        return tmpl

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplate":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "PromptTemplate":
        src = resources.files("xarjudge").joinpath("templates/default.txt").read_text(encoding="utf-8")
        return cls.parse(src)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.source.encode("utf-8")).hexdigest()

    def check(self) -> None:
        for name in SECTION_NAMES:
            if name not in self.sections:
                raise TemplateMissingPlaceholder(f"template has no [{name}] section")
        for strategy in Strategy:
            present = _placeholders(self.system_text(strategy))
            missing = [p for p in SYSTEM_PLACEHOLDERS if p not in present]
            if missing:
                raise TemplateMissingPlaceholder(
                    f"system prompt for {strategy.value} lacks placeholder(s): "
                    + ", ".join("{" + m + "}" for m in missing))
        # [criteria] is inserted as a value, never formatted itself
        allowed = {"system": SYSTEM_PLACEHOLDERS, "best_among_k": SYSTEM_PLACEHOLDERS,
                   "likert": SYSTEM_PLACEHOLDERS, "user": USER_PLACEHOLDERS + ("duration_seconds",)}
        for name, ok in allowed.items():
            unknown = sorted(_placeholders(self.sections[name]) - set(ok))
            if unknown:
                raise TemplateMissingPlaceholder(
                    f"[{name}] uses unknown placeholder(s): " + ", ".join("{" + u + "}" for u in unknown)
                    + " (write literal braces as {{ and }})")
        present = _placeholders(self.sections["user"])
        missing = [p for p in USER_PLACEHOLDERS if p not in present]
        if missing:
            raise TemplateMissingPlaceholder(
                "user prompt lacks placeholder(s): " + ", ".join("{" + m + "}" for m in missing))

    def system_text(self, strategy: Strategy) -> str:
        return self.sections["system"] + "\n\n" + self.sections[strategy.value]


def build_prompt(strategy: Strategy | str, case: WindowCase, options, template: PromptTemplate | None = None) -> PromptBundle:
    strategy = Strategy.parse(strategy)
    template = template or PromptTemplate.default()
    template.check()
    options = tuple(options)
    labels = [o.label for o in options]
    system = template.system_text(strategy).format(
        duration_seconds=format_seconds(case.window.duration_seconds),
        criteria=template.sections["criteria"],
        format_instruction=format_instruction(strategy, labels),
    )
    user = template.sections["user"].format(
        activity=case.window.predicted_activity,
        options=render_options(options),
        duration_seconds=format_seconds(case.window.duration_seconds),
    )
    return PromptBundle(strategy, system, user, options, case.window.window_id)
