"""Deterministic ranking of models by score and Kendall rank correlation."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import NotSamePermutationDomain, RosterMismatch, TooFewItems
from .model import ModelRoster


@dataclass(frozen=True)
class Ranking:
    """Models best first. ``tied`` lists groups that share an exact score."""

    order: tuple[str, ...]
    tied: tuple[tuple[str, ...], ...] = ()

    @property
    def has_ties(self) -> bool:
        return bool(self.tied)

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, i):
        return self.order[i]


def _ids(roster: ModelRoster | Sequence[str]) -> tuple[str, ...]:
    return tuple(roster.model_ids) if isinstance(roster, ModelRoster) else tuple(roster)


def rank_models(scores: Mapping[str, float], roster: ModelRoster | Sequence[str]) -> Ranking:
    """Sort descending by score; exact ties keep roster order and are flagged."""
    ids = _ids(roster)
    if set(scores) != set(ids) or len(scores) != len(ids):
        raise RosterMismatch(f"score keys {sorted(scores)} do not match roster {list(ids)}")
    position = {m: i for i, m in enumerate(ids)}
    order = tuple(sorted(ids, key=lambda m: (-scores[m], position[m])))
    groups: dict[float, list[str]] = {}
    for m in order:
        groups.setdefault(scores[m], []).append(m)
    tied = tuple(tuple(g) for g in groups.values() if len(g) > 1)
    return Ranking(order, tied)


def kendall_tau(ranking_a: Sequence[str], ranking_b: Sequence[str]) -> float:
    """Kendall tau-a between two strict rankings of the same items."""
    a, b = list(ranking_a), list(ranking_b)
    if len(set(a)) != len(a) or len(set(b)) != len(b) or set(a) != set(b):
        raise NotSamePermutationDomain("rankings must be permutations of the same id set")
    n = len(a)
    if n < 2:
        raise TooFewItems("kendall tau needs at least two items")
    pos_b = {m: i for i, m in enumerate(b)}
    # a lists items in its own rank order, so each pair is concordant iff b agrees
    concordant = sum(1 for x, y in combinations(a, 2) if pos_b[x] < pos_b[y])
    pairs = n * (n - 1) // 2
    return (2 * concordant - pairs) / pairs
