"""Activity-balanced synthetic pools with a known quality ordering.

Every window holds events that fit its activity plus a couple of unrelated
distractors. The model ranked first in the quality order cites all of the
fitting events; each following model cites strictly fewer of them and pads
with distractors, so the last one cites only distractors. With
``duplicate_rate > 0`` a model occasionally emits exactly the same text as the
model ranked just above it, which exercises deduplication and keeps
Best-Among-K totals from collapsing to a single non-zero model.
"""

from __future__ import annotations

import random

from .errors import InvalidQualityOrder
from .model import (
    EvaluationPool,
    EventWindow,
    ExplanationCandidate,
    HighLevelEvent,
    ModelRoster,
    QualityKey,
    WindowCase,
)

DEFAULT_DUPLICATE_RATE = 0.25
DURATIONS = (30, 60, 90, 120)
N_DISTRACTORS = 2

EVENT_VOCABULARY = {
    "cooking": ["stove turned on", "fridge opened", "kitchen cabinet opened",
                "pantry drawer opened", "motion in the kitchen", "oven turned on"],
    "eating": ["dining chair occupied", "motion near the dining table",
               "cutlery drawer opened", "fridge opened", "plate cabinet opened"],
    "sleeping": ["bed pressure detected", "bedroom light turned off",
                 "motion in the bedroom", "bedroom door closed", "bedside lamp turned off"],
    "taking medicines": ["medicine cabinet opened", "water tap opened",
                         "glass cabinet opened", "motion in the kitchen", "pill box opened"],
    "washing dishes": ["kitchen tap opened", "dishwasher opened", "motion near the sink",
                       "dish rack moved", "kitchen light turned on"],
    "watching tv": ["tv turned on", "sofa occupied", "motion in the living room",
                    "living room light turned on", "remote control moved"],
    "bathing": ["shower tap opened", "bathroom door closed", "motion in the bathroom",
                "bathroom light turned on", "water heater turned on"],
    "reading": ["armchair occupied", "reading lamp turned on", "bookshelf door opened",
                "motion in the study"],
    "leaving home": ["front door opened", "motion in the hallway", "key hook emptied",
                     "front door closed"],
    "work": ["desk chair occupied", "office light turned on", "motion in the office",
             "office door closed"],
}

GENERIC_DISTRACTORS = ["garage door opened", "laundry machine turned on",
                       "motion in the garden", "hallway light turned on",
                       "window in the guest room opened", "doorbell pressed"]

SUBJECTS = ("Anna", "Marco", "the resident", "the subject")


def _relevant_events(activity: str, n: int) -> list[str]:
    vocab = EVENT_VOCABULARY.get(activity.strip().lower())
    if vocab is None:
        place = activity.strip().lower()
        vocab = [f"{place} area motion", f"{place} appliance in use",
                 f"{place} door opened", f"{place} light turned on",
                 f"{place} object moved"]
    while len(vocab) < n:
        vocab = vocab + [f"{e} again" for e in vocab]
    return vocab


def _distractor_pool(activity: str, roster: ModelRoster) -> list[str]:
    own = set(_relevant_events(activity, 0))
    out = list(GENERIC_DISTRACTORS)
    for other in roster.activity_set:
        if other != activity:
            out += [e for e in EVENT_VOCABULARY.get(other.strip().lower(), []) if e not in own]
    return [e for e in dict.fromkeys(out) if e not in own]


def _join(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def _explanation(subject: str, activity: str, cited: list[str]) -> str:
    return f"I predicted that {subject} was {activity.lower()} mainly because of: {_join(cited)}."


def generate_synthetic_pool(roster: ModelRoster, per_activity: int, seed: int,
                            quality_order, duplicate_rate: float = DEFAULT_DUPLICATE_RATE
                            ) -> tuple[EvaluationPool, QualityKey]:
    """Return ``(pool, quality_key)`` with ``per_activity`` windows per activity."""
    order = tuple(quality_order)
    if sorted(order) != sorted(roster.model_ids) or len(set(order)) != len(order):
        raise InvalidQualityOrder(
            f"quality order {list(order)} is not a permutation of {list(roster.model_ids)}")
    if per_activity < 1:
        raise ValueError("per_activity must be >= 1")
    if not 0 <= duplicate_rate <= 1:
        raise ValueError("duplicate_rate must be within [0, 1]")

    rng = random.Random(seed)
    k = len(order)
    n_relevant = max(3, k - 1)
    cases = []
    for a_idx, activity in enumerate(roster.activity_set):
        distractors = _distractor_pool(activity, roster)
        for i in range(per_activity):
            relevant = rng.sample(_relevant_events(activity, n_relevant), n_relevant)
            noise = rng.sample(distractors, N_DISTRACTORS)
            duration = rng.choice(DURATIONS)
            offsets = sorted(rng.uniform(0, duration) for _ in range(n_relevant + N_DISTRACTORS))
            shuffled = relevant + noise
            rng.shuffle(shuffled)
            events = tuple(HighLevelEvent(name, round(off, 1)) for name, off in zip(shuffled, offsets))
            subject = rng.choice(SUBJECTS)

            texts: dict[str, str] = {}
            for rank, model_id in enumerate(order):
                if rank > 0 and rng.random() < duplicate_rate:
                    texts[model_id] = texts[order[rank - 1]]
                    continue
                # strictly fewer fitting events per rank; the last rank cites none
                n_cited = round(n_relevant * (k - 1 - rank) / (k - 1)) if k > 1 else n_relevant
                cited = relevant[:n_cited] + noise[:min(N_DISTRACTORS, n_relevant - n_cited)]
                texts[model_id] = _explanation(subject, activity, cited)

            window_id = f"w{a_idx + 1:02d}-{_slug(activity)}-{i + 1:03d}"
            window = EventWindow(window_id, float(duration), activity, events)
            cands = tuple(ExplanationCandidate(m, texts[m]) for m in roster.model_ids)
            cases.append(WindowCase(window, cands))
    return EvaluationPool(roster, tuple(cases)), QualityKey(order)


def _slug(text: str) -> str:
    return "-".join("".join(ch if ch.isalnum() else " " for ch in text.lower()).split()) or "activity"
