"""Sentence-level trigram-avoidance reranking of beam candidates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .textproc import Sentence


class EmptySlotError(ValueError):
    pass


@dataclass(frozen=True)
class BeamCandidate:
    text: Sentence
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"candidate score must be finite, got {self.score}")


@dataclass(frozen=True)
class RerankResult:
    chosen: tuple[int, ...]
    blocked_slots: tuple[int, ...]

    def to_json(self) -> dict:
        return {"chosen": list(self.chosen), "blocked_slots": list(self.blocked_slots)}


def trigrams(tokens: Sequence[str]) -> list[tuple[str, str, str]]:
    return [tuple(tokens[i : i + 3]) for i in range(len(tokens) - 2)]


def has_repeated_trigram(tokens: Sequence[str], seen: Iterable[tuple] = frozenset()) -> bool:
    """True if a trigram of ``tokens`` is in ``seen`` or occurs twice in ``tokens``."""
    seen = seen if isinstance(seen, (set, frozenset)) else set(seen)
    local: set[tuple] = set()
    for tri in trigrams(tokens):
        if tri in seen or tri in local:
            return True
        local.add(tri)
    return False


def rerank(slots: Sequence[Sequence[BeamCandidate]]) -> RerankResult:
    """Greedy slot-by-slot selection avoiding repeated trigrams.

    Each slot takes its best-scoring candidate (lowest index on score ties) that
    introduces no trigram already emitted and repeats none internally. When
    every candidate collides the best-scoring one is kept and the slot is
    reported in ``blocked_slots``.
    """
    seen: set[tuple] = set()
    chosen: list[int] = []
    blocked: list[int] = []
    for s, cands in enumerate(slots):
        if not cands:
            raise EmptySlotError(f"slot {s} has no candidates")
        order = sorted(range(len(cands)), key=lambda i: (-cands[i].score, i))
        pick = next((i for i in order if not has_repeated_trigram(cands[i].text.tokens, seen)), None)
        if pick is None:
            pick = order[0]
            blocked.append(s)
        chosen.append(pick)
        seen.update(trigrams(cands[pick].text.tokens))
    return RerankResult(tuple(chosen), tuple(blocked))
