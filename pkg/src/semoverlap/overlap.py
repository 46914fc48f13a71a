"""Sentence-level WMD, the generalized word mover similarity, and the RL reward."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable
from .textproc import NBow, Sentence, to_nbow
from .transport import cost_matrix, solve_exact

DEGENERATE_DISTANCE = math.inf


@dataclass(frozen=True)
class RewardParams:
    """Shape of the similarity transform ``(a+1) / (a + exp(b * wmd))``.

    ``a=1, b=0.5`` are the training defaults; ``a=0, b=1`` gives ``exp(-wmd)``.
    """

    a: float = 1.0
    b: float = 0.5

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be > 0, got {self.b}")


CLASSIC_WMS = RewardParams(a=0.0, b=1.0)


@dataclass(frozen=True)
class OverlapScore:
    wmd: float
    wms: float
    degenerate: bool = False

    def to_json(self) -> dict:
        wmd = "inf" if math.isinf(self.wmd) else self.wmd
        return {"wmd": wmd, "wms": self.wms, "degenerate": self.degenerate}


def wms(wmd: float, params: RewardParams = RewardParams()) -> float:
    if wmd < 0 or math.isnan(wmd):
        raise ValueError(f"wmd must be non-negative, got {wmd}")
    # multiplied through by exp(-b*wmd) so large distances underflow to 0
    # instead of overflowing
    z = math.exp(-params.b * wmd)
    return (params.a + 1.0) * z / (params.a * z + 1.0)


def _canonical(x: NBow) -> NBow:
    # same multiset -> same solver input -> bit-identical distance
    order = np.argsort(x.support, kind="stable")
    return NBow(tuple(x.support[i] for i in order), x.weights[order], x.source_token_count)


def nbow_wmd(x: NBow, y: NBow, table: EmbeddingTable) -> float:
    """Exact WMD between two non-empty nBOWs."""
    x, y = _canonical(x), _canonical(y)
    return solve_exact(x, y, cost_matrix(x, y, table)).objective


def sentence_wmd(x: Sentence, y: Sentence, table: EmbeddingTable,
                 stopwords: frozenset[str] | None = None,
                 params: RewardParams = RewardParams(),
                 degenerate_distance: float = DEGENERATE_DISTANCE) -> OverlapScore:
    """WMD between two sentences.

    If either side has no embedded, non-stopword tokens the score is flagged
    ``degenerate`` and carries ``degenerate_distance`` instead of a solved value.
    """
    nx, ny = to_nbow(x, table, stopwords), to_nbow(y, table, stopwords)
    if nx.empty or ny.empty:
        return OverlapScore(degenerate_distance, wms(degenerate_distance, params), True)
    d = nbow_wmd(nx, ny, table)
    return OverlapScore(d, wms(d, params), False)


def degenerate_score(x_empty: bool, y_empty: bool,
                     degenerate_distance: float = DEGENERATE_DISTANCE) -> OverlapScore:
    # both empty: vacuous identity; one empty: nothing measurable overlaps
    value = 1.0 if (x_empty and y_empty) else 0.0
    return OverlapScore(degenerate_distance, value, True)


def reward(gold: Sentence, generated: Sentence, table: EmbeddingTable,
           params: RewardParams = RewardParams(),
           stopwords: frozenset[str] | None = None) -> OverlapScore:
    """Per-step reward between a gold summary sentence and a generated sentence."""
    ng, nh = to_nbow(gold, table, stopwords), to_nbow(generated, table, stopwords)
    if ng.empty or nh.empty:
        return degenerate_score(ng.empty, nh.empty)
    d = nbow_wmd(ng, nh, table)
    return OverlapScore(d, wms(d, params), False)
