"""Paraphrase-vs-summarize diagnostics.

``alpha_profile`` averages, rank by rank, the distances from each summary
sentence to its alpha closest document sentences. A large jump from rank 1 to
rank 2 means each summary sentence leans on a single source sentence.

``attribution`` measures, for a sentence generated from two concatenated
sources, how far it sits from each source.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .embeddings import EmbeddingTable
from .overlap import _canonical, nbow_wmd
from .parallel import ordered_map
from .textproc import Sentence, to_nbow


class EmptyProfileError(ValueError):
    pass


@dataclass(frozen=True)
class AlphaProfile:
    alpha: int
    mean_distances: tuple[float, ...]
    sentence_count: int
    skipped_pairs: int = 0
    skipped_sentences: int = 0

    @property
    def gap(self) -> float | None:
        if self.alpha < 2 or len(self.mean_distances) < 2:
            return None
        return self.mean_distances[1] - self.mean_distances[0]

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "mean_distances": list(self.mean_distances),
            "gap": self.gap,
            "sentence_count": self.sentence_count,
            "skipped_pairs": self.skipped_pairs,
            "skipped_sentences": self.skipped_sentences,
        }


class _ClosestJob:
    def __init__(self, alpha, table, stopwords):
        self.alpha, self.table, self.stopwords = alpha, table, stopwords

    def __call__(self, item):
        summary, document = item
        docs = [_canonical(to_nbow(s, self.table, self.stopwords)) for s in document]
        docs = [d for d in docs if not d.empty]
        if len(docs) < self.alpha:
            return None, 0
        rows, skipped = [], 0
        for s in summary:
            q = _canonical(to_nbow(s, self.table, self.stopwords))
            if q.empty:
                skipped += 1
                continue
            dists = sorted(nbow_wmd(q, d, self.table) for d in docs)
            rows.append(dists[: self.alpha])
        return rows, skipped


def closest_distances(summary: Sequence[Sentence], document: Sequence[Sentence], alpha: int,
                      table: EmbeddingTable, stopwords: frozenset[str] | None = None) -> list[list[float]]:
    """Per summary sentence, its ``alpha`` smallest WMDs to the document, ascending."""
    rows, _ = _ClosestJob(alpha, table, stopwords)((summary, document))
    return rows or []


def alpha_profile(summaries: Iterable[Sequence[Sentence]], documents: Iterable[Sequence[Sentence]],
                  alpha: int, table: EmbeddingTable, stopwords: frozenset[str] | None = None,
                  workers: int = 1) -> AlphaProfile:
    """Rank-wise mean of closest-sentence distances, averaged over all summary sentences.

    ``summaries`` and ``documents`` are aligned by position. Pairs whose
    document has fewer than ``alpha`` embeddable sentences are skipped, as are
    summary sentences with no embeddable tokens; both are counted.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    items = _strict_zip(summaries, documents)
    columns: list[list[float]] = [[] for _ in range(alpha)]
    skipped_pairs = skipped_sentences = 0
    for rows, skipped in ordered_map(_ClosestJob(alpha, table, stopwords), items, workers):
        if rows is None:
            skipped_pairs += 1
            continue
        skipped_sentences += skipped
        for row in rows:
            for r, d in enumerate(row):
                columns[r].append(d)
    count = len(columns[0])
    if count == 0:
        raise EmptyProfileError(
            f"no eligible summary sentences for alpha={alpha} "
            f"({skipped_pairs} pairs skipped, {skipped_sentences} sentences skipped)"
        )
    means = tuple(math.fsum(col) / count for col in columns)
    return AlphaProfile(alpha, means, count, skipped_pairs, skipped_sentences)


def _strict_zip(a: Iterable, b: Iterable):
    sentinel = object()
    ia, ib = iter(a), iter(b)
    while True:
        x, y = next(ia, sentinel), next(ib, sentinel)
        if x is sentinel and y is sentinel:
            return
        if x is sentinel or y is sentinel:
            raise ValueError("summaries and documents have different lengths")
        yield x, y


@dataclass(frozen=True)
class AttributionRecord:
    pair_id: str
    j: int
    wmd_closer: float
    wmd_farther: float
    degenerate: bool = False

    def to_json(self) -> dict:
        def num(x):
            return "inf" if math.isinf(x) else x

        return {"id": self.pair_id, "j": self.j, "wmd_closer": num(self.wmd_closer),
                "wmd_farther": num(self.wmd_farther), "degenerate": self.degenerate}


@dataclass(frozen=True)
class AttributionReport:
    records: tuple[AttributionRecord, ...]
    mean_closer: float
    mean_farther: float
    count: int  # records entering the means
    skipped: int = 0

    def summary_json(self) -> dict:
        return {"summary": {"mean_closer": self.mean_closer, "mean_farther": self.mean_farther,
                            "mean_gap": self.mean_farther - self.mean_closer,
                            "count": self.count, "skipped_degenerate": self.skipped}}


@dataclass
class _AttributionJob:
    table: EmbeddingTable
    stopwords: frozenset[str] | None = field(default=None)

    def __call__(self, item):
        pair_id, j, generated, sources = item
        if len(sources) != 2:
            raise ValueError(f"{pair_id!r} sentence {j}: expected exactly 2 source sentences, got {len(sources)}")
        g = _canonical(to_nbow(generated, self.table, self.stopwords))
        dists = []
        for s in sources:
            ns = _canonical(to_nbow(s, self.table, self.stopwords))
            dists.append(math.inf if g.empty or ns.empty else nbow_wmd(g, ns, self.table))
        lo, hi = sorted(dists)
        return AttributionRecord(pair_id, j, lo, hi, math.isinf(hi))


def attribution(examples: Iterable[tuple[str, int, Sentence, Sequence[Sentence]]],
                table: EmbeddingTable, stopwords: frozenset[str] | None = None,
                workers: int = 1) -> AttributionReport:
    """WMD from each generated sentence to its two source sentences, sorted.

    ``examples`` yields ``(pair_id, j, generated, (source_a, source_b))``.
    Records with an unembeddable side are kept but left out of the means.
    """
    records = tuple(ordered_map(_AttributionJob(table, stopwords), examples, workers))
    usable = [r for r in records if not r.degenerate]
    if not usable:
        raise EmptyProfileError("no non-degenerate attribution records")
    mc = math.fsum(r.wmd_closer for r in usable) / len(usable)
    mf = math.fsum(r.wmd_farther for r in usable) / len(usable)
    return AttributionReport(records, mc, mf, len(usable), len(records) - len(usable))


def export_profile(profile: AlphaProfile, path) -> None:
    """CSV with columns ``rank,mean_wmd``, one row per rank."""
    if not profile.mean_distances:
        raise EmptyProfileError("cannot export an empty profile")
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["rank", "mean_wmd"])
        for r, d in enumerate(profile.mean_distances, start=1):
            w.writerow([r, repr(d)])
