"""ROUGE-1/2/L and summary-level word mover similarity."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .embeddings import EmbeddingTable
from .overlap import CLASSIC_WMS, OverlapScore, degenerate_score, nbow_wmd, wms
from .parallel import ordered_map
from .textproc import Sentence, concat_sentences, to_nbow


class AlignmentError(ValueError):
    def __init__(self, missing_candidates: list[str], missing_references: list[str], duplicates: list[str] = ()):
        parts = []
        if missing_candidates:
            parts.append(f"ids missing from candidates: {missing_candidates}")
        if missing_references:
            parts.append(f"ids missing from references: {missing_references}")
        if duplicates:
            parts.append(f"duplicate ids: {list(duplicates)}")
        super().__init__("; ".join(parts) or "no pairs to score")
        self.missing_candidates = list(missing_candidates)
        self.missing_references = list(missing_references)
        self.duplicates = list(duplicates)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f: float

    @classmethod
    def from_counts(cls, hits: int, cand_total: int, ref_total: int) -> "PRF":
        p = hits / cand_total if cand_total else 0.0
        r = hits / ref_total if ref_total else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f)

    def to_json(self) -> dict:
        return {"p": self.precision, "r": self.recall, "f": self.f}


@dataclass(frozen=True)
class RougeScores:
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF

    @property
    def rouge1_f(self) -> float:
        return self.rouge1.f

    @property
    def rouge2_f(self) -> float:
        return self.rouge2.f

    @property
    def rougeL_f(self) -> float:
        return self.rougeL.f

    def to_json(self) -> dict:
        return {"rouge1": self.rouge1.to_json(), "rouge2": self.rouge2.to_json(), "rougeL": self.rougeL.to_json()}


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _flat(sentences: Sequence[Sentence]) -> list[str]:
    return [t for s in sentences for t in s.tokens]


def rouge_n(candidate: Sequence[Sentence], reference: Sequence[Sentence], n: int) -> PRF:
    """Clipped n-gram overlap over the concatenated token sequences."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c, r = _ngrams(_flat(candidate), n), _ngrams(_flat(reference), n)
    hits = sum((c & r).values())
    return PRF.from_counts(hits, sum(c.values()), sum(r.values()))


def _lcs_positions(x: Sequence[str], y: Sequence[str]) -> set[int]:
    """Indices into ``x`` of one longest common subsequence with ``y``."""
    m, n = len(x), len(y)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m):
        xi, row, nxt = x[i], table[i], table[i + 1]
        for j in range(n):
            nxt[j + 1] = row[j] + 1 if xi == y[j] else max(row[j + 1], nxt[j])
    out = set()
    i, j = m, n
    while i > 0 and j > 0:
        if x[i - 1] == y[j - 1]:
            out.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return out


def rouge_l(candidate: Sequence[Sentence], reference: Sequence[Sentence]) -> PRF:
    """Summary-level ROUGE-L with union LCS.

    For each reference sentence the LCS positions against every candidate
    sentence are unioned; a unioned token counts as a hit only while unused
    occurrences of it remain on both sides, so no token is credited twice.
    """
    ref_counts = Counter(_flat(reference))
    cand_counts = Counter(_flat(candidate))
    ref_total, cand_total = sum(ref_counts.values()), sum(cand_counts.values())
    hits = 0
    for ref in reference:
        union: set[int] = set()
        for cand in candidate:
            union |= _lcs_positions(ref.tokens, cand.tokens)
        for pos in sorted(union):
            tok = ref.tokens[pos]
            if ref_counts[tok] > 0 and cand_counts[tok] > 0:
                hits += 1
                ref_counts[tok] -= 1
                cand_counts[tok] -= 1
    return PRF.from_counts(hits, cand_total, ref_total)


def rouge(candidate: Sequence[Sentence], reference: Sequence[Sentence]) -> RougeScores:
    return RougeScores(rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2), rouge_l(candidate, reference))


def summary_wms(candidate: Sequence[Sentence], reference: Sequence[Sentence], table: EmbeddingTable,
                stopwords: frozenset[str] | None = None) -> OverlapScore:
    """``exp(-WMD)`` between whole-summary nBOWs (each side concatenated)."""
    nc = to_nbow(concat_sentences(list(candidate)), table, stopwords) if candidate else None
    nr = to_nbow(concat_sentences(list(reference)), table, stopwords) if reference else None
    c_empty = nc is None or nc.empty
    r_empty = nr is None or nr.empty
    if c_empty or r_empty:
        return degenerate_score(c_empty, r_empty)
    d = nbow_wmd(nc, nr, table)
    return OverlapScore(d, wms(d, CLASSIC_WMS), False)


@dataclass(frozen=True)
class PairScores:
    id: str
    rouge: RougeScores
    wms: OverlapScore

    def to_json(self) -> dict:
        return {"id": self.id, **self.rouge.to_json(), "wms": self.wms.to_json()}


@dataclass(frozen=True)
class CorpusReport:
    pairs: tuple[PairScores, ...]
    means: dict[str, float]

    @property
    def count(self) -> int:
        return len(self.pairs)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "means": dict(self.means),
            # table-style presentation, scores x 100
            "means_x100": {k: 100.0 * v for k, v in self.means.items()},
            "pairs": [p.to_json() for p in self.pairs],
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["id", "rouge1_f", "rouge2_f", "rougeL_f", "wms", "wmd", "degenerate"])
            for p in self.pairs:
                w.writerow([p.id, repr(p.rouge.rouge1_f), repr(p.rouge.rouge2_f), repr(p.rouge.rougeL_f),
                            repr(p.wms.wms), repr(p.wms.wmd), int(p.wms.degenerate)])


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values)


class _ScoreJob:
    def __init__(self, table, stopwords):
        self.table, self.stopwords = table, stopwords

    def __call__(self, item):
        pid, cand, ref = item
        return PairScores(pid, rouge(cand, ref), summary_wms(cand, ref, self.table, self.stopwords))


def evaluate_corpus(candidates: Iterable[tuple[str, Sequence[Sentence]]],
                    references: Iterable[tuple[str, Sequence[Sentence]]],
                    table: EmbeddingTable, stopwords: frozenset[str] | None = None,
                    workers: int = 1) -> CorpusReport:
    """Score ``(id, sentences)`` candidates against references with the same ids.

    Pairs are reported in candidate order.
    """
    cand_list = list(candidates)
    ref_map: dict[str, Sequence[Sentence]] = {}
    dups = []
    for pid, sents in references:
        if pid in ref_map:
            dups.append(pid)
        ref_map[pid] = sents
    cand_ids = [pid for pid, _ in cand_list]
    seen = set()
    for pid in cand_ids:
        if pid in seen:
            dups.append(pid)
        seen.add(pid)
    missing_refs = [pid for pid in cand_ids if pid not in ref_map]
    missing_cands = [pid for pid in ref_map if pid not in seen]
    if missing_refs or missing_cands or dups:
        raise AlignmentError(missing_cands, missing_refs, dups)
    if not cand_list:
        raise AlignmentError([], [])
    jobs = [(pid, cand, ref_map[pid]) for pid, cand in cand_list]
    pairs = tuple(ordered_map(_ScoreJob(table, stopwords), jobs, workers))
    means = {
        "rouge1": _mean([p.rouge.rouge1_f for p in pairs]),
        "rouge2": _mean([p.rouge.rouge2_f for p in pairs]),
        "rougeL": _mean([p.rouge.rougeL_f for p in pairs]),
        "wms": _mean([p.wms.wms for p in pairs]),
    }
    return CorpusReport(pairs, means)
