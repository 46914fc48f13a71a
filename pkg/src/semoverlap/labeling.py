"""Exemplary-extracted sentence labels and n-to-one paraphraser training pairs.

For every gold summary sentence ``j`` (in order) and every slot ``l = 1..n`` the
document sentence with the smallest exact WMD to summary sentence ``j`` is
selected, skipping sentences already selected anywhere earlier in the pair
(global no-reuse). Ties go to the lowest document index.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np
from scipy.spatial.distance import cdist

from .embeddings import EmbeddingTable
from .overlap import _canonical
from .parallel import ordered_map
from .textproc import DEFAULT_TOKENIZER, CorpusPair, NBow, Sentence, TokenizerConfig, concat_sentences, to_nbow
from .transport import solve_exact

# slack on lower-bound pruning; bounds and exact values are computed along
# different float paths
PRUNE_TOL = 1e-9


class InsufficientDocumentError(ValueError):
    def __init__(self, pair_id: str, j: int, l: int, size: int):
        super().__init__(
            f"pair {pair_id!r}: no unexcluded document sentence left for summary "
            f"sentence {j} slot {l} (document has {size} sentences)"
        )
        self.pair_id, self.j, self.l = pair_id, j, l


@dataclass(frozen=True)
class ExtractionLabels:
    pair_id: str
    k: tuple[tuple[int, ...], ...]  # 0-based document indices, |summary| x n
    n: int
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.pair_id,
            "n": self.n,
            "k": [[i + 1 for i in row] for row in self.k],
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, record: Mapping) -> "ExtractionLabels":
        k = tuple(tuple(i - 1 for i in row) for row in record["k"])
        return cls(record["id"], k, int(record["n"]), tuple(record.get("flags", ())))


@dataclass(frozen=True)
class ParaphraserExample:
    pair_id: str
    j: int  # 0-based summary sentence index
    input: Sentence
    target: Sentence

    def to_json(self) -> dict:
        return {"id": self.pair_id, "j": self.j + 1, "input": self.input.text, "target": self.target.text}


@dataclass(frozen=True)
class LabelError:
    pair_id: str | None
    position: int
    message: str

    def to_json(self) -> dict:
        return {"id": self.pair_id, "position": self.position, "error": self.message}


class PairDistances:
    """Lazy exact WMDs between one pair's summary and document sentences.

    Ground distances are computed once over the union vocabulary of the pair,
    and each (summary, document) solve slices that matrix.
    """

    def __init__(self, pair: CorpusPair, table: EmbeddingTable, stopwords=None):
        self.doc = [_canonical(to_nbow(s, table, stopwords)) for s in pair.document]
        self.summ = [_canonical(to_nbow(s, table, stopwords)) for s in pair.summary]
        ids = sorted({t for nb in self.doc + self.summ for t in nb.support})
        self._pos = {t: p for p, t in enumerate(ids)}
        vecs = table.vectors[ids] if ids else np.zeros((0, table.dim))
        self._ground = cdist(vecs, vecs) if ids else np.zeros((0, 0))
        self._vecs = vecs
        self._cache: dict[tuple[int, int], float] = {}
        self._bounds: dict[tuple[int, int], float] = {}
        self.solves = 0

    def _index(self, nb: NBow) -> list[int]:
        return [self._pos[t] for t in nb.support]

    def costs(self, j: int, i: int) -> np.ndarray:
        return self._ground[np.ix_(self._index(self.summ[j]), self._index(self.doc[i]))]

    def wmd(self, j: int, i: int) -> float:
        key = (j, i)
        if key not in self._cache:
            a, b = self.summ[j], self.doc[i]
            if a.empty or b.empty:
                d = math.inf
            else:
                self.solves += 1
                d = solve_exact(a, b, self.costs(j, i)).objective
            self._cache[key] = d
        return self._cache[key]

    def lower_bound(self, j: int, i: int) -> float:
        key = (j, i)
        if key not in self._bounds:
            a, b = self.summ[j], self.doc[i]
            if a.empty or b.empty:
                self._bounds[key] = math.inf
            else:
                c = self.costs(j, i)
                rwmd = max(a.weights @ c.min(axis=1), b.weights @ c.min(axis=0))
                wcd = np.linalg.norm(a.weights @ self._vecs[self._index(a)]
                                     - b.weights @ self._vecs[self._index(b)])
                # neither bound dominates the other in general; both are valid
                self._bounds[key] = float(max(rwmd, wcd))
        return self._bounds[key]


def _closest(dist: PairDistances, j: int, candidates: list[int], n: int, prune: bool) -> list[int]:
    """The ``n`` candidates with smallest (wmd, index)."""
    if not prune:
        return sorted(candidates, key=lambda i: (dist.wmd(j, i), i))[:n]
    order = sorted(candidates, key=lambda i: (dist.lower_bound(j, i), i))
    best: list[tuple[float, int]] = []  # max-heap of (-wmd, -index)
    for i in order:
        if len(best) == n:
            worst = -best[0][0]
            if dist.lower_bound(j, i) > worst + PRUNE_TOL * (1.0 + worst):
                break
        item = (-dist.wmd(j, i), -i)
        if len(best) < n:
            heapq.heappush(best, item)
        elif item > best[0]:
            heapq.heapreplace(best, item)
    return [i for _, i in sorted((-d, -i) for d, i in best)]


def exemplary_extract(pair: CorpusPair, n: int, table: EmbeddingTable,
                      stopwords: frozenset[str] | None = None, prune: bool = False) -> ExtractionLabels:
    if n < 1:
        raise ValueError("n must be >= 1")
    dist = PairDistances(pair, table, stopwords)
    used: set[int] = set()
    flags: list[str] = []
    rows = []
    for j in range(len(pair.summary)):
        candidates = [i for i in range(len(pair.document)) if i not in used]
        if len(candidates) < n:
            raise InsufficientDocumentError(pair.id, j + 1, len(candidates) + 1, len(pair.document))
        if dist.summ[j].empty:
            picks = candidates[:n]
            flags.append(f"degenerate_summary:{j + 1}")
        else:
            picks = _closest(dist, j, candidates, n, prune)
            for l, i in enumerate(picks, start=1):
                if dist.doc[i].empty:
                    flags.append(f"degenerate_source:{j + 1}:{l}")
        used.update(picks)
        rows.append(tuple(picks))
    return ExtractionLabels(pair.id, tuple(rows), n, tuple(flags))


def build_paraphraser_examples(pair: CorpusPair, labels: ExtractionLabels) -> list[ParaphraserExample]:
    if labels.pair_id != pair.id or len(labels.k) != len(pair.summary):
        raise ValueError(f"labels for {labels.pair_id!r} do not match pair {pair.id!r}")
    examples = []
    for j, row in enumerate(labels.k):
        if any(not 0 <= i < len(pair.document) for i in row):
            raise ValueError(f"pair {pair.id!r}: label index out of range in row {j + 1}")
        src = concat_sentences([pair.document[i] for i in row])
        examples.append(ParaphraserExample(pair.id, j, src, pair.summary[j]))
    return examples


@dataclass
class _LabelJob:
    n: int
    table: EmbeddingTable
    stopwords: frozenset[str] | None
    prune: bool
    tokenizer: TokenizerConfig = field(default=DEFAULT_TOKENIZER)

    def __call__(self, item):
        position, record = item
        try:
            if isinstance(record, Mapping) and "_error" in record:
                raise ValueError(record["_error"])
            pair = record if isinstance(record, CorpusPair) else CorpusPair.from_record(record, self.tokenizer)
            labels = exemplary_extract(pair, self.n, self.table, self.stopwords, self.prune)
            return pair, labels, None
        except ValueError as e:
            pid = getattr(record, "id", None) if isinstance(record, CorpusPair) else (
                record.get("id") if isinstance(record, Mapping) else None)
            return None, None, LabelError(pid if isinstance(pid, str) else None, position, str(e))


def label_corpus_with_pairs(corpus: Iterable, n: int, table: EmbeddingTable,
                            stopwords: frozenset[str] | None = None, pruning: bool = True,
                            workers: int = 1, tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
                            ) -> Iterator[tuple[CorpusPair | None, ExtractionLabels | None, LabelError | None]]:
    """Like :func:`label_corpus`, yielding ``(pair, labels, error)`` per input in input order."""
    job = _LabelJob(n, table, stopwords, pruning, tokenizer)
    yield from ordered_map(job, enumerate(corpus), workers)


def label_corpus(corpus: Iterable, n: int, table: EmbeddingTable,
                 stopwords: frozenset[str] | None = None, pruning: bool = True,
                 workers: int = 1, errors: list | None = None,
                 tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> Iterator[ExtractionLabels]:
    """Label a stream of pairs (``CorpusPair`` or raw corpus records).

    Failing pairs are appended to ``errors`` as :class:`LabelError` and the
    stream continues. Output order follows input order for any worker count.
    """
    for _, labels, err in label_corpus_with_pairs(corpus, n, table, stopwords, pruning, workers, tokenizer):
        if err is not None:
            if errors is not None:
                errors.append(err)
        else:
            yield labels
