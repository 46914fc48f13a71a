"""Time corpus labelling with and without lower-bound pruning.

Reports pairs per second and the number of exact transport solves, which is
where pruning saves work.
"""

import argparse
import time
from dataclasses import dataclass

import numpy as np

from semoverlap.labeling import PairDistances, _closest, label_corpus
from semoverlap.synthetic import random_corpus, random_table
from semoverlap.textproc import CorpusPair


@dataclass
class Bench:
    pairs: int = 1000
    doc_sentences: int = 20
    summary_sentences: int = 4
    sentence_length: int = 30
    dim: int = 50
    vocab: int = 5000
    n: int = 1
    workers: int = 1
    seed: int = 0


def count_solves(corpus, bench, table, prune):
    # serial pass that reuses the selection routine to count exact solves
    solves = 0
    for rec in corpus:
        pair = CorpusPair.from_record(rec)
        dist = PairDistances(pair, table)
        free = list(range(len(pair.document)))
        for j in range(len(pair.summary)):
            chosen = _closest(dist, j, free, bench.n, prune)
            free = [i for i in free if i not in chosen]
        solves += dist.solves
    return solves


def run(bench: Bench) -> None:
    rng = np.random.default_rng(bench.seed)
    table = random_table(bench.vocab, bench.dim, rng)
    corpus = random_corpus(rng, list(table.vocab), bench.pairs, bench.doc_sentences, bench.summary_sentences,
                           bench.sentence_length)
    for prune in (True, False):
        t0 = time.perf_counter()
        n_out = sum(1 for _ in label_corpus(corpus, bench.n, table, pruning=prune, workers=bench.workers))
        secs = time.perf_counter() - t0
        sample = corpus[: min(100, len(corpus))]
        solves = count_solves(sample, bench, table, prune)
        print(f"prune={prune!s:5}  pairs={n_out}  {secs:7.2f}s  {n_out / secs:8.1f} pairs/s  "
              f"exact solves per pair (first {len(sample)}): {solves / len(sample):.1f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Bench()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    run(Bench(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
