"""Write a synthetic embedding file and corpus for trying the CLI.

    python scripts/make_synthetic_corpus.py --out demo --pairs 200
    semoverlap label demo/corpus.jsonl --embeddings demo/emb.txt --out demo/labels
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from semoverlap.embeddings import save_text_embeddings
from semoverlap.synthetic import random_corpus, random_table, write_jsonl


@dataclass
class CorpusConfig:
    out: Path
    pairs: int = 100
    vocab: int = 2000
    dim: int = 50
    doc_sentences: int = 20
    summary_sentences: int = 4
    sentence_length: int = 30
    copy_prob: float = 0.0
    seed: int = 0


def build(cfg: CorpusConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    table = random_table(cfg.vocab, cfg.dim, rng)
    corpus = random_corpus(rng, list(table.vocab), cfg.pairs, cfg.doc_sentences, cfg.summary_sentences,
                           cfg.sentence_length, cfg.copy_prob)
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_text_embeddings(table, cfg.out / "emb.txt")
    write_jsonl(cfg.out / "corpus.jsonl", corpus)
    write_jsonl(cfg.out / "documents.jsonl", [{"id": r["id"], "document": r["document"]} for r in corpus])
    write_jsonl(cfg.out / "summaries.jsonl", [{"id": r["id"], "summary": r["summary"]} for r in corpus])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, required=True)
    for name, default in vars(CorpusConfig(Path("."))).items():
        if name != "out":
            ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    build(CorpusConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
