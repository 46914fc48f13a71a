import math

import numpy as np
import pytest

from conftest import make_table
from oracles import wmd as oracle_wmd
from semoverlap.analysis import (
    AlphaProfile,
    EmptyProfileError,
    alpha_profile,
    attribution,
    closest_distances,
    export_profile,
)
from semoverlap.synthetic import random_corpus
from semoverlap.textproc import CorpusPair, tokenize


def doc(*sents):
    return [tokenize(s) for s in sents]


@pytest.fixture
def ruler():
    # q at the origin, documents at distances 0.5, 1.2 and 2.0
    return make_table({"q": [0.0, 0.0], "d1": [0.5, 0.0], "d2": [0.0, 1.2], "d3": [2.0, 0.0], "z": [9.0, 9.0]})


def test_constructed_profile(ruler):
    vectors = {w: ruler.vectors[i] for w, i in ruler.vocab.items()}
    expected = sorted(oracle_wmd(("q",), (d,), vectors) for d in ("d3", "d1", "d2"))[:2]
    assert np.allclose(expected, [0.5, 1.2], atol=1e-12)
    prof = alpha_profile([doc("q")], [doc("d3", "d1", "d2")], 2, ruler)
    assert np.allclose(prof.mean_distances, expected, atol=1e-9, rtol=0)
    assert abs(prof.gap - 0.7) < 1e-9
    assert prof.sentence_count == 1


def test_alpha_one_has_no_gap(ruler):
    prof = alpha_profile([doc("q")], [doc("d1", "d2")], 1, ruler)
    assert prof.gap is None and prof.to_json()["gap"] is None


def test_gold_copy_first_rank_zero(small_vocab_table, rng):
    words = list(small_vocab_table.vocab)
    summaries, documents = [], []
    for rec in random_corpus(rng, words, 10, 8, 3, 6):
        p = CorpusPair.from_record(rec)
        idx = rng.choice(8, size=3, replace=False)
        summaries.append([p.document[i] for i in idx])
        documents.append(p.document)
    prof = alpha_profile(summaries, documents, 4, small_vocab_table)
    assert prof.mean_distances[0] == 0.0
    assert prof.gap == prof.mean_distances[1]
    assert all(x <= y for x, y in zip(prof.mean_distances, prof.mean_distances[1:]))


def test_short_documents_skipped(ruler):
    prof = alpha_profile([doc("q"), doc("q")], [doc("d1"), doc("d1", "d2", "d3")], 2, ruler)
    assert prof.skipped_pairs == 1 and prof.sentence_count == 1


def test_empty_profile(ruler):
    with pytest.raises(EmptyProfileError):
        alpha_profile([doc("q")], [doc("d1")], 3, ruler)


def test_averaging_is_per_sentence(ruler):
    # pair A has two summary sentences, pair B one; the mean weights sentences equally
    prof = alpha_profile([doc("q", "d1"), doc("d3")], [doc("d1", "d2"), doc("d3", "q")], 1, ruler)
    # q->d1 = 0.5, d1->d1 = 0, d3->d3 = 0
    assert abs(prof.mean_distances[0] - 0.5 / 3) < 1e-12


def test_closest_distances_sorted(small_vocab_table, rng):
    words = list(small_vocab_table.vocab)
    rec = random_corpus(rng, words, 1, 9, 2, 5)[0]
    p = CorpusPair.from_record(rec)
    for row in closest_distances(p.summary, p.document, 9, small_vocab_table):
        assert row == sorted(row)


def test_attribution_cases(unit_table):
    rep = attribution([("p", 1, tokenize("cat"), doc("cat", "dog")),
                       ("p", 2, tokenize("bird"), doc("dog", "dog"))], unit_table)
    a, b = rep.records
    assert a.wmd_closer == 0.0 and a.wmd_farther == pytest.approx(math.sqrt(2))
    assert b.wmd_closer == b.wmd_farther


def test_attribution_means_match_oracle(small_vocab_table, rng):
    t = small_vocab_table
    vectors = {w: t.vectors[i] for w, i in t.vocab.items()}
    words = list(t.vocab)
    examples, closer, farther = [], [], []
    for k in range(20):
        gen, s1, s2 = (tuple(rng.choice(words, 5)) for _ in range(3))
        examples.append(("p", k, tokenize(" ".join(gen)), [tokenize(" ".join(s1)), tokenize(" ".join(s2))]))
        d = sorted([oracle_wmd(gen, s1, vectors), oracle_wmd(gen, s2, vectors)])
        closer.append(d[0])
        farther.append(d[1])
    rep = attribution(examples, t)
    assert abs(rep.mean_closer - np.mean(closer)) < 1e-9
    assert abs(rep.mean_farther - np.mean(farther)) < 1e-9
    assert all(r.wmd_closer <= r.wmd_farther for r in rep.records)


def test_attribution_needs_two_sources(unit_table):
    with pytest.raises(ValueError):
        attribution([("p", 1, tokenize("cat"), doc("cat"))], unit_table)


def test_attribution_degenerate_excluded_from_means(unit_table):
    rep = attribution([("p", 1, tokenize("cat"), doc("cat", "zzz")),
                       ("p", 2, tokenize("cat"), doc("dog", "cat"))], unit_table)
    assert rep.records[0].degenerate and rep.count == 1 and rep.skipped == 1
    assert rep.mean_closer == 0.0


def test_export_profile(tmp_path):
    prof = AlphaProfile(3, (0.0, 0.25, 1.5), 4)
    export_profile(prof, tmp_path / "a.csv")
    text = (tmp_path / "a.csv").read_text()
    assert text == "rank,mean_wmd\n1,0.0\n2,0.25\n3,1.5\n"
    export_profile(prof, tmp_path / "b.csv")
    assert (tmp_path / "b.csv").read_bytes() == (tmp_path / "a.csv").read_bytes()


def test_export_empty_profile(tmp_path):
    with pytest.raises(EmptyProfileError):
        export_profile(AlphaProfile(2, (), 0), tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()
