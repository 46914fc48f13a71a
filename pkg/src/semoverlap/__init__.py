"""Semantic-overlap toolkit for extractor-paraphraser summarization.

WMD-based exemplary extraction labels, the generalized word mover similarity
reward, trigram-blocked reranking, ROUGE/WMS evaluation and closest-sentence
attribution diagnostics.
"""

__version__ = "0.1.0"

from .embeddings import EmbeddingTable, load_binary_embeddings, load_embeddings, load_text_embeddings, lookup
from .textproc import CorpusPair, NBow, Sentence, TokenizerConfig, concat_sentences, to_nbow, tokenize
from .transport import TransportResult, cost_matrix, rwmd_lower_bound, solve_exact, solve_sinkhorn, wcd_lower_bound
from .overlap import OverlapScore, RewardParams, reward, sentence_wmd, wms
from .labeling import ExtractionLabels, ParaphraserExample, build_paraphraser_examples, exemplary_extract, label_corpus
from .decoding import BeamCandidate, RerankResult, has_repeated_trigram, rerank
from .metrics import CorpusReport, RougeScores, evaluate_corpus, rouge_l, rouge_n, summary_wms
from .analysis import AlphaProfile, AttributionRecord, alpha_profile, attribution, export_profile

__all__ = [
    "EmbeddingTable", "load_binary_embeddings", "load_embeddings", "load_text_embeddings", "lookup",
    "CorpusPair", "NBow", "Sentence", "TokenizerConfig", "concat_sentences", "to_nbow", "tokenize",
    "TransportResult", "cost_matrix", "rwmd_lower_bound", "solve_exact", "solve_sinkhorn", "wcd_lower_bound",
    "OverlapScore", "RewardParams", "reward", "sentence_wmd", "wms",
    "ExtractionLabels", "ParaphraserExample", "build_paraphraser_examples", "exemplary_extract", "label_corpus",
    "BeamCandidate", "RerankResult", "has_repeated_trigram", "rerank",
    "CorpusReport", "RougeScores", "evaluate_corpus", "rouge_l", "rouge_n", "summary_wms",
    "AlphaProfile", "AttributionRecord", "alpha_profile", "attribution", "export_profile",
]
