"""Pre-trained word embedding tables (GloVe-style text and word2vec binary)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    """Malformed embedding file (bad header, inconsistent dimensionality)."""


class EmptyVocabularyError(ValueError):
    pass


class TruncatedEmbeddingError(OSError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable token -> vector map.

    ``vectors`` is a read-only float64 matrix whose row ``vocab[token]`` holds
    the embedding of ``token``.
    """

    dim: int
    vocab: dict[str, int]
    vectors: np.ndarray
    normalized: bool = False
    duplicates: int = 0
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.vectors.shape != (len(self.vocab), self.dim):
            raise ValueError(
                f"vectors shape {self.vectors.shape} does not match "
                f"vocab size {len(self.vocab)} x dim {self.dim}"
            )
        self.vectors.flags.writeable = False

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def lookup(self, token: str) -> np.ndarray | None:
        idx = self.vocab.get(token)
        return None if idx is None else self.vectors[idx]

    def token_id(self, token: str) -> int | None:
        return self.vocab.get(token)

    def describe(self) -> dict:
        """Metadata for run headers."""
        return {**self.source, "dim": self.dim, "size": len(self), "normalized": self.normalized}


def lookup(table: EmbeddingTable, token: str) -> np.ndarray | None:
    return table.lookup(token)


def _build(tokens, rows, dim, normalize, duplicates, source) -> EmbeddingTable:
    if not tokens:
        raise EmptyVocabularyError(f"no usable embedding records in {source.get('path')}")
    vectors = np.asarray(rows, dtype=np.float64).reshape(len(tokens), dim)
    if normalize:
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        vectors = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    if duplicates:
        log.warning("%d duplicate tokens ignored (first occurrence kept)", duplicates)
    vocab = {tok: i for i, tok in enumerate(tokens)}
    return EmbeddingTable(dim, vocab, vectors, normalize, duplicates, source)


def load_text_embeddings(path, limit: int | None = None, normalize: bool = False) -> EmbeddingTable:
    """Load a whitespace-separated text embedding file.

    ``limit`` caps the number of records read (duplicates count toward it).
    A leading word2vec-style ``"<count> <dim>"`` header line is skipped.
    """
    if limit is not None and limit <= 0:
        raise ValueError("limit must be a positive integer")
    path = Path(path)
    tokens: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dim = None
    duplicates = 0
    records = 0
    with open(path, encoding="utf-8") as f:
        first = True
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if first:
                first = False
                if len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
                    # word2vec text header; the dim check below still applies
                    dim = int(parts[1])
                    continue
            if limit is not None and records >= limit:
                break
            token, values = parts[0], parts[1:]
            if dim is None:
                if not values:
                    raise EmbeddingFormatError(f"{path}:{lineno}: token without vector values")
                dim = len(values)
            elif len(values) != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} values, found {len(values)}"
                )
            try:
                vec = [float(v) for v in values]
            except ValueError as e:
                raise EmbeddingFormatError(f"{path}:{lineno}: {e}") from None
            records += 1
            if token in seen:
                duplicates += 1
                continue
            seen.add(token)
            tokens.append(token)
            rows.append(vec)
    source = {"path": str(path), "format": "text", "limit": limit}
    return _build(tokens, rows, dim or 1, normalize, duplicates, source)


def load_binary_embeddings(path, limit: int | None = None, normalize: bool = False) -> EmbeddingTable:
    """Load a word2vec binary file: ASCII ``"<count> <dim>\\n"`` header, then
    ``count`` records of space-terminated token bytes and ``dim`` little-endian
    float32 values."""
    if limit is not None and limit <= 0:
        raise ValueError("limit must be a positive integer")
    path = Path(path)
    data = path.read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise EmbeddingFormatError(f"{path}: missing header line")
    try:
        count, dim = (int(x) for x in data[:nl].decode("ascii").split())
    except (ValueError, UnicodeDecodeError):
        raise EmbeddingFormatError(f"{path}: malformed header {data[:nl][:64]!r}") from None
    if count < 0 or dim <= 0:
        raise EmbeddingFormatError(f"{path}: malformed header counts {count} {dim}")

    width = 4 * dim
    n_records = count if limit is None else min(count, limit)
    pos = nl + 1
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    duplicates = 0
    for r in range(n_records):
        # some writers put a newline after each vector
        while pos < len(data) and data[pos : pos + 1] == b"\n":
            pos += 1
        end = data.find(b" ", pos)
        if end < 0 or end + 1 + width > len(data):
            needed = (end if end >= 0 else pos) + 1 + width
            raise TruncatedEmbeddingError(
                f"{path}: truncated at record {r + 1} of {count}: "
                f"expected at least {needed} bytes, file has {len(data)}"
            )
        token = data[pos:end].decode("utf-8", errors="replace")
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=end + 1)
        pos = end + 1 + width
        if token in seen:
            duplicates += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(vec)
    source = {"path": str(path), "format": "binary", "limit": limit}
    return _build(tokens, rows, dim, normalize, duplicates, source)


def load_embeddings(path, fmt: str = "text", limit: int | None = None, normalize: bool = False) -> EmbeddingTable:
    if fmt == "text":
        return load_text_embeddings(path, limit, normalize)
    if fmt == "binary":
        return load_binary_embeddings(path, limit, normalize)
    raise ValueError(f"unknown embedding format {fmt!r} (expected 'text' or 'binary')")


def save_text_embeddings(table: EmbeddingTable, path) -> None:
    tokens = sorted(table.vocab, key=table.vocab.__getitem__)
    with open(path, "w", encoding="utf-8") as f:
        for tok in tokens:
            row = table.vectors[table.vocab[tok]]
            f.write(tok + " " + " ".join(repr(float(v)) for v in row) + "\n")


def save_binary_embeddings(table: EmbeddingTable, path) -> None:
    tokens = sorted(table.vocab, key=table.vocab.__getitem__)
    with open(path, "wb") as f:
        f.write(f"{len(tokens)} {table.dim}\n".encode("ascii"))
        for tok in tokens:
            f.write(tok.encode("utf-8") + b" ")
            f.write(table.vectors[table.vocab[tok]].astype("<f4").tobytes())
