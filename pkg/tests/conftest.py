import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from semoverlap.embeddings import EmbeddingTable  # noqa: E402
from semoverlap.synthetic import random_table  # noqa: E402


def make_table(mapping):
    tokens = list(mapping)
    vectors = np.array([mapping[t] for t in tokens], dtype=float)
    return EmbeddingTable(vectors.shape[1], {t: i for i, t in enumerate(tokens)}, vectors)


@pytest.fixture
def unit_table():
    """cat/dog/bird on orthonormal axes."""
    return make_table({"cat": [1.0, 0.0, 0.0], "dog": [0.0, 1.0, 0.0], "bird": [0.0, 0.0, 1.0]})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_vocab_table():
    return random_table(40, 8, np.random.default_rng(7))
