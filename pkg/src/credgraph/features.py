"""Text and engagement featurization.

Every entity (article body, source homepage text, user profile) is mapped
into one shared input space: a TF-IDF block over a common vocabulary
concatenated with a TF-IDF-weighted mean of pretrained word vectors.
Engagement metadata is a 5-vector: log-scaled elapsed time plus a one-hot
stance block.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import (ARTICLE, SOURCE, USER, NUM_STANCES, NodeId, SocialGraph,
                    Stance)

META_DIM = 1 + NUM_STANCES  # (time, one-hot stance)

# Time feature is ~1 at the two-week mark (336 h), the horizon after which
# engagement analysis bins everything together.
DEFAULT_TIME_SCALE = math.log(1.0 + 336.0)

DEFAULT_VOCAB_SIZE = 5000

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TOKEN_RE = re.compile(r"[^\W_]+")  # word runs: letters/digits, underscore splits


def load_stopwords(path: Optional[str | Path] = None) -> frozenset[str]:
    """Stop-word set from ``path``, or the list shipped with the package."""
    if path is None:
        text = resources.files("credgraph.data").joinpath(
            "stopwords_english.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Lowercase, strip URLs, split on non-alphanumerics, drop stop words."""
    text = _URL_RE.sub(" ", text.lower())
    return [tok for tok in _TOKEN_RE.findall(text) if tok not in stopwords]


def clean_post_text(text: str, stopwords: frozenset[str] = frozenset()) -> str:
    """Normalized text: lowercased, URLs/punctuation/emoji/stop words gone,
    whitespace collapsed to single spaces."""
    return " ".join(tokenize(text, stopwords))


def report_stance_rule(post: str, title: str,
                       stopwords: frozenset[str] = frozenset()) -> bool:
    """True iff the post is a verbatim re-share of the article title,
    up to cleaning (URLs, emoji, punctuation, stop words, case)."""
    return clean_post_text(post, stopwords) == clean_post_text(title, stopwords)


@dataclass(frozen=True)
class TfIdfModel:
    """Vocabulary with document frequencies; tf is a raw count and
    idf = ln(N / df)."""

    vocabulary: tuple[str, ...]
    doc_freq: np.ndarray  # int, aligned with vocabulary
    num_documents: int
    stopwords: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(self.vocabulary) != len(set(self.vocabulary)):
            raise ValueError("vocabulary terms must be unique")

    @property
    def index(self) -> dict[str, int]:
        # computed lazily enough for our sizes; cached via __dict__ trick
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {t: i for i, t in enumerate(self.vocabulary)}
            object.__setattr__(self, "_index", cached)
        return cached

    def idf(self, term: str) -> float:
        i = self.index.get(term)
        if i is None:
            return 0.0
        return math.log(self.num_documents / self.doc_freq[i])

    def weights(self, text: str) -> dict[str, float]:
        """tf * idf for each in-vocabulary term of ``text``."""
        counts = Counter(tokenize(text, self.stopwords))
        out = {}
        for term, tf in counts.items():
            i = self.index.get(term)
            if i is not None:
                out[term] = tf * math.log(self.num_documents / self.doc_freq[i])
        return out

    def transform(self, text: str) -> np.ndarray:
        vec = np.zeros(len(self.vocabulary))
        for term, w in self.weights(text).items():
            vec[self.index[term]] = w
        return vec


def fit_tfidf(corpus: Sequence[str], stopwords: frozenset[str] = frozenset(),
              vocab_size: int = DEFAULT_VOCAB_SIZE) -> TfIdfModel:
    """Fit document frequencies over a corpus; vocabulary keeps the
    ``vocab_size`` most document-frequent terms (ties alphabetical)."""
    if len(corpus) == 0:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(tokenize(doc, stopwords)))
    terms = sorted(df, key=lambda t: (-df[t], t))[:vocab_size]
    terms = sorted(terms)
    return TfIdfModel(
        vocabulary=tuple(terms),
        doc_freq=np.array([df[t] for t in terms], dtype=np.int64),
        num_documents=len(corpus),
        stopwords=stopwords,
    )


class WordEmbeddingTable:
    """Term -> dense vector map; unknown terms fall back to zeros."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int):
        self.dim = dim
        self.vectors = {}
        for term, vec in vectors.items():
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (dim,):
                raise ValueError(f"embedding for {term!r} has shape {vec.shape}, want ({dim},)")
            self.vectors[term] = vec

    def __contains__(self, term: str) -> bool:
        return term in self.vectors

    def lookup(self, term: str) -> np.ndarray:
        vec = self.vectors.get(term)
        if vec is None:
            return np.zeros(self.dim)
        return vec

    @classmethod
    def empty(cls, dim: int) -> "WordEmbeddingTable":
        return cls({}, dim)

    @classmethod
    def load(cls, path: str | Path) -> "WordEmbeddingTable":
        """Read ``term v1 v2 ... vD`` lines (whitespace-separated)."""
        vectors: dict[str, np.ndarray] = {}
        dim = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                term, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                elif len(values) != dim:
                    raise ValueError(
                        f"{path}:{line_no}: expected {dim} values, got {len(values)}")
                vectors[term] = np.array([float(v) for v in values])
        if dim is None:
            raise ValueError(f"{path}: empty embeddings file")
        return cls(vectors, dim)


def entity_features(text: str, tfidf: TfIdfModel, emb: WordEmbeddingTable) -> np.ndarray:
    """Concatenate the TF-IDF vector with the TF-IDF-weighted mean of word
    vectors. Empty or all-out-of-vocabulary text gives an all-zero vector."""
    weights = tfidf.weights(text)
    sparse = np.zeros(len(tfidf.vocabulary))
    semantic = np.zeros(emb.dim)
    mass = 0.0
    for term, w in weights.items():
        sparse[tfidf.index[term]] = w
        semantic += w * emb.lookup(term)
        mass += w
    semantic /= max(1.0, mass)
    return np.concatenate([sparse, semantic])


def engagement_meta(stance: Stance, elapsed_hours: float,
                    time_scale: float = DEFAULT_TIME_SCALE,
                    disable_time: bool = False) -> np.ndarray:
    """Meta vector (time, one-hot stance). Time is ln(1 + hours)/time_scale,
    forced to zero under the time-ablated variant."""
    if elapsed_hours < 0:
        raise ValueError(f"elapsed_hours {elapsed_hours} < 0")
    meta = np.zeros(META_DIM)
    if not disable_time:
        meta[0] = math.log1p(elapsed_hours) / time_scale
    meta[1 + int(stance)] = 1.0
    return meta


# ---------------------------------------------------------------------------
# Whole-graph featurization
# ---------------------------------------------------------------------------

@dataclass
class FeatureTable:
    """Dense feature rows for every node, aligned with a fixed node order."""

    nodes: list[NodeId]
    matrix: np.ndarray  # (num_nodes, input_dim)
    index: dict[NodeId, int]
    tfidf: TfIdfModel
    embeddings: WordEmbeddingTable

    @property
    def input_dim(self) -> int:
        return self.matrix.shape[1]

    def row(self, node: NodeId) -> np.ndarray:
        return self.matrix[self.index[node]]


def build_feature_table(graph: SocialGraph, embeddings: WordEmbeddingTable,
                        stopwords: frozenset[str] = frozenset(),
                        vocab_size: int = DEFAULT_VOCAB_SIZE,
                        tfidf: Optional[TfIdfModel] = None) -> FeatureTable:
    """Fit one shared TF-IDF model over every entity text and featurize all
    nodes, so articles, sources, and users live in one input space."""
    nodes = graph.nodes()
    if tfidf is None:
        corpus = [graph.record(n).text for n in nodes]
        tfidf = fit_tfidf(corpus, stopwords, vocab_size)
    dim = len(tfidf.vocabulary) + embeddings.dim
    matrix = np.zeros((len(nodes), dim))
    for i, node in enumerate(nodes):
        matrix[i] = entity_features(graph.record(node).text, tfidf, embeddings)
    return FeatureTable(
        nodes=nodes,
        matrix=matrix,
        index={n: i for i, n in enumerate(nodes)},
        tfidf=tfidf,
        embeddings=embeddings,
    )
