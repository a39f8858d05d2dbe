"""Class-based TF-IDF topic representations.

Documents of one cluster are concatenated into a single bag of words, term
frequencies are L1-normalized per class, and each term is weighted by
log(1 + A / f) where A is the average token count per class and f the
term's frequency across all classes. Two optional variants: a BM25-style
idf, log(1 + (A - f + 0.5) / (f + 0.5)), and square-root damping of the
normalized term frequency. The top weighted terms per class form the topic
representation used for cross-month comparison.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

Vocabulary = dict[str, int]


@dataclass
class VectorizerConfig:
    ngram_range: tuple[int, int] = (1, 1)
    min_df: int = 5
    max_features: int | None = 170_000

    def __post_init__(self) -> None:
        lo, hi = self.ngram_range
        if not (1 <= lo <= hi):
            raise ValueError("ngram_range must satisfy 1 <= lo <= hi")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")


@dataclass
class CtfidfConfig:
    bm25_weighting: bool = False
    reduce_frequent_words: bool = True


@dataclass
class ClassTermMatrix:
    """Per-class term counts plus the derived c-TF-IDF inputs."""

    counts: np.ndarray
    class_ids: list[int]
    vocabulary: Vocabulary

    @property
    def avg_tokens_per_class(self) -> float:
        return float(self.counts.sum()) / self.counts.shape[0]

    @property
    def term_frequency(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass
class TopicRepresentation:
    """Ranked (term, weight) pairs identifying one topic."""

    topic_id: int
    terms: list[tuple[str, float]] = field(default_factory=list)

    def term_set(self) -> set[str]:
        return {t for t, _ in self.terms}


def _ngrams(tokens: list[str], lo: int, hi: int):
    for size in range(lo, hi + 1):
        for i in range(len(tokens) - size + 1):
            yield "_".join(tokens[i : i + size])


def build_vocabulary(token_docs, config: VectorizerConfig) -> Vocabulary:
    """Select terms by document frequency and corpus frequency.

    Terms must appear in at least ``min_df`` documents; if more than
    ``max_features`` remain, the most frequent win (ties go to the
    lexicographically smaller term). Column indices follow lexicographic
    order.
    """
    lo, hi = config.ngram_range
    doc_freq: dict[str, int] = {}
    corpus_freq: dict[str, int] = {}
    for tokens in token_docs:
        seen = set()
        for gram in _ngrams(list(tokens), lo, hi):
            corpus_freq[gram] = corpus_freq.get(gram, 0) + 1
            seen.add(gram)
        for gram in seen:
            doc_freq[gram] = doc_freq.get(gram, 0) + 1
    candidates = [t for t, df in doc_freq.items() if df >= config.min_df]
    if not candidates:
        raise ValueError("empty vocabulary: min_df too high for this corpus")
    if config.max_features is not None and len(candidates) > config.max_features:
        candidates.sort(key=lambda t: (-corpus_freq[t], t))
        candidates = candidates[: config.max_features]
    return {term: i for i, term in enumerate(sorted(candidates))}


def class_bag_of_words(token_docs, labels, vocabulary: Vocabulary) -> ClassTermMatrix:
    """Count vocabulary terms per class over concatenated documents.

    Outliers must be removed beforehand; a -1 label is an error.
    """
    labels = np.asarray(labels, dtype=int)
    if len(labels) != len(token_docs):
        raise ValueError("labels must align with documents")
    if (labels < 0).any():
        raise ValueError("outlier labels (-1) must be dropped before building class bags")
    class_ids = sorted(int(c) for c in np.unique(labels)) if len(labels) else []
    row_of = {c: i for i, c in enumerate(class_ids)}
    counts = np.zeros((len(class_ids), len(vocabulary)), dtype=np.int64)
    # The vocabulary fixes the n-gram range implicitly: count every
    # contiguous join present as a key.
    max_len = max((term.count("_") + 1 for term in vocabulary), default=1)
    for tokens, label in zip(token_docs, labels):
        row = row_of[int(label)]
        for gram in _ngrams(list(tokens), 1, max_len):
            col = vocabulary.get(gram)
            if col is not None:
                counts[row, col] += 1
    return ClassTermMatrix(counts=counts, class_ids=class_ids, vocabulary=vocabulary)


def ctfidf(matrix: ClassTermMatrix, config: CtfidfConfig | None = None) -> np.ndarray:
    """Compute the class-by-term weight matrix.

    Normalized term frequency is the class row divided by its token count;
    the idf factor is shared by all classes. Flags switch in the BM25 idf
    and the square-root frequency damping independently.
    """
    config = config or CtfidfConfig()
    counts = matrix.counts.astype(np.float64)
    if counts.size == 0:
        return np.zeros_like(counts)
    row_sums = counts.sum(axis=1)
    ntf = np.zeros_like(counts)
    nonzero = row_sums > 0
    ntf[nonzero] = counts[nonzero] / row_sums[nonzero, None]
    if (~nonzero).any():
        warnings.warn("class with no counted terms; its weights are all zero")

    avg = matrix.avg_tokens_per_class
    freq = matrix.term_frequency.astype(np.float64)
    if (freq <= 0).any():
        raise ValueError("every vocabulary term must appear in some class")

    tf_part = np.sqrt(ntf) if config.reduce_frequent_words else ntf
    if config.bm25_weighting:
        argument = (avg - freq + 0.5) / (freq + 0.5)
        if (argument <= -1.0).any():
            raise AssertionError("BM25 idf argument must stay positive")
        idf = np.log1p(argument)
    else:
        idf = np.log1p(avg / freq)
    return tf_part * idf[None, :]


def top_terms(weights: np.ndarray, matrix: ClassTermMatrix, top_k: int = 10) -> list[TopicRepresentation]:
    """Rank terms per class by weight (ties lexicographic); zero-weight terms
    are dropped so sparse classes yield shorter lists."""
    terms = sorted(matrix.vocabulary, key=matrix.vocabulary.get)
    reps = []
    for row, class_id in enumerate(matrix.class_ids):
        scored = [
            (terms[col], float(weights[row, col]))
            for col in range(weights.shape[1])
            if weights[row, col] != 0.0
        ]
        scored.sort(key=lambda tw: (-tw[1], tw[0]))
        reps.append(TopicRepresentation(topic_id=class_id, terms=scored[:top_k]))
    return reps


class ClassTfidf(BaseEstimator):
    """Estimator wrapper: vocabulary, class bags and weights in one fit.

    Parameters mirror the vectorizer and weighting settings so the whole
    representation step can be tuned through ``get_params``/``set_params``.
    """

    def __init__(self, ngram_range=(1, 1), min_df: int = 5, max_features: int | None = 170_000,
                 bm25_weighting: bool = False, reduce_frequent_words: bool = True,
                 top_k: int = 10):
        self.ngram_range = ngram_range
        self.min_df = min_df
        self.max_features = max_features
        self.bm25_weighting = bm25_weighting
        self.reduce_frequent_words = reduce_frequent_words
        self.top_k = top_k

    def fit(self, token_docs, labels):
        vec_config = VectorizerConfig(
            ngram_range=tuple(self.ngram_range),
            min_df=self.min_df,
            max_features=self.max_features,
        )
        self.vocabulary_ = build_vocabulary(token_docs, vec_config)
        self.matrix_ = class_bag_of_words(token_docs, labels, self.vocabulary_)
        self.weights_ = ctfidf(
            self.matrix_,
            CtfidfConfig(
                bm25_weighting=self.bm25_weighting,
                reduce_frequent_words=self.reduce_frequent_words,
            ),
        )
        self.representations_ = top_terms(self.weights_, self.matrix_, self.top_k)
        return self

    def transform(self, token_docs=None):
        check_is_fitted(self)
        return self.weights_
