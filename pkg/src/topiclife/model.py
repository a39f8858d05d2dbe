"""Single-month topic model: cluster embedded documents, then represent
each cluster by its top class-based TF-IDF terms.

Documents whose embedding row is all zeros (no in-vocabulary token) are
set aside before clustering and labeled -1, since a pile of identical zero
vectors would otherwise form a meaningless cluster of its own.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .cluster import HDBSCAN, KMeans
from .represent import (
    ClassTermMatrix,
    CtfidfConfig,
    TopicRepresentation,
    VectorizerConfig,
    build_vocabulary,
    class_bag_of_words,
    ctfidf,
    top_terms,
)


class MonthlyTopicModel(BaseEstimator):
    """Cluster one month's documents and build topic representations.

    Parameters
    ----------
    algorithm : "hdbscan" or "kmeans"
    min_cluster_size, min_samples : HDBSCAN settings.
    k, seed, max_iter, tol : KMeans settings; the seed also fixes any
        randomness so a fit is reproducible.
    ngram_range, min_df, max_features : vocabulary settings. The
        vocabulary is built only from documents assigned to a cluster.
    bm25_weighting, reduce_frequent_words : c-TF-IDF variants.
    top_k : representation length.
    """

    def __init__(self, algorithm: str = "hdbscan", min_cluster_size: int = 10,
                 min_samples: int | None = None, k: int = 8, seed: int = 0,
                 max_iter: int = 300, tol: float = 1e-4,
                 ngram_range=(1, 1), min_df: int = 5, max_features: int | None = 170_000,
                 bm25_weighting: bool = False, reduce_frequent_words: bool = True,
                 top_k: int = 10):
        self.algorithm = algorithm
        self.min_cluster_size = min_cluster_size
        self.min_samples = min_samples
        self.k = k
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol
        self.ngram_range = ngram_range
        self.min_df = min_df
        self.max_features = max_features
        self.bm25_weighting = bm25_weighting
        self.reduce_frequent_words = reduce_frequent_words
        self.top_k = top_k

    def fit(self, token_docs, embeddings, all_oov_mask=None):
        embeddings = np.asarray(embeddings, dtype=np.float64)
        if len(token_docs) != embeddings.shape[0]:
            raise ValueError("token_docs must align with embedding rows")
        n = len(token_docs)
        if all_oov_mask is None:
            all_oov_mask = np.zeros(n, dtype=bool)
        else:
            all_oov_mask = np.asarray(all_oov_mask, dtype=bool)

        labels = np.full(n, -1, dtype=int)
        usable = np.nonzero(~all_oov_mask)[0]
        if usable.size:
            if self.algorithm == "hdbscan":
                clusterer = HDBSCAN(
                    min_cluster_size=self.min_cluster_size,
                    min_samples=self.min_samples,
                )
            elif self.algorithm == "kmeans":
                clusterer = KMeans(
                    k=min(self.k, usable.size),
                    seed=self.seed,
                    max_iter=self.max_iter,
                    tol=self.tol,
                )
            else:
                raise ValueError(f"unknown clustering algorithm {self.algorithm!r}")
            clusterer.fit(embeddings[usable])
            labels[usable] = clusterer.labels_

        self.labels_ = labels
        clustered = labels >= 0
        self.n_outliers_ = int((~clustered).sum())
        self.topics_: list[TopicRepresentation] = []
        self.class_matrix_: ClassTermMatrix | None = None
        self.weights_ = None
        if clustered.any():
            docs_in = [token_docs[i] for i in np.nonzero(clustered)[0]]
            labels_in = labels[clustered]
            vocabulary = build_vocabulary(
                docs_in,
                VectorizerConfig(
                    ngram_range=tuple(self.ngram_range),
                    min_df=self.min_df,
                    max_features=self.max_features,
                ),
            )
            self.class_matrix_ = class_bag_of_words(docs_in, labels_in, vocabulary)
            self.weights_ = ctfidf(
                self.class_matrix_,
                CtfidfConfig(
                    bm25_weighting=self.bm25_weighting,
                    reduce_frequent_words=self.reduce_frequent_words,
                ),
            )
            self.topics_ = top_terms(self.weights_, self.class_matrix_, self.top_k)
        self.n_topics_ = len(self.topics_)
        return self

    def topic_sizes(self) -> dict[int, int]:
        check_is_fitted(self)
        sizes: dict[int, int] = {}
        for label in self.labels_:
            if label >= 0:
                sizes[int(label)] = sizes.get(int(label), 0) + 1
        return sizes
