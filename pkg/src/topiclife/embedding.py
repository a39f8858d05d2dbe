"""Document embeddings from word vectors, plus optional PCA reduction.

A document vector is the unweighted mean of its in-vocabulary token
vectors. Documents with no in-vocabulary token get a zero row and are
flagged so the clustering stage can set them aside. Precomputed embedding
matrices (for external sentence encoders) are ingested from CSV with a
``doc_id`` column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DataError


@dataclass
class WordVectorTable:
    """Token to vector lookup with a single shared dimensionality."""

    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError("word vector dimension must be >= 2")


@dataclass
class EmbeddingMatrix:
    """Row-aligned document embeddings.

    ``all_oov_mask[i]`` is true when document i had no in-vocabulary token;
    its row is all zeros.
    """

    doc_ids: list[str]
    X: np.ndarray
    all_oov_mask: np.ndarray

    def __post_init__(self) -> None:
        if self.X.shape[0] != len(self.doc_ids):
            raise ValueError("rows must align with doc_ids")
        if not np.isfinite(self.X).all():
            raise ValueError("embedding matrix contains non-finite values")


def load_word_vectors(path) -> WordVectorTable:
    """Load a textual word-vector file: one ``token v1 v2 ... vd`` per line.

    Duplicate tokens keep the last occurrence. Inconsistent dimensions are
    fatal, naming the line.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim < 2:
                    raise DataError(f"word vector file line {lineno}: dimension must be >= 2")
            if len(values) != dim:
                raise DataError(
                    f"word vector file line {lineno}: expected {dim} values, got {len(values)}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise DataError(f"word vector file line {lineno}: non-numeric value") from None
            if token in vectors:
                duplicates += 1
            vectors[token] = vec
    if dim is None:
        raise DataError("word vector file is empty")
    if duplicates:
        import warnings

        warnings.warn(f"{duplicates} duplicate token(s) in word vector file; last wins")
    return WordVectorTable(dim=dim, vectors=vectors)


class WordVectorEmbedder(BaseEstimator, TransformerMixin):
    """Mean-of-token-vectors document embedder.

    Parameters
    ----------
    table : WordVectorTable
        Loaded word vectors. Stateless beyond the table; ``fit`` only
        records it so the class composes with pipeline tooling.
    """

    def __init__(self, table: WordVectorTable | None = None):
        self.table = table

    def fit(self, token_docs, y=None):
        if self.table is None:
            raise ValueError("a WordVectorTable is required")
        self.dim_ = self.table.dim
        return self

    def transform(self, token_docs) -> np.ndarray:
        check_is_fitted(self)
        X = np.zeros((len(token_docs), self.dim_), dtype=np.float64)
        self.all_oov_mask_ = np.zeros(len(token_docs), dtype=bool)
        vectors = self.table.vectors
        for i, tokens in enumerate(token_docs):
            hits = [vectors[t] for t in tokens if t in vectors]
            if hits:
                X[i] = np.mean(hits, axis=0)
            else:
                self.all_oov_mask_[i] = True
        return X


def embed_documents(token_docs, table: WordVectorTable, doc_ids=None) -> EmbeddingMatrix:
    """Embed token lists with :class:`WordVectorEmbedder` and wrap the result."""
    embedder = WordVectorEmbedder(table).fit(token_docs)
    X = embedder.transform(token_docs)
    if doc_ids is None:
        doc_ids = [str(i) for i in range(len(token_docs))]
    return EmbeddingMatrix(doc_ids=list(doc_ids), X=X, all_oov_mask=embedder.all_oov_mask_)


def load_precomputed(path, doc_ids) -> EmbeddingMatrix:
    """Load a precomputed embedding CSV with header ``doc_id,e0,e1,...``.

    Rows are re-aligned to ``doc_ids``. Any missing or unknown document id
    is fatal and the offending ids are listed.
    """
    rows: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "doc_id":
            raise DataError("precomputed embedding CSV must start with a 'doc_id' column")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            values = row[1:]
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise DataError(f"embedding CSV line {lineno}: inconsistent dimension")
            try:
                rows[row[0]] = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise DataError(f"embedding CSV line {lineno}: non-numeric value") from None
    wanted = list(doc_ids)
    missing = [d for d in wanted if d not in rows]
    if missing:
        raise DataError(f"embedding CSV missing document id(s): {', '.join(missing[:10])}")
    extra = [d for d in rows if d not in set(wanted)]
    if extra:
        raise DataError(f"embedding CSV has unknown document id(s): {', '.join(extra[:10])}")
    X = np.vstack([rows[d] for d in wanted]) if wanted else np.zeros((0, dim or 0))
    if not np.isfinite(X).all():
        raise DataError("embedding CSV contains non-finite values")
    mask = np.zeros(len(wanted), dtype=bool)
    return EmbeddingMatrix(doc_ids=wanted, X=X, all_oov_mask=mask)


class PrincipalComponents(BaseEstimator, TransformerMixin):
    """PCA via eigendecomposition of the covariance of mean-centered data.

    Components use a fixed sign convention (the largest-magnitude entry of
    each axis is positive) so results are reproducible across platforms.
    """

    def __init__(self, n_components: int = 2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected a 2D matrix")
        n, d = X.shape
        if self.n_components > d:
            raise ValueError(f"n_components={self.n_components} exceeds input dimension {d}")
        if n < 2:
            raise ValueError("PCA needs at least two rows")
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        cov = centered.T @ centered / (n - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][: self.n_components]
        components = eigvecs[:, order].T
        for i in range(components.shape[0]):
            j = int(np.argmax(np.abs(components[i])))
            if components[i, j] < 0:
                components[i] = -components[i]
        self.components_ = components
        self.explained_variance_ = np.maximum(eigvals[order], 0.0)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = np.asarray(X, dtype=np.float64)
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Y) -> np.ndarray:
        check_is_fitted(self)
        return np.asarray(Y, dtype=np.float64) @ self.components_ + self.mean_


def reduce(matrix: EmbeddingMatrix, method: str = "identity", out_dim: int | None = None) -> EmbeddingMatrix:
    """Apply the configured dimensionality reduction.

    ``identity`` returns the input unchanged (same object). ``pca``
    projects onto the top ``out_dim`` principal axes of the mean-centered
    data.
    """
    method = method.lower()
    if method == "identity":
        return matrix
    if method != "pca":
        raise ValueError(f"unknown reduction method {method!r}")
    if out_dim is None:
        raise ValueError("out_dim is required for PCA")
    pca = PrincipalComponents(n_components=out_dim).fit(matrix.X)
    return EmbeddingMatrix(
        doc_ids=matrix.doc_ids,
        X=pca.transform(matrix.X),
        all_oov_mask=matrix.all_oov_mask.copy(),
    )
