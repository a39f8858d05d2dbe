import math

import numpy as np
import pytest

from topiclife.represent import (
    ClassTermMatrix,
    CtfidfConfig,
    VectorizerConfig,
    build_vocabulary,
    class_bag_of_words,
    ctfidf,
    top_terms,
)


def ctfidf_reference(counts, bm25, reduce_frequent):
    """Direct per-entry evaluation of the weighting formulas."""
    counts = np.asarray(counts, float)
    n_classes, n_terms = counts.shape
    avg = counts.sum() / n_classes
    freq = counts.sum(axis=0)
    out = np.zeros_like(counts)
    for c in range(n_classes):
        row_total = counts[c].sum()
        for x in range(n_terms):
            ntf = counts[c, x] / row_total if row_total else 0.0
            tf_part = math.sqrt(ntf) if reduce_frequent else ntf
            if bm25:
                idf = math.log(1.0 + (avg - freq[x] + 0.5) / (freq[x] + 0.5))
            else:
                idf = math.log(1.0 + avg / freq[x])
            out[c, x] = tf_part * idf
    return out


def matrix_from_counts(counts):
    counts = np.asarray(counts, dtype=np.int64)
    vocab = {f"t{j:02d}": j for j in range(counts.shape[1])}
    return ClassTermMatrix(counts=counts, class_ids=list(range(counts.shape[0])), vocabulary=vocab)


class TestBuildVocabulary:
    def test_min_df_filters(self):
        vocab = build_vocabulary([["a", "b"], ["a", "c"]], VectorizerConfig(min_df=2))
        assert vocab == {"a": 0}

    def test_bigram_candidates(self):
        vocab = build_vocabulary([["a", "b"]], VectorizerConfig(ngram_range=(1, 2), min_df=1))
        assert set(vocab) == {"a", "b", "a_b"}

    def test_max_features_by_frequency(self):
        vocab = build_vocabulary([["a", "a"], ["b"]], VectorizerConfig(min_df=1, max_features=1))
        assert set(vocab) == {"a"}

    def test_empty_vocabulary_raises(self):
        with pytest.raises(ValueError, match="min_df"):
            build_vocabulary([["a"], ["b"]], VectorizerConfig(min_df=3))

    def test_lexicographic_indexing(self):
        vocab = build_vocabulary([["c", "a", "b"]], VectorizerConfig(min_df=1))
        assert vocab == {"a": 0, "b": 1, "c": 2}

    def test_frequency_tie_breaks_lexicographic(self):
        vocab = build_vocabulary([["b"], ["a"]], VectorizerConfig(min_df=1, max_features=1))
        assert set(vocab) == {"a"}


class TestClassBagOfWords:
    def test_single_class_counts(self):
        vocab = {"a": 0, "b": 1}
        m = class_bag_of_words([["a", "a", "b"]], [0], vocab)
        assert m.counts.tolist() == [[2, 1]]

    def test_two_classes(self):
        vocab = {"a": 0, "b": 1}
        m = class_bag_of_words([["a"], ["b", "b"]], [0, 1], vocab)
        assert m.counts.tolist() == [[1, 0], [0, 2]]

    def test_order_free_within_class(self):
        vocab = {"a": 0, "b": 1, "c": 2}
        docs = [["a", "b"], ["c"], ["a"]]
        m1 = class_bag_of_words(docs, [0, 0, 0], vocab)
        m2 = class_bag_of_words(docs[::-1], [0, 0, 0], vocab)
        assert np.array_equal(m1.counts, m2.counts)

    def test_outlier_label_rejected(self):
        with pytest.raises(ValueError, match="-1"):
            class_bag_of_words([["a"]], [-1], {"a": 0})


class TestCtfidf:
    def test_single_class_single_term(self):
        m = matrix_from_counts([[4]])
        w = ctfidf(m, CtfidfConfig(reduce_frequent_words=False))
        assert w[0, 0] == pytest.approx(math.log(2.0), abs=1e-12)

    def test_sqrt_damping_factor(self):
        m = matrix_from_counts([[1, 3]])
        plain = ctfidf(m, CtfidfConfig(reduce_frequent_words=False))
        damped = ctfidf(m, CtfidfConfig(reduce_frequent_words=True))
        # ntf of the first term is 0.25; the square root halves it.
        assert damped[0, 0] / plain[0, 0] == pytest.approx(0.5 / 0.25)

    def test_bm25_idf_at_equal_frequency(self):
        m = matrix_from_counts([[4]])
        w = ctfidf(m, CtfidfConfig(bm25_weighting=True, reduce_frequent_words=False))
        assert w[0, 0] == pytest.approx(math.log(1 + 0.5 / 4.5), abs=1e-12)

    @pytest.mark.parametrize("bm25", [False, True])
    @pytest.mark.parametrize("reduce_frequent", [False, True])
    def test_matches_reference_random(self, bm25, reduce_frequent):
        rng = np.random.default_rng(12)
        for _ in range(10):
            n_classes = int(rng.integers(1, 6))
            n_terms = int(rng.integers(1, 21))
            counts = rng.integers(0, 9, size=(n_classes, n_terms))
            counts[:, 0] += 1  # keep every class row and term column populated
            counts[0] += 1
            m = matrix_from_counts(counts)
            got = ctfidf(m, CtfidfConfig(bm25_weighting=bm25, reduce_frequent_words=reduce_frequent))
            want = ctfidf_reference(counts, bm25, reduce_frequent)
            assert np.abs(got - want).max() < 1e-12

    def test_weights_finite_and_nonnegative_without_bm25(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            counts = rng.integers(0, 6, size=(int(rng.integers(2, 5)), int(rng.integers(2, 12))))
            counts[:, 0] += 1
            counts[0] += 1
            m = matrix_from_counts(counts)
            for reduce_frequent in (False, True):
                w = ctfidf(m, CtfidfConfig(bm25_weighting=False, reduce_frequent_words=reduce_frequent))
                assert np.isfinite(w).all()
                assert (w >= 0).all()
                wb = ctfidf(m, CtfidfConfig(bm25_weighting=True, reduce_frequent_words=reduce_frequent))
                assert np.isfinite(wb).all()

    def test_equal_duplication_keeps_within_class_ranking(self):
        docs = [["a", "b", "b"], ["b", "c"], ["a", "c", "c"]]
        labels = [0, 1, 1]
        vocab = build_vocabulary(docs, VectorizerConfig(min_df=1))
        m1 = class_bag_of_words(docs, labels, vocab)
        w1 = ctfidf(m1)
        m2 = class_bag_of_words(docs + docs, labels + labels, vocab)
        w2 = ctfidf(m2)
        for row in range(w1.shape[0]):
            assert np.argsort(-w1[row]).tolist() == np.argsort(-w2[row]).tolist()

    def test_zero_class_row_warns(self):
        m = matrix_from_counts([[2, 1], [0, 0]])
        with pytest.warns(UserWarning):
            w = ctfidf(m)
        assert (w[1] == 0).all()


class TestTopTerms:
    def test_argmax(self):
        m = matrix_from_counts([[9, 1]])
        reps = top_terms(np.array([[0.9, 0.1]]), m, top_k=1)
        assert [t for t, _ in reps[0].terms] == ["t00"]

    def test_tie_lexicographic(self):
        m = matrix_from_counts([[1, 1]])
        reps = top_terms(np.array([[0.5, 0.5]]), m, top_k=1)
        assert reps[0].terms[0][0] == "t00"

    def test_top_k_truncation_bound(self):
        m = matrix_from_counts([[1, 2, 3]])
        reps = top_terms(np.array([[0.1, 0.2, 0.3]]), m, top_k=10)
        assert len(reps[0].terms) == 3

    def test_zero_weights_dropped(self):
        m = matrix_from_counts([[1, 2]])
        reps = top_terms(np.array([[0.0, 0.4]]), m, top_k=5)
        assert [t for t, _ in reps[0].terms] == ["t01"]

    def test_weights_non_increasing(self):
        rng = np.random.default_rng(14)
        w = rng.random((3, 8))
        m = matrix_from_counts(np.ones((3, 8), int))
        for rep in top_terms(w, m, top_k=5):
            values = [v for _, v in rep.terms]
            assert values == sorted(values, reverse=True)
