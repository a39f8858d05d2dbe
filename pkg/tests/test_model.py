import numpy as np
import pytest

from topiclife.model import MonthlyTopicModel
from topiclife.represent import ClassTfidf


def blob_docs(rng, pools, per_pool=25):
    docs, X = [], []
    for axis, pool in enumerate(pools):
        center = np.zeros(4)
        center[axis] = 10.0
        for _ in range(per_pool):
            tokens = [str(rng.choice(pool)) for _ in range(8)]
            docs.append(tokens)
            X.append(center + rng.normal(0, 0.05, 4))
    return docs, np.array(X)


class TestMonthlyTopicModel:
    def test_hdbscan_fit_produces_topics(self):
        rng = np.random.default_rng(50)
        pools = [["bridge", "road", "transit"], ["ballot", "vote", "poll"]]
        docs, X = blob_docs(rng, pools)
        model = MonthlyTopicModel(min_cluster_size=5, min_df=2).fit(docs, X)
        assert model.n_topics_ == 2
        assert len(model.labels_) == len(docs)
        terms = {t for rep in model.topics_ for t, _ in rep.terms}
        assert terms <= {"bridge", "road", "transit", "ballot", "vote", "poll"}
        for rep in model.topics_:
            own_pool = pools[0] if "bridge" in rep.term_set() else pools[1]
            assert rep.term_set() <= set(own_pool)

    def test_oov_documents_become_outliers(self):
        rng = np.random.default_rng(51)
        docs, X = blob_docs(rng, [["a", "b"], ["c", "d"]], per_pool=15)
        docs.append(["zzz"])
        X = np.vstack([X, np.zeros(4)])
        mask = np.zeros(len(docs), bool)
        mask[-1] = True
        model = MonthlyTopicModel(min_cluster_size=5, min_df=2).fit(docs, X, mask)
        assert model.labels_[-1] == -1

    def test_kmeans_path(self):
        rng = np.random.default_rng(52)
        docs, X = blob_docs(rng, [["a", "b"], ["c", "d"]], per_pool=12)
        model = MonthlyTopicModel(algorithm="kmeans", k=2, seed=9, min_df=2).fit(docs, X)
        assert model.n_topics_ == 2
        assert model.n_outliers_ == 0

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError, match="algorithm"):
            MonthlyTopicModel(algorithm="spectral").fit([["a"]], np.zeros((1, 2)))

    def test_get_params_roundtrip(self):
        model = MonthlyTopicModel(min_cluster_size=7, top_k=5)
        params = model.get_params()
        assert params["min_cluster_size"] == 7
        assert MonthlyTopicModel(**params).get_params() == params

    def test_topic_sizes_sum_to_assigned(self):
        rng = np.random.default_rng(53)
        docs, X = blob_docs(rng, [["a", "b"], ["c", "d"]], per_pool=20)
        model = MonthlyTopicModel(min_cluster_size=5, min_df=2).fit(docs, X)
        assert sum(model.topic_sizes().values()) == int((model.labels_ >= 0).sum())


class TestClassTfidfEstimator:
    def test_fit_builds_representations(self):
        docs = [["a", "b", "a"], ["b", "c"], ["a", "c", "c"], ["c", "b"]]
        labels = [0, 0, 1, 1]
        est = ClassTfidf(min_df=1, top_k=2).fit(docs, labels)
        assert est.weights_.shape[0] == 2
        assert len(est.representations_) == 2
        assert est.transform() is est.weights_

    def test_get_params_roundtrip(self):
        est = ClassTfidf(min_df=3, bm25_weighting=True)
        params = est.get_params()
        assert params["bm25_weighting"] is True
        assert ClassTfidf(**params).get_params() == params
