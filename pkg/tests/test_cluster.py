import numpy as np
import pytest

from topiclife.cluster import (
    HDBSCAN,
    KMeans,
    minimum_spanning_tree,
    mutual_reachability,
    pairwise_distances,
)


def two_blobs(rng, n_per=50, spread=0.05, centers=((0.0, 0.0), (10.0, 10.0))):
    points = [rng.normal(c, spread, size=(n_per, 2)) for c in centers]
    return np.vstack(points)


def single_linkage_height_sum(dist):
    """Naive agglomerative single linkage; returns the sum of merge heights."""
    n = dist.shape[0]
    clusters = [{i} for i in range(n)]
    total = 0.0
    while len(clusters) > 1:
        best = (np.inf, None, None)
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = min(dist[a, b] for a in clusters[i] for b in clusters[j])
                if d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        total += d
        clusters[i] |= clusters[j]
        del clusters[j]
    return total


class TestMutualReachability:
    def test_two_points_min_samples_one(self):
        X = np.array([[0.0, 0.0], [3.0, 4.0]])
        mr = mutual_reachability(X, min_samples=1)
        assert mr[0, 1] == pytest.approx(5.0)
        assert mr[0, 0] == 0.0

    def test_equilateral_triangle(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        mr = mutual_reachability(X, min_samples=2)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert mr[i, j] == pytest.approx(1.0)

    def test_dominates_distance(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 3))
        D = pairwise_distances(X)
        mr = mutual_reachability(X, min_samples=4)
        assert (mr >= D - 1e-12).all()
        assert np.array_equal(mr, mr.T)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            mutual_reachability(np.zeros((2, 2)), min_samples=3)


class TestMstOracle:
    @pytest.mark.parametrize("n", [5, 17, 50])
    def test_mst_weight_matches_single_linkage(self, n):
        rng = np.random.default_rng(n)
        X = rng.normal(size=(n, 3))
        for metric in (pairwise_distances(X), mutual_reachability(X, min_samples=3)):
            mst = minimum_spanning_tree(metric)
            assert abs(mst[:, 2].sum() - single_linkage_height_sum(metric)) < 1e-9


class TestHdbscan:
    def test_two_blobs(self):
        rng = np.random.default_rng(1)
        X = two_blobs(rng)
        model = HDBSCAN(min_cluster_size=5).fit(X)
        assert model.n_clusters_ == 2
        assert model.n_outliers_ == 0

    def test_tiny_input_all_outliers(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        model = HDBSCAN(min_cluster_size=5, min_samples=1).fit(X)
        assert model.labels_.tolist() == [-1, -1, -1]

    def test_distant_point_is_outlier(self):
        rng = np.random.default_rng(2)
        X = np.vstack([two_blobs(rng), [[100.0, 100.0]]])
        model = HDBSCAN(min_cluster_size=5).fit(X)
        assert model.n_clusters_ == 2
        assert model.labels_[-1] == -1
        assert model.n_outliers_ == 1

    def test_identical_points_single_cluster(self):
        X = np.ones((12, 2))
        model = HDBSCAN(min_cluster_size=5).fit(X)
        assert model.n_clusters_ == 1
        assert model.n_outliers_ == 0

    def test_label_zero_is_largest(self):
        rng = np.random.default_rng(3)
        X = np.vstack([
            rng.normal((0, 0), 0.05, size=(60, 2)),
            rng.normal((10, 10), 0.05, size=(20, 2)),
        ])
        model = HDBSCAN(min_cluster_size=5).fit(X)
        labels = model.labels_
        assert (labels == 0).sum() > (labels == 1).sum()

    def test_rigid_transform_invariance(self):
        rng = np.random.default_rng(4)
        X = np.vstack([
            rng.normal((0, 0), 0.3, size=(40, 2)),
            rng.normal((6, 2), 0.3, size=(30, 2)),
            rng.normal((-4, 7), 0.3, size=(25, 2)),
        ])
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        moved = X @ rot.T + np.array([13.0, -5.0])
        a = HDBSCAN(min_cluster_size=5).fit(X).labels_
        b = HDBSCAN(min_cluster_size=5).fit(moved).labels_
        assert (a == -1).tolist() == (b == -1).tolist()
        pairs = {}
        for la, lb in zip(a, b):
            if la == -1:
                continue
            pairs.setdefault(la, set()).add(lb)
        assert all(len(v) == 1 for v in pairs.values())
        assert len({next(iter(v)) for v in pairs.values()}) == len(pairs)

    def test_outlier_fraction_monotone_in_min_cluster_size(self):
        rng = np.random.default_rng(5)
        X = np.vstack([
            rng.normal((0, 0), 0.4, size=(45, 2)),
            rng.normal((8, 8), 0.4, size=(35, 2)),
            rng.uniform(-10, 18, size=(12, 2)),
        ])
        fractions = []
        for mcs in (4, 6, 10, 16, 25):
            model = HDBSCAN(min_cluster_size=mcs, min_samples=3).fit(X)
            fractions.append(model.n_outliers_ / len(X))
        assert all(a <= b + 1e-12 for a, b in zip(fractions, fractions[1:]))

    def test_min_samples_validation(self):
        with pytest.raises(ValueError):
            HDBSCAN(min_cluster_size=4, min_samples=9).fit(np.zeros((20, 2)))

    @pytest.mark.parametrize("trial", range(5))
    def test_agrees_with_sklearn_reference(self, trial):
        sk_cluster = pytest.importorskip("sklearn.cluster")
        rng = np.random.default_rng(60 + trial)
        k = int(rng.integers(2, 5))
        centers = rng.uniform(-50, 50, size=(k, 3))
        X = np.vstack(
            [rng.normal(c, rng.uniform(0.3, 1.0), size=(int(rng.integers(15, 40)), 3)) for c in centers]
        )
        X = np.vstack([X, rng.uniform(-60, 60, size=(int(rng.integers(0, 6)), 3))])
        mcs = int(rng.integers(5, 12))
        mine = HDBSCAN(min_cluster_size=mcs, min_samples=min(mcs, 5)).fit(X)
        ref = sk_cluster.HDBSCAN(min_cluster_size=mcs, min_samples=min(mcs, 5)).fit(X)
        assert mine.n_clusters_ == ref.labels_.max() + 1
        assert mine.n_outliers_ == int((ref.labels_ == -1).sum())
        # Identical partitions up to label renaming.
        pairing = {}
        for ours, theirs in zip(mine.labels_, ref.labels_):
            if ours == -1 or theirs == -1:
                assert ours == theirs
                continue
            assert pairing.setdefault(ours, theirs) == theirs


class TestKMeans:
    def test_single_cluster(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(15, 2))
        model = KMeans(k=1, seed=0).fit(X)
        assert set(model.labels_.tolist()) == {0}

    def test_two_blobs_match_membership(self):
        rng = np.random.default_rng(7)
        X = two_blobs(rng, n_per=40)
        truth = np.array([0] * 40 + [1] * 40)
        model = KMeans(k=2, seed=11).fit(X)
        # Same partition up to label swap.
        agreement = (model.labels_ == truth).mean()
        assert agreement in (0.0, 1.0) or agreement > 0.99 or agreement < 0.01

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(50, 3))
        a = KMeans(k=4, seed=42).fit(X).labels_
        b = KMeans(k=4, seed=42).fit(X).labels_
        assert np.array_equal(a, b)

    def test_objective_non_increasing(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(60, 2))
        inertias = [KMeans(k=5, seed=3, max_iter=i, tol=0.0).fit(X).inertia_ for i in range(1, 9)]
        assert all(a >= b - 1e-9 for a, b in zip(inertias, inertias[1:]))

    def test_k_exceeds_points(self):
        with pytest.raises(ValueError):
            KMeans(k=5, seed=0).fit(np.zeros((3, 2)))

    def test_duplicate_points_terminate(self):
        X = np.ones((6, 2))
        model = KMeans(k=3, seed=1).fit(X)
        assert len(model.labels_) == 6

    def test_no_outliers(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(30, 2))
        model = KMeans(k=3, seed=2).fit(X)
        assert (model.labels_ >= 0).all()
        assert model.n_outliers_ == 0

    def test_get_params_roundtrip(self):
        model = KMeans(k=7, seed=5, max_iter=10, tol=1e-3)
        params = model.get_params()
        assert params["k"] == 7
        clone = KMeans(**params)
        assert clone.get_params() == params
