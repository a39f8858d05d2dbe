"""Density-based and centroid clustering for one month of documents.

HDBSCAN is implemented directly: mutual reachability distances, a Prim
minimum spanning tree, single-linkage merging, tree condensation with a
minimum cluster size, and excess-of-mass cluster extraction. Points in no
selected cluster are labeled -1. KMeans uses k-means++ seeding from an
explicit seed and Lloyd iterations; it never produces outliers.

Both estimators renumber labels so that label 0 is the largest cluster
(ties broken by first member index), which downstream code relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin


@dataclass
class ClusterAssignment:
    """Labels for one clustering run; -1 marks outliers."""

    labels: np.ndarray
    n_clusters: int
    n_outliers: int

    @classmethod
    def from_labels(cls, labels: np.ndarray) -> "ClusterAssignment":
        labels = np.asarray(labels, dtype=int)
        clusters = labels[labels >= 0]
        n_clusters = int(clusters.max()) + 1 if clusters.size else 0
        return cls(labels=labels, n_clusters=n_clusters, n_outliers=int((labels == -1).sum()))


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix with exact symmetry and zero diagonal."""
    X = np.asarray(X, dtype=np.float64)
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    D = np.sqrt(d2)
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


def _mutual_reachability_from_distances(D: np.ndarray, min_samples: int) -> np.ndarray:
    n = D.shape[0]
    if min_samples < 1:
        raise ValueError("min_samples must be >= 1")
    if n < min_samples:
        raise ValueError(f"need at least min_samples={min_samples} points, got {n}")
    core = np.sort(D, axis=1)[:, min_samples - 1]
    mr = np.maximum(D, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mr, 0.0)
    return mr


def mutual_reachability(X: np.ndarray, min_samples: int) -> np.ndarray:
    """Mutual reachability distances.

    ``core(a)`` is the distance to a's min_samples-th nearest neighbor
    (a point counts as its own first neighbor), and
    ``d_mr(a, b) = max(core(a), core(b), d(a, b))``. The diagonal is zero.
    """
    X = np.asarray(X, dtype=np.float64)
    return _mutual_reachability_from_distances(pairwise_distances(X), min_samples)


def minimum_spanning_tree(dist: np.ndarray) -> np.ndarray:
    """Prim MST over a dense distance matrix.

    Returns an (n-1, 3) array of (parent, child, weight) edges in the order
    Prim attaches them. Ties pick the lowest point index.
    """
    n = dist.shape[0]
    if n < 2:
        return np.zeros((0, 3))
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = dist[0].copy()
    best[0] = np.inf
    parent = np.zeros(n, dtype=np.intp)
    edges = np.empty((n - 1, 3))
    for i in range(n - 1):
        j = int(np.argmin(best))
        edges[i] = (parent[j], j, best[j])
        in_tree[j] = True
        best[j] = np.inf
        improved = ~in_tree & (dist[j] < best)
        best[improved] = dist[j][improved]
        parent[improved] = j
    return edges


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.node = list(range(n))  # current dendrogram node id per root

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int, new_node: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.node[ra] = new_node
        return ra


def single_linkage_tree(mst_edges: np.ndarray, n: int) -> np.ndarray:
    """Merge MST edges in weight order into an (n-1, 4) linkage array of
    (node_a, node_b, height, size); new nodes are numbered n, n+1, ..."""
    order = np.argsort(mst_edges[:, 2], kind="stable")
    uf = _UnionFind(n)
    Z = np.empty((len(mst_edges), 4))
    for k, idx in enumerate(order):
        a, b, w = mst_edges[idx]
        ra, rb = uf.find(int(a)), uf.find(int(b))
        na, nb = uf.node[ra], uf.node[rb]
        lo, hi = (na, nb) if na < nb else (nb, na)
        size = uf.size[ra] + uf.size[rb]
        Z[k] = (lo, hi, w, size)
        uf.union(int(a), int(b), n + k)
    return Z


def _leaves_under(node: int, Z: np.ndarray, n: int) -> list[int]:
    out = []
    stack = [node]
    while stack:
        m = stack.pop()
        if m < n:
            out.append(m)
        else:
            row = Z[m - n]
            stack.append(int(row[1]))
            stack.append(int(row[0]))
    return out


def condense_tree(Z: np.ndarray, min_cluster_size: int) -> list[tuple[int, int, float, int]]:
    """Condense a single-linkage tree: children smaller than
    ``min_cluster_size`` fall out of their parent as points.

    Rows are (parent, child, lambda, size) with lambda = 1 / merge height.
    Condensed cluster ids start at n (the root). Zero merge heights (exact
    duplicates) get a finite lambda above every real one so stability
    arithmetic stays finite.
    """
    n = Z.shape[0] + 1
    heights = Z[:, 2]
    positive = heights[heights > 0]
    dup_lambda = 2.0 / positive.min() if positive.size else 1.0

    def lam(height: float) -> float:
        return 1.0 / height if height > 0 else dup_lambda

    def size_of(node: int) -> int:
        return 1 if node < n else int(Z[node - n, 3])

    root = 2 * n - 2
    relabel = {root: n}
    next_label = n + 1
    rows: list[tuple[int, int, float, int]] = []
    stack = [root]
    while stack:
        node = stack.pop()
        i = node - n
        lam_split = lam(heights[i])
        left, right = int(Z[i, 0]), int(Z[i, 1])
        s_left, s_right = size_of(left), size_of(right)
        current = relabel[node]
        if s_left >= min_cluster_size and s_right >= min_cluster_size:
            for child, s_child in ((left, s_left), (right, s_right)):
                relabel[child] = next_label
                rows.append((current, next_label, lam_split, s_child))
                next_label += 1
                stack.append(child)
        elif s_left < min_cluster_size and s_right < min_cluster_size:
            for child in (left, right):
                for point in _leaves_under(child, Z, n):
                    rows.append((current, point, lam_split, 1))
        else:
            small, big = (left, right) if s_left < min_cluster_size else (right, left)
            relabel[big] = current
            stack.append(big)
            for point in _leaves_under(small, Z, n):
                rows.append((current, point, lam_split, 1))
    return rows


def _cluster_stability(rows, n: int) -> dict[int, float]:
    births: dict[int, float] = {n: 0.0}
    for _, child, lam, _ in rows:
        if child >= n:
            births[child] = lam
    stability: dict[int, float] = {c: 0.0 for c in births}
    for parent, _, lam, size in rows:
        stability[parent] += (lam - births[parent]) * size
    return stability


def extract_excess_of_mass(rows, n: int) -> list[int]:
    """Select flat clusters that maximize stability; the root is never
    eligible, so too-small data yields no clusters at all."""
    stability = _cluster_stability(rows, n)
    children: dict[int, list[int]] = {}
    for parent, child, _, _ in rows:
        if child >= n:
            children.setdefault(parent, []).append(child)

    def descendants(c: int):
        stack = list(children.get(c, []))
        while stack:
            d = stack.pop()
            yield d
            stack.extend(children.get(d, []))

    selected: dict[int, bool] = {}
    cluster_ids = sorted(c for c in stability if c != n)
    for c in reversed(cluster_ids):
        child_sum = sum(stability[ch] for ch in children.get(c, []))
        if stability[c] >= child_sum:
            selected[c] = True
            for d in descendants(c):
                selected[d] = False
        else:
            selected[c] = False
            stability[c] = child_sum
    return [c for c in cluster_ids if selected.get(c)]


def _label_from_condensed(rows, selected: list[int], n: int) -> np.ndarray:
    parent_of = {child: parent for parent, child, _, _ in rows if child >= n}
    chosen = set(selected)
    labels = np.full(n, -1, dtype=int)
    index = {c: i for i, c in enumerate(selected)}
    up_cache: dict[int, int] = {}

    def nearest_selected(c: int) -> int:
        seen = []
        cur = c
        while cur is not None and cur not in up_cache:
            if cur in chosen:
                up_cache[cur] = cur
                break
            seen.append(cur)
            cur = parent_of.get(cur)
        result = up_cache.get(cur, -1) if cur is not None else -1
        for s in seen:
            up_cache[s] = result
        return result

    for parent, child, _, _ in rows:
        if child < n:
            sel = nearest_selected(parent)
            if sel != -1:
                labels[child] = index[sel]
    return labels


def relabel_by_size(labels: np.ndarray) -> np.ndarray:
    """Renumber non-outlier labels by descending member count; ties keep the
    cluster whose first member appears earliest."""
    labels = np.asarray(labels, dtype=int)
    out = np.full_like(labels, -1)
    ids = [int(c) for c in np.unique(labels) if c >= 0]
    keyed = []
    for c in ids:
        members = np.nonzero(labels == c)[0]
        keyed.append((-len(members), int(members[0]), c))
    for new, (_, _, old) in enumerate(sorted(keyed)):
        out[labels == old] = new
    return out


class HDBSCAN(BaseEstimator, ClusterMixin):
    """Hierarchical density-based clustering with outliers.

    Parameters
    ----------
    min_cluster_size : int, default 10
        Smallest group of points that can form a topic.
    min_samples : int or None, default None
        Neighborhood size for core distances; defaults to
        ``min_cluster_size``.
    metric : str, default "euclidean"
        Only Euclidean distances are supported.
    """

    def __init__(self, min_cluster_size: int = 10, min_samples: int | None = None,
                 metric: str = "euclidean"):
        self.min_cluster_size = min_cluster_size
        self.min_samples = min_samples
        self.metric = metric

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected a 2D matrix")
        if self.metric != "euclidean":
            raise ValueError("only the euclidean metric is supported")
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be >= 2")
        min_samples = self.min_samples if self.min_samples is not None else self.min_cluster_size
        if min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        if min_samples > self.min_cluster_size:
            raise ValueError("min_samples must not exceed min_cluster_size")
        n = X.shape[0]
        if n == 0:
            raise ValueError("cannot cluster an empty matrix")

        D = pairwise_distances(X)
        if n == 1 or D.max() == 0.0:
            # Degenerate: all points identical.
            labels = np.zeros(n, dtype=int)
        elif n < 2 * self.min_cluster_size:
            # No split can yield two children of min_cluster_size points.
            labels = np.full(n, -1, dtype=int)
        else:
            mr = _mutual_reachability_from_distances(D, min_samples)
            mst = minimum_spanning_tree(mr)
            Z = single_linkage_tree(mst, n)
            rows = condense_tree(Z, self.min_cluster_size)
            selected = extract_excess_of_mass(rows, n)
            labels = _label_from_condensed(rows, selected, n)
            labels = relabel_by_size(labels)

        self.labels_ = labels
        self.assignment_ = ClusterAssignment.from_labels(labels)
        self.n_clusters_ = self.assignment_.n_clusters
        self.n_outliers_ = self.assignment_.n_outliers
        return self


class KMeans(BaseEstimator, ClusterMixin):
    """Lloyd's algorithm with k-means++ seeding from an explicit seed.

    Deterministic for a fixed seed. An empty cluster is re-seeded at the
    point farthest from its assigned centroid. No outliers are produced.
    """

    def __init__(self, k: int = 8, seed: int = 0, max_iter: int = 300, tol: float = 1e-4):
        self.k = k
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol

    def _plus_plus_init(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        n = X.shape[0]
        centers = np.empty((self.k, X.shape[1]))
        centers[0] = X[rng.integers(n)]
        closest = np.sum((X - centers[0]) ** 2, axis=1)
        for c in range(1, self.k):
            total = closest.sum()
            if total <= 0:
                idx = int(rng.integers(n))
            else:
                idx = int(rng.choice(n, p=closest / total))
            centers[c] = X[idx]
            closest = np.minimum(closest, np.sum((X - centers[c]) ** 2, axis=1))
        return centers

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected a 2D matrix")
        n = X.shape[0]
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k > n:
            raise ValueError(f"k={self.k} exceeds the number of points ({n})")
        rng = np.random.default_rng(self.seed)
        centers = self._plus_plus_init(X, rng)
        labels = np.zeros(n, dtype=int)
        for _ in range(self.max_iter):
            d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            labels = np.argmin(d2, axis=1)
            new_centers = centers.copy()
            for c in range(self.k):
                members = labels == c
                if members.any():
                    new_centers[c] = X[members].mean(axis=0)
                else:
                    point_d2 = d2[np.arange(n), labels]
                    new_centers[c] = X[int(np.argmax(point_d2))]
            shift = np.sqrt(np.sum((new_centers - centers) ** 2, axis=1)).max()
            centers = new_centers
            if shift < self.tol:
                break
        d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        raw_labels = np.argmin(d2, axis=1)
        labels = relabel_by_size(raw_labels)
        # Reorder centers to match the renumbered labels; centers whose
        # cluster emptied on the final assignment pass go last.
        order = []
        for new in range(int(labels.max()) + 1 if labels.size else 0):
            members = np.nonzero(labels == new)[0]
            order.append(int(raw_labels[members[0]]))
        order.extend(c for c in range(self.k) if c not in set(order))
        self.labels_ = labels
        self.cluster_centers_ = centers[order]
        self.inertia_ = float(np.sum((X - centers[raw_labels]) ** 2))
        self.assignment_ = ClusterAssignment.from_labels(labels)
        self.n_clusters_ = self.assignment_.n_clusters
        self.n_outliers_ = 0
        return self
