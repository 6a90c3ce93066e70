"""Exact Euclidean minimal spanning trees over tagged point clouds.

The tree builder is a dense Prim implementation: O(n^2) time, O(n) memory,
exact under Euclidean distance. Approximate or sparsified neighbours are
deliberately avoided because a single missed tree edge biases every
cross-count statistic read off the tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import ValidationError, as_float_matrix, ensure


@dataclass
class PointCloud:
    """Points in R^k, each carrying a small-integer group tag."""

    points: np.ndarray
    tags: np.ndarray

    def __post_init__(self) -> None:
        self.points = as_float_matrix(self.points, "points")
        ensure(self.points.shape[0] >= 1, "a point cloud needs at least one point")
        self.tags = np.asarray(self.tags, dtype=np.int64)
        ensure(self.tags.ndim == 1, "tags must be 1-D")
        ensure(
            self.tags.shape[0] == self.points.shape[0],
            "tags length must equal the number of points",
        )
        ensure(self.tags.min(initial=0) >= 0, "tags must be non-negative")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


@dataclass
class SpanningTree:
    """Edge list of a spanning tree on ``n`` nodes, each edge stored ``u < v``."""

    n: int
    edges: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        ensure(self.edges.shape[0] == max(self.n - 1, 0), "a tree on n nodes has n-1 edges")
        ensure(self.edges.shape[0] == self.weights.shape[0], "one weight per edge")

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


@dataclass
class CrossCountMatrix:
    """Edge counts between tag groups, stored in the upper triangle (a <= b).

    ``counts[a, b]`` with ``a <= b`` is the number of tree edges joining a
    node tagged ``a`` to a node tagged ``b``; the diagonal holds within-group
    edges. All entries sum to ``n - 1``.
    """

    counts: np.ndarray
    n: int

    def pair(self, a: int, b: int) -> int:
        lo, hi = (a, b) if a <= b else (b, a)
        return int(self.counts[lo, hi])


def build_mst(cloud: PointCloud) -> SpanningTree:
    """Exact Euclidean MST via dense Prim with deterministic tie-breaking.

    Among equal-weight candidate edges the lexicographically smallest
    ``(min(u, v), max(u, v))`` pair wins, so clouds with duplicated points
    still build the same tree every run. A single point yields an empty edge
    list.
    """
    pts = cloud.points
    n = cloud.n_points
    if n == 1:
        return SpanningTree(n=1, edges=np.empty((0, 2)), weights=np.empty(0))

    # Prim on squared distances (monotone in the Euclidean metric); columns
    # are pulled out once so the inner loop works on contiguous 1-D arrays.
    cols = [np.ascontiguousarray(pts[:, k]) for k in range(pts.shape[1])]

    def sq_dist_from(v: int) -> np.ndarray:
        d2 = (cols[0] - cols[0][v]) ** 2
        for col in cols[1:]:
            d2 += (col - col[v]) ** 2
        return d2

    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best_sq = sq_dist_from(0)
    parent = np.zeros(n, dtype=np.int64)
    best_sq[0] = np.inf

    edges = np.empty((n - 1, 2), dtype=np.int64)
    weights = np.empty(n - 1, dtype=np.float64)
    for step in range(n - 1):
        v = int(np.argmin(best_sq))
        w2 = best_sq[v]
        if np.count_nonzero(best_sq == w2) > 1:
            key = (min(parent[v], v), max(parent[v], v))
            for cand in np.flatnonzero(best_sq == w2):
                cand_key = (min(parent[cand], cand), max(parent[cand], cand))
                if cand_key < key:
                    v, key = int(cand), cand_key
        u = parent[v]
        edges[step] = (u, v) if u < v else (v, u)
        weights[step] = np.sqrt(w2)

        in_tree[v] = True
        best_sq[v] = np.inf
        dv = sq_dist_from(v)
        dv[in_tree] = np.inf
        equal_ties = np.flatnonzero((dv == best_sq) & np.isfinite(dv))
        closer = dv < best_sq
        parent[closer] = v
        best_sq[closer] = dv[closer]
        for node in equal_ties:
            old = (min(parent[node], node), max(parent[node], node))
            new = (min(v, node), max(v, node))
            if new < old:
                parent[node] = v
    return SpanningTree(n=n, edges=edges, weights=weights)


def brute_force_min_weight(cloud: PointCloud) -> float:
    """Minimum spanning-tree weight by exhausting all n^(n-2) labeled trees.

    Every Pruefer sequence over ``n`` nodes is decoded (batched in numpy) and
    its tree weight accumulated; the minimum over the batch is returned. Kept
    fully independent of :func:`build_mst` as a correctness oracle, hence the
    ``2 <= n <= 8`` limit.
    """
    n = cloud.n_points
    if not 2 <= n <= 8:
        raise ValidationError(f"brute force supports 2 <= n <= 8 points, got {n}")
    diff = cloud.points[:, None, :] - cloud.points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    if n == 2:
        return float(dist[0, 1])

    n_seq = n ** (n - 2)
    idx = np.arange(n_seq)
    seqs = np.empty((n_seq, n - 2), dtype=np.int64)
    for pos in range(n - 2):
        seqs[:, pos] = (idx // n**pos) % n

    rows = np.arange(n_seq)
    degree = np.ones((n_seq, n), dtype=np.int64)
    for pos in range(n - 2):
        np.add.at(degree, (rows, seqs[:, pos]), 1)

    total = np.zeros(n_seq)
    for pos in range(n - 2):
        leaf = np.argmax(degree == 1, axis=1)
        s = seqs[:, pos]
        total += dist[leaf, s]
        degree[rows, leaf] -= 1
        degree[rows, s] -= 1
    u = np.argmax(degree == 1, axis=1)
    degree[rows, u] -= 1
    v = np.argmax(degree == 1, axis=1)
    total += dist[u, v]
    return float(total.min())


def jittered(cloud: PointCloud, seed, scale: float = 1e-9) -> PointCloud:
    """Copy of a cloud with tiny seeded noise, for breaking duplicate points.

    Noise magnitude is ``scale`` times the data diameter. Off by default
    everywhere: perturbing coordinates changes every statistic read off the
    tree, so callers opt in explicitly and accept the bias.
    """
    rng = np.random.default_rng(seed)
    span = cloud.points.max(axis=0) - cloud.points.min(axis=0)
    diameter = float(np.sqrt((span**2).sum()))
    noise = scale * max(diameter, 1.0) * rng.standard_normal(cloud.points.shape)
    return PointCloud(points=cloud.points + noise, tags=cloud.tags.copy())


def cross_edge_counts(tree: SpanningTree, tags: np.ndarray) -> CrossCountMatrix:
    """Count tree edges per unordered tag pair (diagonal = within-group)."""
    tags = np.asarray(tags, dtype=np.int64)
    ensure(tags.shape[0] == tree.n, "tags length must equal the node count")
    ensure(tags.ndim == 1 and tags.min(initial=0) >= 0, "tags must be non-negative ints")
    g = int(tags.max()) + 1 if tags.size else 0
    counts = np.zeros((g, g), dtype=np.int64)
    if tree.edges.shape[0]:
        ta = tags[tree.edges[:, 0]]
        tb = tags[tree.edges[:, 1]]
        lo = np.minimum(ta, tb)
        hi = np.maximum(ta, tb)
        np.add.at(counts, (lo, hi), 1)
    return CrossCountMatrix(counts=counts, n=tree.n)
