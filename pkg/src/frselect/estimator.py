"""Lower-bound estimation of conditional dependency between two features.

The estimator splits the sample in half within each class, breaks the
within-class pairing of the second feature in one half by a uniform random
permutation, builds one global Euclidean MST over both halves, and reads off
the matrix of cross-match counts between original and permuted class groups.
Scaled by ``n / (2 * n'_j * n_i)`` those counts estimate the class-pair
integrals whose prior-weighted sum lower-bounds the conditional dependency;
the bound itself collapses to ``1 - total_cross / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import PairSample
from .mst import PointCloud, build_mst, cross_edge_counts
from .validation import ValidationError, as_seed, class_indices, ensure


@dataclass
class SplitHalves:
    """A stratified halving of a pair sample.

    ``original_half`` keeps its rows verbatim; ``permutation_source`` supplies
    the rows whose second coordinate will be re-paired. ``n_original[c]`` and
    ``n_source[c]`` are the per-class sizes (indexed by position in
    ``classes``); within each class they differ by at most one, the extra row
    going to the original half.
    """

    original_half: PairSample
    permutation_source: PairSample
    classes: np.ndarray
    n_original: np.ndarray
    n_source: np.ndarray

    @property
    def n(self) -> int:
        """Half size used to scale the estimator (original-half row count)."""
        return int(self.n_original.sum())


@dataclass
class PermutedSample:
    """A pair sample whose second coordinate was re-paired within each class."""

    points: np.ndarray
    labels: np.ndarray


@dataclass
class CrossRunCounts:
    """Cross-match counts of the global MST over original + permuted halves.

    ``cross[j, i]`` counts edges joining an original-half node of class
    ``classes[j]`` to a permuted node of class ``classes[i]``. Edges within
    one side (any classes) are not attributed to any entry; their number is
    ``same_side``.
    """

    cross: np.ndarray
    same_side: int
    n_nodes: int
    classes: np.ndarray


@dataclass
class DeltaMatrix:
    """Scaled cross-count estimates for every (permuted, original) class pair.

    ``delta[i, j] = n / (2 * n_original[j] * n_source[i]) * cross[j, i]``,
    which for large samples approaches the integral of
    ``f(x | class_j) * f(x_s | class_i) f(x_t | class_i) / (f + pi)`` --
    the original half carries the within-class joint, the permuted half the
    product of within-class marginals.
    """

    delta: np.ndarray
    cross_counts: np.ndarray
    n: int
    n_original: np.ndarray
    n_source: np.ndarray
    classes: np.ndarray

    @property
    def total_cross(self) -> int:
        return int(self.cross_counts.sum())

    def bound_value(self) -> float:
        """Lower-bound value ``1 - 2 * sum_ij p_i p_j delta[i, j]``.

        Empirical priors come from the respective halves over the common
        normalizer ``n``, which makes this algebraically identical to
        ``1 - total_cross / n``.
        """
        p_original = self.n_original / self.n
        p_source = self.n_source / self.n
        weighted = p_source[:, None] * p_original[None, :] * self.delta
        return float(1.0 - 2.0 * weighted.sum())


@dataclass
class BoundEstimate:
    """Conditional-dependency lower-bound estimate for one feature pair."""

    value: float
    per_repeat: tuple[float, ...]
    delta: DeltaMatrix
    priors_original: np.ndarray
    priors_permuted: np.ndarray
    seed: int
    repeats: int

    @property
    def total_cross(self) -> int:
        return self.delta.total_cross

    @property
    def n(self) -> int:
        return self.delta.n


@dataclass
class PairwiseBaseline:
    """Per-class-pair FR counts computed from one MST per ordered pair.

    ``counts[a, b]`` is the cross count of the MST over (original class
    ``classes[a]``, permuted class ``classes[b]``); ``sizes[a, b]`` its node
    count. ``work_proxy`` is the sum of squared node counts, the natural cost
    model for a dense O(size^2) MST build.
    """

    counts: np.ndarray
    sizes: np.ndarray
    work_proxy: int
    classes: np.ndarray
    seed: int


def split_stratified(pair: PairSample, seed) -> SplitHalves:
    """Halve a pair sample class by class with a seeded shuffle.

    Within each class the rows are shuffled and dealt alternately to the two
    halves, so per-class counts differ by at most one (odd counts favour the
    original half). Raises if any class has fewer than two rows.
    """
    rng = np.random.default_rng(seed)
    groups = class_indices(pair.labels)
    original: list[np.ndarray] = []
    source: list[np.ndarray] = []
    for c in sorted(groups):
        idx = groups[c]
        if idx.size < 2:
            raise ValidationError(
                f"class {c} has {idx.size} row(s); stratified halving needs >= 2"
            )
        shuffled = rng.permutation(idx)
        original.append(shuffled[0::2])
        source.append(shuffled[1::2])

    classes = np.array(sorted(groups), dtype=np.int64)
    n_original = np.array([len(block) for block in original], dtype=np.int64)
    n_source = np.array([len(block) for block in source], dtype=np.int64)
    orig_rows = np.sort(np.concatenate(original))
    src_rows = np.sort(np.concatenate(source))
    return SplitHalves(
        original_half=PairSample(
            s=pair.s, t=pair.t, points=pair.points[orig_rows], labels=pair.labels[orig_rows]
        ),
        permutation_source=PairSample(
            s=pair.s, t=pair.t, points=pair.points[src_rows], labels=pair.labels[src_rows]
        ),
        classes=classes,
        n_original=n_original,
        n_source=n_source,
    )


def permute_within_class(source: PairSample, seed) -> PermutedSample:
    """Re-pair the second coordinate within each class, uniformly at random.

    The first coordinate stays in place; per class, the multiset of each
    coordinate is preserved exactly. A single-row class is returned unchanged.
    """
    rng = np.random.default_rng(seed)
    points = source.points.copy()
    for c, idx in sorted(class_indices(source.labels).items()):
        perm = rng.permutation(idx.size)
        points[idx, 1] = source.points[idx[perm], 1]
    return PermutedSample(points=points, labels=source.labels.copy())


def count_cross_runs(halves: SplitHalves, permuted: PermutedSample) -> CrossRunCounts:
    """Build the global MST over both halves and count original/permuted edges.

    Original-half nodes are tagged ``0..m-1`` by class position, permuted
    nodes ``m..2m-1``; one exact MST over the merged cloud yields every
    class-pair count at once.
    """
    classes = halves.classes
    m = classes.size
    rank = {int(c): i for i, c in enumerate(classes)}
    if set(np.unique(permuted.labels)) - set(rank):
        raise ValidationError("permuted sample carries classes absent from the halves")

    orig = halves.original_half
    tags_orig = np.array([rank[int(c)] for c in orig.labels], dtype=np.int64)
    tags_perm = np.array([rank[int(c)] + m for c in permuted.labels], dtype=np.int64)
    cloud = PointCloud(
        points=np.vstack([orig.points, permuted.points]),
        tags=np.concatenate([tags_orig, tags_perm]),
    )
    tree = build_mst(cloud)
    full = cross_edge_counts(tree, cloud.tags)

    cross = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        for i in range(m):
            cross[j, i] = full.pair(j, m + i)
    same_side = int(tree.edges.shape[0] - cross.sum())
    return CrossRunCounts(
        cross=cross, same_side=same_side, n_nodes=cloud.n_points, classes=classes
    )


def delta_from_counts(halves: SplitHalves, counts: CrossRunCounts) -> DeltaMatrix:
    """Scale cross counts to the estimator matrix ``n / (2 n'_j n_i) * R[j, i]``."""
    n = halves.n
    scale = n / (2.0 * halves.n_original[None, :] * halves.n_source[:, None])
    delta = scale * counts.cross.T
    return DeltaMatrix(
        delta=delta,
        cross_counts=counts.cross,
        n=n,
        n_original=halves.n_original,
        n_source=halves.n_source,
        classes=halves.classes,
    )


def estimate_pair_bound(
    pair: PairSample, seed, repeats: int = 10, clamp: bool = False
) -> BoundEstimate:
    """Estimate the conditional-dependency lower bound for one feature pair.

    One repeat runs split -> permute -> global MST -> scaled counts -> bound;
    repeat ``r`` draws from a generator seeded by ``(seed, r)``, and the
    reported value is the arithmetic mean. Diagnostics (delta matrix, cross
    counts, priors) are retained from the last repeat.

    The estimate is reported raw by default: heavy class overlap legitimately
    produces values <= 0, and downstream ranking wants that ordering
    information. ``clamp=True`` truncates the reported mean into [0, 1].
    """
    ensure(repeats >= 1, f"repeats must be >= 1, got {repeats}")
    seed = as_seed(seed)
    values = []
    last: DeltaMatrix | None = None
    last_halves: SplitHalves | None = None
    for r in range(repeats):
        rng = np.random.default_rng([seed, r])
        halves = split_stratified(pair, rng)
        permuted = permute_within_class(halves.permutation_source, rng)
        counts = count_cross_runs(halves, permuted)
        dm = delta_from_counts(halves, counts)
        values.append(1.0 - dm.total_cross / dm.n)
        last, last_halves = dm, halves
    assert last is not None and last_halves is not None
    value = float(np.mean(values))
    if clamp:
        value = min(max(value, 0.0), 1.0)
    return BoundEstimate(
        value=value,
        per_repeat=tuple(values),
        delta=last,
        priors_original=last_halves.n_original / last.n,
        priors_permuted=last_halves.n_source / last.n,
        seed=seed,
        repeats=repeats,
    )


def pairwise_fr_baseline(pair: PairSample, seed) -> PairwiseBaseline:
    """Pairwise comparator: one MST per ordered (original, permuted) class pair.

    Uses the same split and permutation stream as repeat 0 of
    :func:`estimate_pair_bound`, then solves m^2 independent two-sample
    sub-problems of size ``n'_a + n_b`` instead of one global problem. Only
    used for runtime comparisons, never for the bound.
    """
    seed = as_seed(seed)
    rng = np.random.default_rng([seed, 0])
    halves = split_stratified(pair, rng)
    if halves.classes.size < 2:
        raise ValidationError("the pairwise baseline needs at least two classes")
    permuted = permute_within_class(halves.permutation_source, rng)

    orig = halves.original_half
    orig_groups = class_indices(orig.labels)
    perm_groups = class_indices(permuted.labels)
    m = halves.classes.size
    counts = np.zeros((m, m), dtype=np.int64)
    sizes = np.zeros((m, m), dtype=np.int64)
    for a, ca in enumerate(halves.classes):
        rows_a = orig_groups[int(ca)]
        for b, cb in enumerate(halves.classes):
            rows_b = perm_groups[int(cb)]
            cloud = PointCloud(
                points=np.vstack([orig.points[rows_a], permuted.points[rows_b]]),
                tags=np.concatenate(
                    [np.zeros(rows_a.size, np.int64), np.ones(rows_b.size, np.int64)]
                ),
            )
            tree = build_mst(cloud)
            counts[a, b] = cross_edge_counts(tree, cloud.tags).pair(0, 1)
            sizes[a, b] = cloud.n_points
    return PairwiseBaseline(
        counts=counts,
        sizes=sizes,
        work_proxy=int((sizes.astype(np.int64) ** 2).sum()),
        classes=halves.classes,
        seed=seed,
    )
