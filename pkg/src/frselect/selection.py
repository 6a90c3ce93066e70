"""Feature-selection filter built on the pairwise dependency bound.

A bound matrix is estimated once over all feature pairs; per-feature scores
are its row sums. Features with the highest total pairwise conditional
dependency are the redundant ones, so the filter keeps the lowest-scoring
features. Raw (unclamped) bound values feed the scores: negative estimates
carry "very independent" signal and preserve the ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.model_selection import StratifiedKFold
from sklearn.neighbors import KNeighborsClassifier
from sklearn.utils.validation import check_is_fitted, validate_data

from .data import Dataset, extract_pair
from .estimator import estimate_pair_bound
from .validation import ValidationError, as_seed, derive_seed, ensure


@dataclass
class BoundMatrix:
    """Symmetric matrix of pairwise bound estimates with a zero diagonal."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        d = self.matrix.shape[0]
        ensure(self.matrix.shape == (d, d), "bound matrix must be square")
        ensure(bool(np.all(self.matrix == self.matrix.T)), "bound matrix must be symmetric")
        ensure(bool(np.all(np.diag(self.matrix) == 0.0)), "diagonal must be exactly 0")
        off = self.matrix[~np.eye(d, dtype=bool)]
        if off.size:
            ensure(
                bool(np.all((off > -1.0) & (off < 1.0))),
                "off-diagonal entries must lie in (-1, 1)",
            )

    @property
    def n_features(self) -> int:
        return self.matrix.shape[0]


@dataclass
class FeatureScores:
    """Per-feature totals of the pairwise bounds (row sums off the diagonal)."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)


@dataclass
class SelectionResult:
    """Kept/dropped feature indices after ranking by total dependency.

    ``tie_breaks`` lists the feature indices whose score equals the boundary
    score whenever that score group straddles the kept/dropped cut; ties are
    resolved by keeping the smaller index.
    """

    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    scores: FeatureScores
    tie_breaks: tuple[int, ...] = ()


def derive_pair_seed(seed: int, i: int, j: int) -> int:
    """Deterministic per-pair seed, symmetric in (i, j).

    Mixes ``(seed, min(i, j), max(i, j))``, so pair jobs can run in any order
    and the unordered pair (i, j) always sees the same stream.
    """
    a, b = sorted((int(i), int(j)))
    return derive_seed(seed, a, b)


def compute_bound_matrix(ds: Dataset, seed, repeats: int = 10) -> BoundMatrix:
    """Estimate the bound for every unordered feature pair and mirror it."""
    ensure(ds.n_features >= 2, "need at least two features")
    seed = as_seed(seed)
    d = ds.n_features
    matrix = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            pair = extract_pair(ds, i, j)
            est = estimate_pair_bound(pair, derive_pair_seed(seed, i, j), repeats)
            matrix[i, j] = matrix[j, i] = est.value
    return BoundMatrix(matrix=matrix)


def aggregate_scores(bounds: BoundMatrix) -> FeatureScores:
    """Row sums of the bound matrix (the diagonal is zero by construction)."""
    return FeatureScores(scores=bounds.matrix.sum(axis=1))


def select_k(scores: FeatureScores, k: int) -> SelectionResult:
    """Keep the ``k`` features with the lowest total pairwise dependency.

    The ``d - k`` highest scorers are dropped. Exact score ties are broken by
    keeping the smaller feature index, and any tie group straddling the cut
    is recorded.
    """
    s = scores.scores
    d = s.size
    if not 1 <= k <= d:
        raise ValidationError(f"k must be in [1, {d}], got {k}")
    order = np.lexsort((np.arange(d), s))
    kept = np.sort(order[:k])
    dropped = np.sort(order[k:])

    tie_breaks: tuple[int, ...] = ()
    if k < d:
        boundary = s[order[k - 1]]
        if boundary == s[order[k]]:
            tie_breaks = tuple(int(i) for i in np.flatnonzero(s == boundary))
    return SelectionResult(
        kept=tuple(int(i) for i in kept),
        dropped=tuple(int(i) for i in dropped),
        scores=scores,
        tie_breaks=tie_breaks,
    )


def select_above(scores: FeatureScores, threshold: float) -> SelectionResult:
    """Drop every feature whose total dependency exceeds ``threshold``."""
    s = scores.scores
    dropped = np.flatnonzero(s > threshold)
    if dropped.size == s.size:
        raise ValidationError(
            f"threshold {threshold} would drop all {s.size} features"
        )
    kept = np.flatnonzero(s <= threshold)
    return SelectionResult(
        kept=tuple(int(i) for i in kept),
        dropped=tuple(int(i) for i in dropped),
        scores=scores,
    )


def select_k_iterative(
    ds: Dataset, k: int, seed, repeats: int = 10
) -> tuple[BoundMatrix, FeatureScores, SelectionResult]:
    """Greedy variant: drop the single highest scorer, re-estimate, repeat.

    Off by default everywhere; the one-shot ranking of
    :func:`compute_bound_matrix` + :func:`select_k` is the reference
    behaviour. Returns the bound matrix and scores of the first (full) pass
    so diagnostics stay comparable.
    """
    if not 1 <= k <= ds.n_features:
        raise ValidationError(f"k must be in [1, {ds.n_features}], got {k}")
    first_bounds = compute_bound_matrix(ds, seed, repeats)
    first_scores = aggregate_scores(first_bounds)
    remaining = list(range(ds.n_features))
    dropped: list[int] = []
    current = first_scores.scores
    while len(remaining) > k:
        order = np.lexsort((np.arange(len(remaining)), current))
        dropped.append(remaining.pop(int(order[-1])))
        if len(remaining) > k:
            sub = Dataset(
                features=ds.features[:, remaining], labels=ds.labels.copy(), m=ds.m
            )
            current = aggregate_scores(compute_bound_matrix(sub, seed, repeats)).scores
    result = SelectionResult(
        kept=tuple(sorted(remaining)),
        dropped=tuple(sorted(dropped)),
        scores=first_scores,
    )
    return first_bounds, first_scores, result


def knn_holdout_accuracy(
    ds: Dataset,
    kept: tuple[int, ...] | list[int],
    k_neighbors: int = 5,
    folds: int = 5,
    seed=0,
) -> float:
    """Stratified cross-validated k-NN accuracy on the kept feature columns.

    Plain downstream evaluator for comparing feature subsets: Euclidean k-NN,
    ``folds``-fold stratified CV, deterministic given ``seed``.
    """
    ensure(folds >= 2, f"folds must be >= 2, got {folds}")
    ensure(k_neighbors >= 1, f"k_neighbors must be >= 1, got {k_neighbors}")
    kept = sorted(int(i) for i in kept)
    ensure(len(kept) >= 1, "kept must name at least one feature")
    if kept[0] < 0 or kept[-1] >= ds.n_features:
        raise ValidationError(f"kept indices out of range for d={ds.n_features}")
    counts = np.bincount(ds.labels)[1:]
    if counts.min() < folds:
        raise ValidationError(
            f"smallest class has {counts.min()} rows, fewer than folds={folds}"
        )

    X = ds.features[:, kept]
    y = ds.labels
    splitter = StratifiedKFold(
        n_splits=folds, shuffle=True, random_state=as_seed(seed) % (2**32)
    )
    accuracies = []
    for train, test in splitter.split(X, y):
        clf = KNeighborsClassifier(n_neighbors=k_neighbors, metric="euclidean")
        clf.fit(X[train], y[train])
        accuracies.append(float(np.mean(clf.predict(X[test]) == y[test])))
    return float(np.mean(accuracies))


class FRSelector(SelectorMixin, BaseEstimator):
    """Scikit-learn transformer dropping the most conditionally dependent features.

    Fitting estimates the pairwise bound matrix via the global spanning-tree
    statistic, sums it per feature, and keeps either the
    ``n_features_to_select`` lowest scorers or (with ``drop_above``) every
    feature at or below the score threshold. Exactly one of the two criteria
    must be set.

    Parameters
    ----------
    n_features_to_select : int, optional
        How many features to keep.
    drop_above : float, optional
        Score threshold; features scoring above it are dropped.
    repeats : int, default=10
        Estimator repeats averaged per feature pair.
    iterative : bool, default=False
        Re-estimate the matrix after each single drop (count mode only).
    random_state : int, default=0
        Master seed; per-pair seeds are derived from it.

    Attributes
    ----------
    bound_matrix_ : ndarray of shape (d, d)
    scores_ : ndarray of shape (d,)
    selection_ : SelectionResult
    """

    def __init__(
        self,
        n_features_to_select: int | None = None,
        drop_above: float | None = None,
        repeats: int = 10,
        iterative: bool = False,
        random_state: int = 0,
    ):
        self.n_features_to_select = n_features_to_select
        self.drop_above = drop_above
        self.repeats = repeats
        self.iterative = iterative
        self.random_state = random_state

    def fit(self, X, y):
        X, y = validate_data(self, X, y, ensure_min_features=2)
        if (self.n_features_to_select is None) == (self.drop_above is None):
            raise ValueError(
                "set exactly one of n_features_to_select and drop_above"
            )
        classes, encoded = np.unique(y, return_inverse=True)
        ds = Dataset(features=X, labels=encoded + 1, m=classes.size)
        self.classes_ = classes

        if self.n_features_to_select is not None and self.iterative:
            bounds, scores, result = select_k_iterative(
                ds, self.n_features_to_select, self.random_state, self.repeats
            )
        else:
            bounds = compute_bound_matrix(ds, self.random_state, self.repeats)
            scores = aggregate_scores(bounds)
            if self.n_features_to_select is not None:
                result = select_k(scores, self.n_features_to_select)
            else:
                result = select_above(scores, self.drop_above)

        self.bound_matrix_ = bounds.matrix
        self.scores_ = scores.scores
        self.selection_ = result
        mask = np.zeros(ds.n_features, dtype=bool)
        mask[list(result.kept)] = True
        self.support_mask_ = mask
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_mask_")
        return self.support_mask_
