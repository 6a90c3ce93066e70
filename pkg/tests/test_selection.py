import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.pipeline import Pipeline
from sklearn.neighbors import KNeighborsClassifier

from frselect import (
    BoundMatrix,
    Dataset,
    FeatureScores,
    FRSelector,
    SyntheticSpec,
    ValidationError,
    aggregate_scores,
    compute_bound_matrix,
    derive_pair_seed,
    generate_gaussian_mixture,
    knn_holdout_accuracy,
    select_above,
    select_k,
    select_k_iterative,
)

from conftest import redundant_dataset


class TestBoundMatrixValidation:
    def test_requires_symmetry(self):
        with pytest.raises(ValidationError, match="symmetric"):
            BoundMatrix(matrix=[[0.0, 0.2], [0.1, 0.0]])

    def test_requires_zero_diagonal(self):
        with pytest.raises(ValidationError, match="diagonal"):
            BoundMatrix(matrix=[[0.5, 0.2], [0.2, 0.0]])

    def test_entries_in_open_interval(self):
        with pytest.raises(ValidationError, match="-1, 1"):
            BoundMatrix(matrix=[[0.0, 1.0], [1.0, 0.0]])


class TestAggregateScores:
    def test_worked_example(self):
        matrix = np.zeros((3, 3))
        matrix[0, 1] = matrix[1, 0] = 0.8
        matrix[0, 2] = matrix[2, 0] = 0.1
        matrix[1, 2] = matrix[2, 1] = 0.2
        scores = aggregate_scores(BoundMatrix(matrix=matrix))
        assert scores.scores.tolist() == pytest.approx([0.9, 1.0, 0.3])

    def test_zero_matrix(self):
        scores = aggregate_scores(BoundMatrix(matrix=np.zeros((4, 4))))
        assert scores.scores.tolist() == [0.0] * 4

    def test_total_equals_twice_upper_triangle(self, rng):
        raw = rng.uniform(-0.5, 0.5, size=(6, 6))
        matrix = (raw + raw.T) / 2
        np.fill_diagonal(matrix, 0.0)
        scores = aggregate_scores(BoundMatrix(matrix=matrix))
        upper = matrix[np.triu_indices(6, k=1)].sum()
        assert scores.scores.sum() == pytest.approx(2 * upper, abs=1e-12)


class TestSelectK:
    def test_worked_example(self):
        scores = FeatureScores(scores=[0.9, 1.0, 0.3])
        result = select_k(scores, 2)
        assert result.kept == (0, 2)
        assert result.dropped == (1,)

    def test_keep_everything(self):
        scores = FeatureScores(scores=[0.5, 0.1, 0.7])
        result = select_k(scores, 3)
        assert result.kept == (0, 1, 2)
        assert result.dropped == ()

    def test_all_equal_scores_keep_smallest_index(self):
        result = select_k(FeatureScores(scores=[0.4, 0.4, 0.4]), 1)
        assert result.kept == (0,)
        assert result.tie_breaks == (0, 1, 2)

    def test_k_out_of_range(self):
        scores = FeatureScores(scores=[0.1, 0.2])
        with pytest.raises(ValidationError):
            select_k(scores, 0)
        with pytest.raises(ValidationError):
            select_k(scores, 3)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=2, max_size=10),
        st.floats(0.01, 100),
        st.floats(-50, 50),
        st.integers(min_value=1, max_value=10),
    )
    def test_affine_invariance(self, raw, a, b, k):
        k = min(k, len(raw))
        mapped_scores = [a * s + b for s in raw]
        # the claim needs the map to stay injective in float64; absorption
        # (e.g. 1.0 + 5e-324 == 1.0) legitimately merges ties
        same_pattern = all(
            (raw[i] == raw[j]) == (mapped_scores[i] == mapped_scores[j])
            for i in range(len(raw))
            for j in range(i + 1, len(raw))
        )
        assume(same_pattern)
        base = select_k(FeatureScores(scores=raw), k)
        mapped = select_k(FeatureScores(scores=mapped_scores), k)
        assert base.kept == mapped.kept
        assert base.dropped == mapped.dropped
        assert base.tie_breaks == mapped.tie_breaks


class TestSelectAbove:
    def test_drops_above_threshold(self):
        result = select_above(FeatureScores(scores=[0.1, 0.8, 0.3]), 0.3)
        assert result.kept == (0, 2)
        assert result.dropped == (1,)

    def test_refuses_to_drop_everything(self):
        with pytest.raises(ValidationError):
            select_above(FeatureScores(scores=[0.5, 0.6]), 0.1)


class TestComputeBoundMatrix:
    def test_two_features_single_entry(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=50, seed=4))
        bounds = compute_bound_matrix(ds, seed=1, repeats=2)
        assert bounds.matrix.shape == (2, 2)
        assert bounds.matrix[0, 1] == bounds.matrix[1, 0]
        assert bounds.matrix[0, 0] == 0.0

    def test_deterministic(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=50, dim=3, seed=4))
        a = compute_bound_matrix(ds, seed=9, repeats=2)
        b = compute_bound_matrix(ds, seed=9, repeats=2)
        assert np.array_equal(a.matrix, b.matrix)

    def test_pair_seed_symmetric(self):
        assert derive_pair_seed(7, 2, 5) == derive_pair_seed(7, 5, 2)
        assert derive_pair_seed(7, 2, 5) != derive_pair_seed(8, 2, 5)

    def test_duplicated_feature_dominates_matrix(self, rng):
        hits = 0
        runs = 20
        for run in range(runs):
            base = generate_gaussian_mixture(
                SyntheticSpec(m=2, per_class=150, dim=3, seed=100 + run)
            )
            noise = 0.02 * np.random.default_rng(run).standard_normal(base.n_samples)
            features = np.column_stack([base.features, base.features[:, 1] + noise])
            ds = Dataset(features=features, labels=base.labels, m=2)
            bounds = compute_bound_matrix(ds, seed=run, repeats=3)
            off = bounds.matrix.copy()
            np.fill_diagonal(off, -np.inf)
            if np.unravel_index(np.argmax(off), off.shape) in ((1, 3), (3, 1)):
                hits += 1
        assert hits >= 18


class TestKnnHoldout:
    def test_separable_classes_near_perfect(self):
        ds = generate_gaussian_mixture(
            SyntheticSpec(m=2, per_class=100, mean_scale=10.0, seed=3)
        )
        acc = knn_holdout_accuracy(ds, kept=(0, 1), seed=5)
        assert acc >= 0.99

    def test_shuffled_labels_hit_chance(self, rng):
        features = rng.normal(size=(400, 2))
        labels = np.array([1, 2] * 200)
        ds = Dataset(features=features, labels=labels, m=2)
        acc = knn_holdout_accuracy(ds, kept=(0, 1), seed=7)
        assert abs(acc - 0.5) <= 0.05

    def test_class_smaller_than_folds_rejected(self):
        ds = Dataset(
            features=np.random.default_rng(0).normal(size=(7, 2)),
            labels=[1, 1, 1, 1, 2, 2, 2],
            m=2,
        )
        with pytest.raises(ValidationError, match="folds"):
            knn_holdout_accuracy(ds, kept=(0,), folds=5)

    def test_kept_indices_validated(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=20, seed=1))
        with pytest.raises(ValidationError):
            knn_holdout_accuracy(ds, kept=(0, 5))


class TestIterativeSelection:
    def test_keep_all_is_noop(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=40, dim=3, seed=2))
        _, _, result = select_k_iterative(ds, 3, seed=1, repeats=2)
        assert result.kept == (0, 1, 2)

    def test_drops_redundant_chain(self):
        ds = redundant_dataset(seed=5, per_class=100)
        _, _, result = select_k_iterative(ds, 4, seed=3, repeats=3)
        assert 4 in result.dropped and 5 in result.dropped


class TestFRSelector:
    def test_fit_transform_keeps_informative_features(self):
        ds = redundant_dataset(seed=11, per_class=100)
        selector = FRSelector(n_features_to_select=4, repeats=3, random_state=2)
        reduced = selector.fit_transform(ds.features, ds.labels)
        assert reduced.shape == (ds.n_samples, 4)
        assert selector.get_support().sum() == 4
        assert not selector.get_support()[4]
        assert not selector.get_support()[5]

    def test_requires_exactly_one_criterion(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=20, seed=1))
        with pytest.raises(ValueError, match="exactly one"):
            FRSelector().fit(ds.features, ds.labels)
        with pytest.raises(ValueError, match="exactly one"):
            FRSelector(n_features_to_select=1, drop_above=0.5).fit(
                ds.features, ds.labels
            )

    def test_threshold_mode(self):
        ds = redundant_dataset(seed=3, per_class=100)
        selector = FRSelector(drop_above=0.5, repeats=3, random_state=1)
        selector.fit(ds.features, ds.labels)
        assert set(selector.selection_.dropped) >= {4, 5}

    def test_accepts_arbitrary_label_values(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=50, seed=8))
        labels = np.where(ds.labels == 1, -7, 13)
        selector = FRSelector(n_features_to_select=1, repeats=2, random_state=0)
        selector.fit(ds.features, labels)
        assert selector.classes_.tolist() == [-7, 13]

    def test_clone_and_get_params(self):
        selector = FRSelector(n_features_to_select=2, repeats=5, random_state=42)
        params = selector.get_params()
        assert params["n_features_to_select"] == 2
        assert params["repeats"] == 5
        cloned = clone(selector)
        assert cloned.get_params() == params

    def test_composes_in_pipeline(self):
        ds = redundant_dataset(seed=9, per_class=100)
        pipe = Pipeline(
            [
                ("filter", FRSelector(n_features_to_select=3, repeats=2, random_state=3)),
                ("clf", KNeighborsClassifier(n_neighbors=5)),
            ]
        )
        pipe.fit(ds.features, ds.labels)
        acc = pipe.score(ds.features, ds.labels)
        assert acc >= 0.9

    def test_deterministic_given_random_state(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=60, dim=3, seed=5))
        a = FRSelector(n_features_to_select=2, repeats=2, random_state=7)
        b = FRSelector(n_features_to_select=2, repeats=2, random_state=7)
        a.fit(ds.features, ds.labels)
        b.fit(ds.features, ds.labels)
        assert np.array_equal(a.bound_matrix_, b.bound_matrix_)
        assert a.selection_.kept == b.selection_.kept


def test_matrix_entry_recomputable_from_pair_seed():
    from frselect import estimate_pair_bound, extract_pair

    ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=60, dim=3, seed=6))
    bounds = compute_bound_matrix(ds, seed=5, repeats=2)
    direct = estimate_pair_bound(
        extract_pair(ds, 0, 2), derive_pair_seed(5, 2, 0), repeats=2
    )
    assert bounds.matrix[0, 2] == direct.value
    assert bounds.matrix[2, 0] == direct.value


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=1, max_size=12),
    st.integers(min_value=1, max_value=12),
)
def test_select_k_partitions_and_orders(raw, k):
    k = min(k, len(raw))
    result = select_k(FeatureScores(scores=raw), k)
    assert sorted(result.kept + result.dropped) == list(range(len(raw)))
    assert set(result.kept).isdisjoint(result.dropped)
    if result.dropped:
        scores = np.asarray(raw)
        assert scores[list(result.kept)].max() <= scores[list(result.dropped)].min()
