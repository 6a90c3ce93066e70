import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frselect import (
    Dataset,
    SyntheticSpec,
    ValidationError,
    extract_pair,
    generate_gaussian_mixture,
    lattice_means,
    load_csv,
    partition_by_class,
    save_csv,
)


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_labels_reencoded_in_sorted_order(self, tmp_path):
        path = write_csv(tmp_path, "x0,x1,label\n1,2,a\n3,4,b\n5,6,a\n")
        ds = load_csv(path)
        assert ds.m == 2
        assert ds.labels.tolist() == [1, 2, 1]
        assert ds.label_names == ("a", "b")
        assert ds.feature_names == ("x0", "x1")

    def test_numeric_labels_sort_numerically(self, tmp_path):
        path = write_csv(tmp_path, "x0,label\n1,10\n2,2\n3,10\n")
        ds = load_csv(path)
        assert ds.label_names == ("2", "10")
        assert ds.labels.tolist() == [2, 1, 2]

    def test_nan_cell_reports_location(self, tmp_path):
        path = write_csv(tmp_path, "x0,x1,label\n1,nan,a\n")
        with pytest.raises(ValidationError, match="line 2.*'x1'"):
            load_csv(path)

    def test_single_class_allowed(self, tmp_path):
        path = write_csv(tmp_path, "x0,label\n1,z\n2,z\n")
        ds = load_csv(path)
        assert ds.m == 1
        assert ds.labels.tolist() == [1, 1]

    def test_missing_label_column(self, tmp_path):
        path = write_csv(tmp_path, "x0,x1\n1,2\n")
        with pytest.raises(ValidationError, match="label"):
            load_csv(path)

    def test_non_numeric_cell_reports_location(self, tmp_path):
        path = write_csv(tmp_path, "x0,x1,label\n1,2,a\n3,oops,b\n")
        with pytest.raises(ValidationError, match="line 3.*'x1'"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = write_csv(tmp_path, "")
        with pytest.raises(ValidationError, match="empty"):
            load_csv(path)

    def test_header_only(self, tmp_path):
        path = write_csv(tmp_path, "x0,label\n")
        with pytest.raises(ValidationError, match="no data rows"):
            load_csv(path)

    def test_round_trip_bit_exact(self, tmp_path):
        ds = generate_gaussian_mixture(SyntheticSpec(m=3, per_class=20, seed=5))
        path = tmp_path / "round.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.features, ds.features)
        assert back.labels.tolist() == ds.labels.tolist()
        assert back.m == ds.m


class TestGenerateGaussianMixture:
    def test_balanced_counts(self):
        ds = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=100, seed=7))
        assert ds.n_samples == 200
        assert np.bincount(ds.labels)[1:].tolist() == [100, 100]

    def test_deterministic_given_seed(self):
        spec = SyntheticSpec(m=2, per_class=100, seed=7)
        a = generate_gaussian_mixture(spec)
        b = generate_gaussian_mixture(spec)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_different_seeds_differ(self):
        a = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=10, seed=1))
        b = generate_gaussian_mixture(SyntheticSpec(m=2, per_class=10, seed=2))
        assert not np.array_equal(a.features, b.features)

    def test_sample_mean_matches_placement(self):
        # law of large numbers: sd of the mean is sqrt(0.1/1e4) ~ 0.003
        spec = SyntheticSpec(m=2, per_class=10_000, mean_scale=10.0, seed=3)
        ds = generate_gaussian_mixture(spec)
        means = lattice_means(2, 2, 10.0)
        got = ds.features[ds.labels == 1].mean(axis=0)
        assert np.all(np.abs(got - means[0]) <= 0.02)

    def test_per_class_minimum_enforced(self):
        with pytest.raises(ValidationError, match="per_class"):
            SyntheticSpec(m=2, per_class=3)


class TestLatticeMeans:
    def test_binary_enumeration_when_m_fits(self):
        got = lattice_means(4, 2, 1.0)
        assert got.tolist() == [[0, 0], [1, 0], [0, 1], [1, 1]]

    def test_three_dim_binary_order(self):
        got = lattice_means(3, 3, 0.5)
        assert got.tolist() == [[0, 0, 0], [0.5, 0, 0], [0, 0.5, 0]]

    def test_extends_past_hypercube(self):
        got = lattice_means(10, 2, 1.0)
        assert got.shape == (10, 2)
        # distinct positions
        assert len({tuple(row) for row in got.tolist()}) == 10

    def test_exact_power_keeps_base_two(self):
        got = lattice_means(8, 3, 1.0)
        assert got.max() == 1.0


class TestPartitionByClass:
    def test_example(self):
        ds = Dataset(features=np.zeros((3, 1)), labels=[1, 2, 1], m=2)
        part = partition_by_class(ds)
        assert part.groups[1].tolist() == [0, 2]
        assert part.groups[2].tolist() == [1]

    def test_single_class(self):
        ds = Dataset(features=np.zeros((4, 1)), labels=[1, 1, 1, 1], m=1)
        part = partition_by_class(ds)
        assert part.groups[1].tolist() == [0, 1, 2, 3]

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=40))
    def test_groups_disjoint_and_cover(self, raw_labels):
        labels = np.array(raw_labels)
        present = np.unique(labels)
        labels = np.searchsorted(present, labels) + 1
        ds = Dataset(features=np.zeros((len(labels), 1)), labels=labels, m=len(present))
        part = partition_by_class(ds)
        seen = np.concatenate(list(part.groups.values()))
        assert sorted(seen.tolist()) == list(range(len(labels)))
        assert sum(v.size for v in part.groups.values()) == len(labels)


class TestExtractPair:
    def test_identity_for_two_features(self, rng):
        ds = Dataset(features=rng.normal(size=(5, 2)), labels=[1, 1, 2, 2, 1], m=2)
        pair = extract_pair(ds, 0, 1)
        assert np.array_equal(pair.points, ds.features)
        assert np.array_equal(pair.labels, ds.labels)

    def test_equal_indices_rejected(self, rng):
        ds = Dataset(features=rng.normal(size=(4, 3)), labels=[1, 1, 2, 2], m=2)
        with pytest.raises(ValidationError):
            extract_pair(ds, 1, 1)
        with pytest.raises(ValidationError):
            extract_pair(ds, 2, 1)
        with pytest.raises(ValidationError):
            extract_pair(ds, 0, 3)

    def test_column_sums_preserved(self, rng):
        ds = Dataset(
            features=rng.normal(size=(30, 5)),
            labels=np.tile([1, 2], 15),
            m=2,
        )
        pair = extract_pair(ds, 2, 4)
        assert pair.points[:, 0].sum() == pytest.approx(ds.features[:, 2].sum(), abs=1e-12)
        assert pair.points[:, 1].sum() == pytest.approx(ds.features[:, 4].sum(), abs=1e-12)


class TestDatasetInvariants:
    def test_label_gap_rejected(self):
        with pytest.raises(ValidationError):
            Dataset(features=np.zeros((3, 1)), labels=[1, 3, 1], m=3)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError, match="non-finite"):
            Dataset(features=[[np.inf], [0.0]], labels=[1, 1], m=1)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Dataset(features=np.zeros((3, 1)), labels=[1, 1], m=1)
