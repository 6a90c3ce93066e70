"""Labeled datasets: CSV ingestion, synthetic Gaussian mixtures, partitioning.

Class labels are stored as contiguous integers ``1..m``; the original label
strings survive in :attr:`Dataset.label_names` so files can be written back
unchanged.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .validation import (
    ValidationError,
    as_float_matrix,
    as_label_vector,
    class_indices,
    ensure,
)


@dataclass
class Dataset:
    """A real feature matrix with integer class labels in ``{1..m}``.

    Parameters
    ----------
    features : ndarray of shape (n_samples, n_features)
        Finite float feature values.
    labels : ndarray of shape (n_samples,)
        Class ids; every id in ``{1..m}`` must occur at least once.
    m : int
        Number of classes.
    feature_names : tuple of str, optional
        Column names, defaulting to ``x0..x{d-1}`` on write.
    label_names : tuple of str, optional
        Original label of class ``c`` at position ``c - 1``.
    """

    features: np.ndarray
    labels: np.ndarray
    m: int
    feature_names: tuple[str, ...] | None = None
    label_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        self.features = as_float_matrix(self.features, "features")
        self.labels = as_label_vector(self.labels, "labels")
        ensure(
            self.features.shape[0] == self.labels.shape[0],
            f"features has {self.features.shape[0]} rows but labels has "
            f"{self.labels.shape[0]} entries",
        )
        ensure(self.m >= 1, f"class count must be >= 1, got {self.m}")
        present = np.unique(self.labels)
        if present.size != self.m or present[0] != 1 or present[-1] != self.m:
            raise ValidationError(
                f"labels must cover every class in 1..{self.m}; found {present.tolist()}"
            )
        if self.feature_names is not None:
            ensure(
                len(self.feature_names) == self.n_features,
                "feature_names length must match the feature count",
            )
        if self.label_names is not None:
            ensure(
                len(self.label_names) == self.m,
                "label_names length must match the class count",
            )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass
class ClassPartition:
    """Row indices of a dataset grouped by class id."""

    groups: dict[int, np.ndarray]

    def sizes(self) -> dict[int, int]:
        return {c: int(idx.size) for c, idx in self.groups.items()}


@dataclass
class PairSample:
    """Two feature columns ``(s, t)`` of a dataset together with the labels."""

    s: int
    t: int
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        ensure(self.s < self.t, f"require s < t, got ({self.s}, {self.t})")
        self.points = as_float_matrix(self.points, "points")
        ensure(self.points.shape[1] == 2, "points must have exactly two columns")
        self.labels = as_label_vector(self.labels, "labels")
        ensure(
            self.points.shape[0] == self.labels.shape[0],
            "points and labels must have the same length",
        )

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SyntheticSpec:
    """Configuration of a Gaussian-mixture dataset with lattice class means.

    Each class ``i`` is an isotropic normal ``N(mean_scale * v_i, cov_scale * I)``
    in ``dim`` dimensions, where ``v_i`` enumerates an integer lattice (see
    :func:`lattice_means`). ``mean_scale`` therefore acts as a single
    separation knob between neighbouring classes.
    """

    m: int
    per_class: int
    mean_scale: float = 0.5
    cov_scale: float = 0.1
    dim: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        ensure(self.m >= 1, f"m must be >= 1, got {self.m}")
        ensure(
            self.per_class >= 4,
            f"per_class must be >= 4 so stratified halving leaves >= 2 rows "
            f"per class per half, got {self.per_class}",
        )
        ensure(self.cov_scale > 0, f"cov_scale must be > 0, got {self.cov_scale}")
        ensure(self.dim >= 1, f"dim must be >= 1, got {self.dim}")
        ensure(self.seed >= 0, "seed must be non-negative")

    @property
    def n_samples(self) -> int:
        return self.m * self.per_class


def lattice_means(m: int, dim: int, scale: float) -> np.ndarray:
    """Deterministic class-mean placement on an integer lattice.

    Returns ``scale * v_i`` for ``i = 0..m-1`` where ``v_i`` is the mixed-radix
    expansion of ``i`` in the smallest base ``b >= 2`` with ``b**dim >= m``,
    least significant digit in coordinate 0. For ``m <= 2**dim`` this is the
    binary enumeration of hypercube vertices; larger ``m`` extends the same
    rule to a ``b``-ary grid.
    """
    ensure(m >= 1 and dim >= 1, "m and dim must be positive")
    base = 2
    while base**dim < m:
        base += 1
    out = np.zeros((m, dim))
    for i in range(m):
        q = i
        for k in range(dim):
            out[i, k] = q % base
            q //= base
    return scale * out


def generate_gaussian_mixture(spec: SyntheticSpec) -> Dataset:
    """Draw ``spec.per_class`` samples per class from its lattice Gaussian.

    Deterministic given ``spec.seed``: classes are drawn in ascending order
    from a single PCG64 stream. Rows are grouped by class, labels
    ``1..spec.m``.
    """
    means = lattice_means(spec.m, spec.dim, spec.mean_scale)
    rng = np.random.default_rng(spec.seed)
    sd = math.sqrt(spec.cov_scale)
    blocks = [
        means[i] + sd * rng.standard_normal((spec.per_class, spec.dim))
        for i in range(spec.m)
    ]
    features = np.vstack(blocks)
    labels = np.repeat(np.arange(1, spec.m + 1), spec.per_class)
    return Dataset(features=features, labels=labels, m=spec.m)


def partition_by_class(ds: Dataset) -> ClassPartition:
    """Group row indices by class id, ascending within each group."""
    return ClassPartition(groups=class_indices(ds.labels))


def extract_pair(ds: Dataset, s: int, t: int) -> PairSample:
    """Copy feature columns ``(s, t)`` without reordering rows."""
    if not (0 <= s < t < ds.n_features):
        raise ValidationError(
            f"require 0 <= s < t < {ds.n_features}, got (s, t) = ({s}, {t})"
        )
    points = np.column_stack([ds.features[:, s], ds.features[:, t]])
    return PairSample(s=s, t=t, points=points, labels=ds.labels.copy())


def _label_sort_key(raw: str):
    try:
        return (0, float(raw), raw)
    except ValueError:
        return (1, 0.0, raw)


def load_csv(path, label_column: str = "label") -> Dataset:
    """Load a dataset from a headered CSV file.

    Labels are re-encoded to contiguous ``1..m`` following the sorted order of
    the distinct raw values (numeric sort when every label parses as a number,
    lexicographic otherwise); the raw values are kept in
    :attr:`Dataset.label_names`. All non-label columns must be numeric and
    finite. Errors name the offending line and column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValidationError(
                f"{path}: label column {label_column!r} not found in header {header}"
            )
        label_pos = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_pos]

        rows: list[list[float]] = []
        raw_labels: list[str] = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ValidationError(
                    f"{path}: line {line_no} has {len(record)} cells, expected "
                    f"{len(header)}"
                )
            raw_labels.append(record[label_pos].strip())
            row = []
            for i, cell in enumerate(record):
                if i == label_pos:
                    continue
                name = header[i]
                try:
                    value = float(cell)
                except ValueError:
                    raise ValidationError(
                        f"{path}: non-numeric cell at line {line_no}, "
                        f"column {name!r}: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ValidationError(
                        f"{path}: non-finite value at line {line_no}, column {name!r}"
                    )
                row.append(value)
            rows.append(row)

    if not rows:
        raise ValidationError(f"{path}: no data rows")

    distinct = sorted(set(raw_labels), key=_label_sort_key)
    encoding = {raw: i + 1 for i, raw in enumerate(distinct)}
    labels = np.array([encoding[raw] for raw in raw_labels], dtype=np.int64)
    return Dataset(
        features=np.array(rows, dtype=np.float64),
        labels=labels,
        m=len(distinct),
        feature_names=tuple(feature_names),
        label_names=tuple(distinct),
    )


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write a dataset to CSV, restoring original label names when recorded.

    Floats are written with ``repr`` so a reload reproduces them bit-exactly.
    """
    names = ds.feature_names or tuple(f"x{k}" for k in range(ds.n_features))
    label_names = ds.label_names or tuple(str(c) for c in range(1, ds.m + 1))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [label_column])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [label_names[label - 1]])
