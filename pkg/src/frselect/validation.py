"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


class ValidationError(ValueError):
    """Raised when input data violates a documented precondition."""


def ensure(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def as_float_matrix(values, name: str) -> np.ndarray:
    """Coerce to a finite 2-D float64 array, raising ValidationError otherwise."""
    arr = np.asarray(values, dtype=np.float64)
    ensure(arr.ndim == 2, f"{name} must be a 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(
            f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}"
        )
    return arr


def as_label_vector(values, name: str) -> np.ndarray:
    """Coerce to a 1-D int64 label array."""
    arr = np.asarray(values)
    ensure(arr.ndim == 1, f"{name} must be a 1-D array, got ndim={arr.ndim}")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.asarray(arr, dtype=np.float64)
        if not np.all(rounded == np.round(rounded)):
            raise ValidationError(f"{name} must contain integer class ids")
        arr = rounded.astype(np.int64)
    return arr.astype(np.int64)


def as_seed(seed) -> int:
    """Coerce to a non-negative integer seed."""
    value = int(seed)
    ensure(value >= 0, f"seed must be non-negative, got {value}")
    return value


def derive_seed(master, *key: int) -> int:
    """Mix a master seed with integer keys into a fresh 64-bit seed.

    Feeds ``[master, *key]`` through numpy's SeedSequence spreading, so
    derived streams are independent of the order jobs execute in.
    """
    entropy = [as_seed(master)] + [int(k) for k in key]
    ensure(all(k >= 0 for k in entropy), "seed-derivation keys must be non-negative")
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def class_indices(labels: np.ndarray) -> dict[int, np.ndarray]:
    """Map each class id to the ascending row indices carrying it."""
    return {int(c): np.flatnonzero(labels == c) for c in np.unique(labels)}
