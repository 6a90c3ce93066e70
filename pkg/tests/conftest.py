"""Shared builders for random models and synthetic datasets."""

from __future__ import annotations

import numpy as np
import pytest

from frselect import ConditionalModel, Dataset


def random_cov(rng: np.random.Generator, corr_limit: float = 0.85) -> np.ndarray:
    """A random 2x2 SPD covariance with bounded correlation."""
    v0, v1 = rng.uniform(0.4, 1.6, size=2)
    rho = rng.uniform(-corr_limit, corr_limit)
    off = rho * np.sqrt(v0 * v1)
    return np.array([[v0, off], [off, v1]])


def random_model(
    m: int, rng: np.random.Generator, corr_limit: float = 0.85
) -> ConditionalModel:
    """A random m-class bivariate Gaussian mixture with non-degenerate priors."""
    means = rng.uniform(-1.5, 1.5, size=(m, 2))
    covs = np.stack([random_cov(rng, corr_limit) for _ in range(m)])
    raw = rng.uniform(0.2, 1.0, size=m)
    priors = raw / raw.sum()
    return ConditionalModel(means=means, covs=covs, priors=priors)


# Class structure used by the redundancy benchmarks: four informative,
# conditionally independent features (bit patterns of the class index) plus a
# chain of two near-duplicates of feature 0. The duplicates acquire strictly
# larger dependency totals than feature 0 because the tightest pair is
# (4, 5), so the drop-highest filter removes them first.
def redundant_dataset(
    seed: int,
    per_class: int = 150,
    mean_scale: float = 2.0,
    cov_scale: float = 0.1,
) -> Dataset:
    rng = np.random.default_rng(seed)
    m = 4
    bits = np.array([(c & 1, (c >> 1) & 1) for c in range(m)])
    patterns = np.column_stack(
        [
            bits[:, 0],
            bits[:, 1],
            bits[:, 0] ^ bits[:, 1],
            bits[:, 0] & bits[:, 1],
        ]
    ).astype(float)

    sd = np.sqrt(cov_scale)
    blocks = []
    for c in range(m):
        base = mean_scale * patterns[c] + sd * rng.standard_normal((per_class, 4))
        dup1 = base[:, 0] + np.sqrt(0.05) * rng.standard_normal(per_class)
        dup2 = dup1 + np.sqrt(0.0005) * rng.standard_normal(per_class)
        blocks.append(np.column_stack([base, dup1, dup2]))
    features = np.vstack(blocks)
    labels = np.repeat(np.arange(1, m + 1), per_class)
    return Dataset(features=features, labels=labels, m=m)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def argv_from_config(subcommand: str, config: dict) -> list[str]:
    """Rebuild a CLI invocation from an envelope's config echo."""
    args = [subcommand]
    for key, value in sorted(config.items()):
        if value is None or value is False:
            continue
        if value is True:
            args.append(f"--{key}")
        else:
            args.extend([f"--{key}", str(value)])
    return args
