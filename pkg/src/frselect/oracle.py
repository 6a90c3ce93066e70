"""Ground truth by 2-D quadrature on known bivariate Gaussian mixtures.

Everything here is independent of the spanning-tree estimator: densities are
analytic and integrals use composite Simpson on a tensor grid, so any value
can be audited by hand. Serves as the reference the estimator is tested
against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data import PairSample
from .validation import ValidationError, as_seed, ensure

DENSITY_FLOOR = 1e-300


@dataclass
class ConditionalModel:
    """Per-class bivariate Gaussian joints with class priors.

    ``means[y]`` and ``covs[y]`` describe the joint of the feature pair given
    class ``y`` (0-indexed); ``priors`` must be positive and sum to one. The
    within-class marginals are the analytic 1-D Gaussians read off the mean
    vector and covariance diagonal.
    """

    means: np.ndarray
    covs: np.ndarray
    priors: np.ndarray

    def __post_init__(self) -> None:
        self.means = np.asarray(self.means, dtype=np.float64)
        self.covs = np.asarray(self.covs, dtype=np.float64)
        self.priors = np.asarray(self.priors, dtype=np.float64)
        ensure(self.means.ndim == 2 and self.means.shape[1] == 2, "means must be (m, 2)")
        m = self.means.shape[0]
        ensure(self.covs.shape == (m, 2, 2), "covs must be (m, 2, 2)")
        ensure(self.priors.shape == (m,), "priors must be (m,)")
        ensure(np.all(self.priors > 0), "every prior must be > 0")
        ensure(
            abs(float(self.priors.sum()) - 1.0) <= 1e-9,
            f"priors must sum to 1, got {self.priors.sum()!r}",
        )
        for y in range(m):
            cov = self.covs[y]
            ensure(
                abs(cov[0, 1] - cov[1, 0]) <= 1e-12,
                f"covariance of class {y} is not symmetric",
            )
            eigvals = np.linalg.eigvalsh(cov)
            ensure(
                bool(np.all(eigvals > 1e-12)),
                f"covariance of class {y} is not positive-definite "
                f"(eigenvalues {eigvals.tolist()})",
            )

    @property
    def m(self) -> int:
        return self.means.shape[0]

    def joint_pdf(self, y: int, x: np.ndarray) -> np.ndarray:
        """Bivariate normal density of class ``y`` at points ``x`` (..., 2)."""
        return _bvn_pdf(np.asarray(x, dtype=np.float64), self.means[y], self.covs[y])

    def product_pdf(self, y: int, x: np.ndarray) -> np.ndarray:
        """Product of the two within-class marginal densities of class ``y``."""
        x = np.asarray(x, dtype=np.float64)
        mean, cov = self.means[y], self.covs[y]
        return _norm_pdf(x[..., 0], mean[0], cov[0, 0]) * _norm_pdf(
            x[..., 1], mean[1], cov[1, 1]
        )

    def sample(self, per_class: int, seed) -> PairSample:
        """Draw ``per_class`` points from each class joint (balanced classes)."""
        ensure(per_class >= 1, "per_class must be >= 1")
        rng = np.random.default_rng(as_seed(seed))
        blocks = []
        for y in range(self.m):
            chol = np.linalg.cholesky(self.covs[y])
            z = rng.standard_normal((per_class, 2))
            blocks.append(self.means[y] + z @ chol.T)
        labels = np.repeat(np.arange(1, self.m + 1), per_class)
        return PairSample(s=0, t=1, points=np.vstack(blocks), labels=labels)


def _bvn_pdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    d0 = x[..., 0] - mean[0]
    d1 = x[..., 1] - mean[1]
    quad = (cov[1, 1] * d0 * d0 - 2.0 * cov[0, 1] * d0 * d1 + cov[0, 0] * d1 * d1) / det
    return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))


def _norm_pdf(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return np.exp(-0.5 * (x - mean) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


@dataclass(frozen=True)
class QuadratureGrid:
    """Composite-Simpson tensor grid over a rectangle.

    ``resolution`` points per axis (odd, >= 3). Use :meth:`for_model` to get
    bounds covering every class mean by at least six standard deviations per
    axis, which keeps the truncation error far below the quadrature
    tolerances used in the tests.
    """

    x_bounds: tuple[float, float]
    y_bounds: tuple[float, float]
    resolution: int = 401

    def __post_init__(self) -> None:
        ensure(
            self.resolution >= 3 and self.resolution % 2 == 1,
            f"Simpson resolution must be odd and >= 3, got {self.resolution}",
        )
        ensure(
            self.x_bounds[0] < self.x_bounds[1] and self.y_bounds[0] < self.y_bounds[1],
            "grid bounds must be increasing",
        )

    @classmethod
    def for_model(
        cls, model: ConditionalModel, resolution: int = 401, n_sigma: float = 6.0
    ) -> "QuadratureGrid":
        sds = np.sqrt(model.covs[:, [0, 1], [0, 1]])
        lo = (model.means - n_sigma * sds).min(axis=0)
        hi = (model.means + n_sigma * sds).max(axis=0)
        return cls(
            x_bounds=(float(lo[0]), float(hi[0])),
            y_bounds=(float(lo[1]), float(hi[1])),
            resolution=resolution,
        )

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(self.x_bounds[0], self.x_bounds[1], self.resolution)
        y = np.linspace(self.y_bounds[0], self.y_bounds[1], self.resolution)
        return x, y

    def mesh(self) -> np.ndarray:
        """Grid points as an array of shape (resolution, resolution, 2)."""
        x, y = self.axes()
        gx, gy = np.meshgrid(x, y, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def _simpson_weights(self, lo: float, hi: float) -> np.ndarray:
        h = (hi - lo) / (self.resolution - 1)
        w = np.full(self.resolution, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (h / 3.0)

    def integrate(self, values: np.ndarray) -> float:
        """Integrate grid samples ``values[i, j] = f(x_i, y_j)`` over the box."""
        values = np.asarray(values, dtype=np.float64)
        ensure(
            values.shape == (self.resolution, self.resolution),
            f"expected a {self.resolution}x{self.resolution} grid of samples",
        )
        wx = self._simpson_weights(*self.x_bounds)
        wy = self._simpson_weights(*self.y_bounds)
        return float(wx @ values @ wy)


def mixture_joint(model: ConditionalModel, x) -> np.ndarray | float:
    """Mixture joint density: sum_y p_y * joint(x | y)."""
    x = np.asarray(x, dtype=np.float64)
    out = sum(model.priors[y] * model.joint_pdf(y, x) for y in range(model.m))
    return float(out) if np.ndim(out) == 0 else out


def markov_joint(model: ConditionalModel, x) -> np.ndarray | float:
    """Joint density under within-class independence: sum_y p_y * marg_s * marg_t.

    This is the density the feature pair would have if the two features were
    conditionally independent given the class; it coincides with
    :func:`mixture_joint` exactly when every class covariance is diagonal.
    """
    x = np.asarray(x, dtype=np.float64)
    out = sum(model.priors[y] * model.product_pdf(y, x) for y in range(model.m))
    return float(out) if np.ndim(out) == 0 else out


def _guarded_ratio(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    out = np.zeros_like(numer)
    ok = denom > DENSITY_FLOOR
    out[ok] = numer[ok] / denom[ok]
    return out


def delta_true(
    model: ConditionalModel, y: int, z: int, grid: QuadratureGrid | None = None
) -> float:
    """Class-pair integral f(x|y) * f(x_s|z) f(x_t|z) / (f + pi) by quadrature.

    ``y`` indexes the class carrying the joint density, ``z`` the class whose
    marginal product appears; the integrand is zeroed wherever the mixture
    denominator underflows (far tails only).
    """
    ensure(0 <= y < model.m and 0 <= z < model.m, "class indices out of range")
    grid = grid or QuadratureGrid.for_model(model)
    pts = grid.mesh()
    numer = model.joint_pdf(y, pts) * model.product_pdf(z, pts)
    denom = np.asarray(mixture_joint(model, pts)) + np.asarray(markov_joint(model, pts))
    return grid.integrate(_guarded_ratio(numer, denom))


def hp_divergence_half(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    grid: QuadratureGrid,
) -> float:
    """Henze-Penrose divergence at p = 1/2: ``1 - 2 * integral f g / (f + g)``.

    Zero when the densities coincide, approaching one as their supports
    separate. ``f`` and ``g`` must accept an (..., 2) array of points.
    """
    pts = grid.mesh()
    fv = np.asarray(f(pts), dtype=np.float64)
    gv = np.asarray(g(pts), dtype=np.float64)
    return 1.0 - 2.0 * grid.integrate(_guarded_ratio(fv * gv, fv + gv))


def conditional_gmi_true(
    model: ConditionalModel, grid: QuadratureGrid | None = None
) -> float:
    """Prior-weighted dependency: sum_y p_y * D_half(joint_y, product_y)."""
    grid = grid or QuadratureGrid.for_model(model)
    total = 0.0
    for y in range(model.m):
        total += model.priors[y] * hp_divergence_half(
            lambda x, y=y: model.joint_pdf(y, x),
            lambda x, y=y: model.product_pdf(y, x),
            grid,
        )
    return float(total)


def delta_matrix_true(
    model: ConditionalModel, grid: QuadratureGrid | None = None
) -> np.ndarray:
    """All class-pair integrals at once; entry [y, z] equals delta_true(y, z)."""
    grid = grid or QuadratureGrid.for_model(model)
    pts = grid.mesh()
    joints = np.stack([model.joint_pdf(y, pts) for y in range(model.m)])
    products = np.stack([model.product_pdf(z, pts) for z in range(model.m)])
    denom = (model.priors[:, None, None] * joints).sum(axis=0)
    denom = denom + (model.priors[:, None, None] * products).sum(axis=0)
    out = np.empty((model.m, model.m))
    for y in range(model.m):
        for z in range(model.m):
            out[y, z] = grid.integrate(_guarded_ratio(joints[y] * products[z], denom))
    return out


def bound_true(model: ConditionalModel, grid: QuadratureGrid | None = None) -> float:
    """Lower bound ``1 - 2 * sum_yz p_y p_z delta_yz`` on the conditional GMI.

    Equals :func:`conditional_gmi_true` when the model has a single class,
    and zero when every class covariance is diagonal; never exceeds the
    conditional GMI (convexity of the underlying divergence).
    """
    grid = grid or QuadratureGrid.for_model(model)
    deltas = delta_matrix_true(model, grid)
    weighted = model.priors[:, None] * model.priors[None, :] * deltas
    return float(1.0 - 2.0 * weighted.sum())


def save_model(model: ConditionalModel, path) -> None:
    """Write a model as JSON: one {prior, mean, cov} record per class."""
    payload = {
        "classes": [
            {
                "prior": float(model.priors[y]),
                "mean": model.means[y].tolist(),
                "cov": model.covs[y].tolist(),
            }
            for y in range(model.m)
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)


def load_model(path) -> ConditionalModel:
    """Load a model from JSON, validating all invariants."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    classes = payload.get("classes")
    if not isinstance(classes, list) or not classes:
        raise ValidationError(f"{path}: expected a non-empty 'classes' list")
    try:
        priors = [c["prior"] for c in classes]
        means = [c["mean"] for c in classes]
        covs = [c["cov"] for c in classes]
    except (TypeError, KeyError) as exc:
        raise ValidationError(
            f"{path}: every class record needs 'prior', 'mean' and 'cov'"
        ) from exc
    return ConditionalModel(means=np.array(means), covs=np.array(covs), priors=np.array(priors))
