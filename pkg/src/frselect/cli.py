"""Command-line front end: estimation, selection, simulation and benchmarks.

Every run emits a result envelope (tool version, config echo, timestamps,
payload). The config echo holds the resolved value of every flag, so feeding
it back through the CLI reproduces the payload bit-exactly; benchmark wall
times are the one documented exception.

Exit codes: 0 success, 2 usage error, 3 data validation error, 4 internal
error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import statistics
import sys
import time
from datetime import datetime, timezone

import click
import numpy as np

from . import __version__
from .data import (
    Dataset,
    SyntheticSpec,
    extract_pair,
    generate_gaussian_mixture,
    lattice_means,
    load_csv,
)
from .estimator import estimate_pair_bound, pairwise_fr_baseline
from .oracle import ConditionalModel, QuadratureGrid, bound_true
from .selection import (
    aggregate_scores,
    compute_bound_matrix,
    knn_holdout_accuracy,
    select_above,
    select_k,
    select_k_iterative,
)
from .validation import ValidationError, derive_seed

EXIT_VALIDATION = 3
EXIT_INTERNAL = 4

_SYNTHETIC_KEYS = {
    "m": ("m", int),
    "per_class": ("per_class", int),
    "mu": ("mean_scale", float),
    "mean_scale": ("mean_scale", float),
    "cov": ("cov_scale", float),
    "cov_scale": ("cov_scale", float),
    "d": ("dim", int),
    "dim": ("dim", int),
    "seed": ("seed", int),
}


def parse_synthetic(text: str, default_seed: int) -> SyntheticSpec:
    """Parse a compact spec string like ``m=2,per_class=1000,mu=0.5,cov=0.1,d=2``."""
    kwargs = {"mean_scale": 0.5, "cov_scale": 0.1, "dim": 2, "seed": default_seed}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise click.UsageError(f"synthetic spec entry {chunk!r} is not key=value")
        key, raw = chunk.split("=", 1)
        key = key.strip().lower()
        if key not in _SYNTHETIC_KEYS:
            raise click.UsageError(
                f"unknown synthetic spec key {key!r}; expected one of "
                f"{sorted(_SYNTHETIC_KEYS)}"
            )
        field, cast = _SYNTHETIC_KEYS[key]
        try:
            kwargs[field] = cast(raw.strip())
        except ValueError:
            raise click.UsageError(
                f"synthetic spec value for {key!r} is not a {cast.__name__}: {raw!r}"
            ) from None
    for required in ("m", "per_class"):
        if required not in kwargs:
            raise click.UsageError(f"synthetic spec is missing {required!r}")
    try:
        return SyntheticSpec(**kwargs)
    except ValidationError as exc:
        raise click.UsageError(str(exc)) from None


def canonical_synthetic(spec: SyntheticSpec) -> str:
    return (
        f"m={spec.m},per_class={spec.per_class},mu={spec.mean_scale!r},"
        f"cov={spec.cov_scale!r},d={spec.dim},seed={spec.seed}"
    )


def _load_input(
    input_path: str | None,
    synthetic: str | None,
    label_column: str,
    default_seed: int,
) -> tuple[Dataset, dict]:
    if (input_path is None) == (synthetic is None):
        raise click.UsageError("provide exactly one of --input and --synthetic")
    if input_path is not None:
        ds = load_csv(input_path, label_column=label_column)
        return ds, {"input": input_path, "label-column": label_column}
    spec = parse_synthetic(synthetic, default_seed)
    return generate_gaussian_mixture(spec), {"synthetic": canonical_synthetic(spec)}


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.UsageError(f"{flag} must be a comma-separated integer list") from None
    if not values:
        raise click.UsageError(f"{flag} must name at least one value")
    return values


def make_envelope(subcommand: str, config: dict, payload: dict, elapsed_s: float) -> dict:
    return {
        "tool": {"name": "frselect", "version": __version__},
        "subcommand": subcommand,
        "config": config,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "elapsed_s": elapsed_s,
        "payload": payload,
    }


def _payload_rows(subcommand: str, payload: dict) -> tuple[list[str], list[list]]:
    """Flatten a payload into a plot-ready table for CSV output."""
    if subcommand == "estimate":
        header = ["value", "n", "total_cross", "repeats", "seed"]
        return header, [[payload[h] for h in header]]
    if subcommand == "select":
        header = ["feature", "score", "kept"]
        kept = set(payload["kept"])
        return header, [
            [i, s, int(i in kept)] for i, s in enumerate(payload["scores"])
        ]
    if subcommand == "simulate-mse":
        header = ["m", "n_total", "iters", "mse", "mean_estimate", "bound_true"]
        return header, [[row[h] for h in header] for row in payload["rows"]]
    if subcommand == "bench":
        header = [
            "m",
            "n_total",
            "t_global_s",
            "t_pairwise_s",
            "ratio",
            "subproblems",
            "work_proxy_global",
            "work_proxy_pairwise",
        ]
        return header, [[row[h] for h in header] for row in payload["rows"]]
    raise ValueError(f"no CSV table defined for {subcommand}")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(envelope: dict, fmt: str, output: str) -> None:
    if fmt == "json":
        text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    else:
        header, rows = _payload_rows(envelope["subcommand"], envelope["payload"])
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
        text = buf.getvalue()
    if output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def handle_errors(fn):
    """Map package errors to the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except Exception as exc:  # pragma: no cover - defensive
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(EXIT_INTERNAL)

    return wrapper


def input_options(fn):
    fn = click.option("--input", "input_path", type=click.Path(), default=None,
                      help="CSV file with a header row and a label column.")(fn)
    fn = click.option("--synthetic", default=None,
                      help="Synthetic spec, e.g. 'm=2,per_class=1000,mu=0.5,cov=0.1,d=2'.")(fn)
    fn = click.option("--label-column", default="label", show_default=True)(fn)
    return fn


def output_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                      default="json", show_default=True)(fn)
    fn = click.option("--output", default="-", show_default=True,
                      help="Output path, '-' for stdout.")(fn)
    return fn


seed_option = click.option(
    "--seed", type=int, default=0, show_default=True, envvar="FRSELECT_SEED",
    help="Master seed (env FRSELECT_SEED).",
)


@click.group()
@click.version_option(version=__version__, prog_name="frselect")
def main() -> None:
    """Conditional-dependency estimation and feature selection."""


@main.command()
@input_options
@click.option("--pair", default="0,1", show_default=True,
              help="Feature indices 's,t' with s < t.")
@seed_option
@click.option("--repeats", type=int, default=10, show_default=True)
@output_options
@handle_errors
def estimate(input_path, synthetic, label_column, pair, seed, repeats, fmt, output):
    """Estimate the dependency lower bound for one feature pair."""
    t0 = time.perf_counter()
    ds, source_echo = _load_input(input_path, synthetic, label_column, seed)
    parts = _parse_int_list(pair, "--pair")
    if len(parts) != 2:
        raise click.UsageError("--pair expects exactly two indices 's,t'")
    s, t = parts
    if not (0 <= s < t < ds.n_features):
        raise click.UsageError(
            f"--pair must satisfy 0 <= s < t < {ds.n_features}, got ({s}, {t})"
        )
    est = estimate_pair_bound(extract_pair(ds, s, t), seed, repeats)
    payload = {
        "value": est.value,
        "n": est.n,
        "total_cross": est.total_cross,
        "repeats": est.repeats,
        "seed": est.seed,
        "per_repeat_values": list(est.per_repeat),
        "classes": est.delta.classes.tolist(),
        "priors_original": est.priors_original.tolist(),
        "priors_permuted": est.priors_permuted.tolist(),
        "cross_counts": est.delta.cross_counts.tolist(),
        "delta": est.delta.delta.tolist(),
    }
    config = {
        **source_echo,
        "pair": f"{s},{t}",
        "seed": seed,
        "repeats": repeats,
        "format": fmt,
        "output": output,
    }
    emit(make_envelope("estimate", config, payload, time.perf_counter() - t0), fmt, output)


@main.command()
@input_options
@click.option("--keep", type=int, default=None, help="How many features to keep.")
@click.option("--drop-above", type=float, default=None,
              help="Drop features whose score exceeds this threshold.")
@click.option("--iterative", is_flag=True, default=False,
              help="Re-estimate the matrix after each drop (keep mode only).")
@click.option("--eval-knn", is_flag=True, default=False,
              help="Report k-NN cross-validated accuracy for kept vs all features.")
@click.option("--knn-neighbors", type=int, default=5, show_default=True)
@click.option("--knn-folds", type=int, default=5, show_default=True)
@seed_option
@click.option("--repeats", type=int, default=10, show_default=True)
@output_options
@handle_errors
def select(input_path, synthetic, label_column, keep, drop_above, iterative,
           eval_knn, knn_neighbors, knn_folds, seed, repeats, fmt, output):
    """Rank features by total pairwise dependency and drop the highest."""
    t0 = time.perf_counter()
    ds, source_echo = _load_input(input_path, synthetic, label_column, seed)
    if (keep is None) == (drop_above is None):
        raise click.UsageError("provide exactly one of --keep and --drop-above")
    if keep is not None and not 1 <= keep <= ds.n_features:
        raise click.UsageError(f"--keep must be in [1, {ds.n_features}], got {keep}")
    if iterative and keep is None:
        raise click.UsageError("--iterative requires --keep")

    if keep is not None and iterative:
        bounds, scores, result = select_k_iterative(ds, keep, seed, repeats)
    else:
        bounds = compute_bound_matrix(ds, seed, repeats)
        scores = aggregate_scores(bounds)
        result = select_k(scores, keep) if keep is not None else select_above(scores, drop_above)

    knn = None
    if eval_knn:
        knn = {
            "kept": knn_holdout_accuracy(
                ds, result.kept, knn_neighbors, knn_folds, derive_seed(seed, 1)
            ),
            "all": knn_holdout_accuracy(
                ds, tuple(range(ds.n_features)), knn_neighbors, knn_folds,
                derive_seed(seed, 1),
            ),
        }
    payload = {
        "bound_matrix": bounds.matrix.tolist(),
        "scores": scores.scores.tolist(),
        "kept": list(result.kept),
        "dropped": list(result.dropped),
        "tie_breaks": list(result.tie_breaks),
        "knn": knn,
    }
    config = {
        **source_echo,
        "seed": seed,
        "repeats": repeats,
        "format": fmt,
        "output": output,
        "eval-knn": eval_knn,
        "iterative": iterative,
        "knn-neighbors": knn_neighbors,
        "knn-folds": knn_folds,
    }
    if keep is not None:
        config["keep"] = keep
    if drop_above is not None:
        config["drop-above"] = drop_above
    emit(make_envelope("select", config, payload, time.perf_counter() - t0), fmt, output)


def pair_model(m: int, mean_scale: float, cov_scale: float) -> ConditionalModel:
    """Ground-truth model of features (0, 1) of a synthetic lattice mixture."""
    means = lattice_means(m, 2, mean_scale)
    covs = np.repeat(cov_scale * np.eye(2)[None, :, :], m, axis=0)
    priors = np.full(m, 1.0 / m)
    return ConditionalModel(means=means, covs=covs, priors=priors)


def run_mse_sweep(
    classes: list[int],
    sizes: list[int],
    iters: int,
    repeats: int,
    mean_scale: float,
    cov_scale: float,
    resolution: int,
    seed: int,
) -> list[dict]:
    """Estimation error sweep against the quadrature ground truth.

    For every (class count, total size) cell: draw ``iters`` fresh datasets,
    estimate the pair bound on features (0, 1) with ``repeats`` permutation
    repeats each, and report the mean squared error against the oracle value
    for that model. Rows are sorted by (m, n_total).
    """
    rows = []
    for m in sorted(classes):
        model = pair_model(m, mean_scale, cov_scale)
        truth = bound_true(model, QuadratureGrid.for_model(model, resolution))
        for n_total in sorted(sizes):
            per_class = n_total // m
            if per_class < 4:
                raise ValidationError(
                    f"size {n_total} leaves {per_class} rows per class for m={m}; "
                    f"need at least 4"
                )
            estimates = []
            for it in range(iters):
                spec = SyntheticSpec(
                    m=m,
                    per_class=per_class,
                    mean_scale=mean_scale,
                    cov_scale=cov_scale,
                    dim=2,
                    seed=derive_seed(seed, m, n_total, it, 0),
                )
                pair = extract_pair(generate_gaussian_mixture(spec), 0, 1)
                est = estimate_pair_bound(
                    pair, derive_seed(seed, m, n_total, it, 1), repeats
                )
                estimates.append(est.value)
            errors = [(v - truth) ** 2 for v in estimates]
            rows.append(
                {
                    "m": m,
                    "n_total": per_class * m,
                    "iters": iters,
                    "mse": float(np.mean(errors)),
                    "mean_estimate": float(np.mean(estimates)),
                    "bound_true": truth,
                }
            )
    return rows


@main.command("simulate-mse")
@click.option("--classes", default="2,5,10", show_default=True,
              help="Comma-separated class counts.")
@click.option("--sizes", default="500,2000,4000", show_default=True,
              help="Comma-separated total sample sizes.")
@click.option("--iters", type=int, default=50, show_default=True,
              help="Fresh data draws per cell.")
@click.option("--repeats", type=int, default=1, show_default=True,
              help="Permutation repeats per draw.")
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--cov", type=float, default=0.1, show_default=True)
@click.option("--grid-resolution", type=int, default=401, show_default=True)
@seed_option
@output_options
@handle_errors
def simulate_mse(classes, sizes, iters, repeats, mu, cov, grid_resolution, seed,
                 fmt, output):
    """Reproduce the estimation-error convergence sweep on synthetic mixtures."""
    t0 = time.perf_counter()
    class_list = _parse_int_list(classes, "--classes")
    size_list = _parse_int_list(sizes, "--sizes")
    rows = run_mse_sweep(class_list, size_list, iters, repeats, mu, cov,
                         grid_resolution, seed)
    config = {
        "classes": ",".join(str(c) for c in sorted(class_list)),
        "sizes": ",".join(str(s) for s in sorted(size_list)),
        "iters": iters,
        "repeats": repeats,
        "mu": mu,
        "cov": cov,
        "grid-resolution": grid_resolution,
        "seed": seed,
        "format": fmt,
        "output": output,
    }
    emit(make_envelope("simulate-mse", config, {"rows": rows}, time.perf_counter() - t0),
         fmt, output)


def run_bench(
    classes: list[int],
    sizes: list[int],
    runs: int,
    mean_scale: float,
    cov_scale: float,
    seed: int,
) -> list[dict]:
    """Wall-time comparison: one global MST versus one MST per class pair.

    Each cell times both methods on identical data, median of ``runs`` timed
    executions after one warm-up. The work proxies (sum of squared MST node
    counts) are recorded alongside; note that for balanced classes the two
    proxies coincide, so the measured gap comes from solving many small
    problems instead of one large one.
    """
    rows = []
    for m in sorted(classes):
        for n_total in sorted(sizes):
            per_class = n_total // m
            if per_class < 4:
                raise ValidationError(
                    f"size {n_total} leaves {per_class} rows per class for m={m}; "
                    f"need at least 4"
                )
            spec = SyntheticSpec(
                m=m, per_class=per_class, mean_scale=mean_scale,
                cov_scale=cov_scale, dim=2, seed=derive_seed(seed, m, n_total, 0),
            )
            pair = extract_pair(generate_gaussian_mixture(spec), 0, 1)
            est_seed = derive_seed(seed, m, n_total, 1)

            estimate_pair_bound(pair, est_seed, 1)
            baseline = pairwise_fr_baseline(pair, est_seed)
            t_global = []
            t_pairwise = []
            for _ in range(runs):
                t0 = time.perf_counter()
                est = estimate_pair_bound(pair, est_seed, 1)
                t_global.append(time.perf_counter() - t0)
                t0 = time.perf_counter()
                baseline = pairwise_fr_baseline(pair, est_seed)
                t_pairwise.append(time.perf_counter() - t0)
            tg = statistics.median(t_global)
            tp = statistics.median(t_pairwise)
            global_nodes = est.n + int(est.delta.n_source.sum())
            rows.append(
                {
                    "m": m,
                    "n_total": per_class * m,
                    "t_global_s": tg,
                    "t_pairwise_s": tp,
                    "ratio": tp / tg,
                    "subproblems": int(baseline.sizes.size),
                    "work_proxy_global": global_nodes**2,
                    "work_proxy_pairwise": baseline.work_proxy,
                }
            )
    return rows


@main.command()
@click.option("--classes", default="2,10", show_default=True)
@click.option("--sizes", default="1000,5000", show_default=True)
@click.option("--runs", type=int, default=5, show_default=True,
              help="Timed runs per cell (median reported) after one warm-up.")
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--cov", type=float, default=0.1, show_default=True)
@seed_option
@output_options
@handle_errors
def bench(classes, sizes, runs, mu, cov, seed, fmt, output):
    """Time the global estimator against the per-class-pair baseline."""
    t0 = time.perf_counter()
    class_list = _parse_int_list(classes, "--classes")
    size_list = _parse_int_list(sizes, "--sizes")
    if runs < 1:
        raise click.UsageError("--runs must be >= 1")
    rows = run_bench(class_list, size_list, runs, mu, cov, seed)
    config = {
        "classes": ",".join(str(c) for c in sorted(class_list)),
        "sizes": ",".join(str(s) for s in sorted(size_list)),
        "runs": runs,
        "mu": mu,
        "cov": cov,
        "seed": seed,
        "format": fmt,
        "output": output,
    }
    emit(make_envelope("bench", config, {"rows": rows}, time.perf_counter() - t0),
         fmt, output)


if __name__ == "__main__":
    main()
