"""JSON schemas for the result envelopes emitted by the CLI."""

from __future__ import annotations


def _number_matrix() -> dict:
    return {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}


def _number_list() -> dict:
    return {"type": "array", "items": {"type": "number"}}


def _integer_list() -> dict:
    return {"type": "array", "items": {"type": "integer"}}


ESTIMATE_PAYLOAD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": [
        "value",
        "n",
        "total_cross",
        "repeats",
        "seed",
        "per_repeat_values",
        "classes",
        "priors_original",
        "priors_permuted",
        "cross_counts",
        "delta",
    ],
    "properties": {
        "value": {"type": "number"},
        "n": {"type": "integer", "minimum": 1},
        "total_cross": {"type": "integer", "minimum": 0},
        "repeats": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "per_repeat_values": _number_list(),
        "classes": _integer_list(),
        "priors_original": _number_list(),
        "priors_permuted": _number_list(),
        "cross_counts": _number_matrix(),
        "delta": _number_matrix(),
    },
}

SELECT_PAYLOAD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["bound_matrix", "scores", "kept", "dropped", "tie_breaks", "knn"],
    "properties": {
        "bound_matrix": _number_matrix(),
        "scores": _number_list(),
        "kept": _integer_list(),
        "dropped": _integer_list(),
        "tie_breaks": _integer_list(),
        "knn": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kept", "all"],
                    "properties": {
                        "kept": {"type": "number"},
                        "all": {"type": "number"},
                    },
                },
            ]
        },
    },
}

SIMULATE_MSE_PAYLOAD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rows"],
    "properties": {
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["m", "n_total", "iters", "mse", "mean_estimate", "bound_true"],
                "properties": {
                    "m": {"type": "integer", "minimum": 1},
                    "n_total": {"type": "integer", "minimum": 1},
                    "iters": {"type": "integer", "minimum": 1},
                    "mse": {"type": "number", "minimum": 0},
                    "mean_estimate": {"type": "number"},
                    "bound_true": {"type": "number"},
                },
            },
        }
    },
}

BENCH_PAYLOAD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rows"],
    "properties": {
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": [
                    "m",
                    "n_total",
                    "t_global_s",
                    "t_pairwise_s",
                    "ratio",
                    "subproblems",
                    "work_proxy_global",
                    "work_proxy_pairwise",
                ],
                "properties": {
                    "m": {"type": "integer", "minimum": 2},
                    "n_total": {"type": "integer", "minimum": 1},
                    "t_global_s": {"type": "number", "exclusiveMinimum": 0},
                    "t_pairwise_s": {"type": "number", "exclusiveMinimum": 0},
                    "ratio": {"type": "number", "exclusiveMinimum": 0},
                    "subproblems": {"type": "integer", "minimum": 4},
                    "work_proxy_global": {"type": "integer", "minimum": 1},
                    "work_proxy_pairwise": {"type": "integer", "minimum": 1},
                },
            },
        }
    },
}

PAYLOAD_SCHEMAS = {
    "estimate": ESTIMATE_PAYLOAD_SCHEMA,
    "select": SELECT_PAYLOAD_SCHEMA,
    "simulate-mse": SIMULATE_MSE_PAYLOAD_SCHEMA,
    "bench": BENCH_PAYLOAD_SCHEMA,
}


def envelope_schema(subcommand: str) -> dict:
    """Full envelope schema for one subcommand."""
    return {
        "type": "object",
        "additionalProperties": False,
        "required": [
            "tool",
            "subcommand",
            "config",
            "created_utc",
            "elapsed_s",
            "payload",
        ],
        "properties": {
            "tool": {
                "type": "object",
                "required": ["name", "version"],
                "properties": {
                    "name": {"const": "frselect"},
                    "version": {"type": "string"},
                },
            },
            "subcommand": {"const": subcommand},
            "config": {"type": "object"},
            "created_utc": {"type": "string"},
            "elapsed_s": {"type": "number", "minimum": 0},
            "payload": PAYLOAD_SCHEMAS[subcommand],
        },
    }
