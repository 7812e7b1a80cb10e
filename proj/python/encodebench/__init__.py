"""Encoding-model benchmarking with banded ridge regression.

Thin wrappers over the compiled ``_encodebench`` module. Structured results
come back as plain dicts; matrices are NumPy arrays.
"""

import json

from . import _encodebench as _core
from ._encodebench import (
    DataError,
    Error,
    FormatError,
    TruncationError,
    ValidationError,
    bh_fdr,
    build_oasm,
    default_alpha_grid,
    load_matrix,
    oasm_sigma_grid,
    paired_ttest,
    preset_names,
    r2_oos,
    ridge_solve,
    save_matrix,
)

__all__ = [
    "DataError",
    "Error",
    "FormatError",
    "TruncationError",
    "ValidationError",
    "banded_search",
    "bh_fdr",
    "build_oasm",
    "compare",
    "default_alpha_grid",
    "load_matrix",
    "oasm_sigma_grid",
    "omega",
    "paired_ttest",
    "phi",
    "plan_grouped",
    "preset_names",
    "r2_oos",
    "ridge_solve",
    "save_matrix",
    "shuffle_plan",
    "synthesize",
]


def plan_grouped(block_ids, n_folds):
    """Nested grouped split plan as a dict."""
    return json.loads(_core.plan_grouped(list(block_ids), n_folds))


def shuffle_plan(plan, seed):
    """Same fold sizes as `plan`, with samples assigned at random."""
    return json.loads(_core.shuffle_plan(json.dumps(plan), seed))


def banded_search(spaces, responses, plan, seed=0, threads=1):
    """Fits per-unit banded ridge with nested cross-validation.

    `spaces` is a list of (name, matrix) or (name, matrix, band_group).
    Returns (summary dict, test predictions, intercept predictions).
    """
    triples = [(s[0], s[1], s[2] if len(s) > 2 else "") for s in spaces]
    summary, pred, intercept = _core.banded_search(
        triples, responses, json.dumps(plan), seed, threads)
    return json.loads(summary), pred, intercept


def omega(r2_m_star, r2_m_llm_star, r2_llm, participants):
    return json.loads(_core.omega(r2_m_star, r2_m_llm_star, r2_llm, list(participants)))


def phi(r2_oasm_llm_star, r2_oasm, participants):
    return json.loads(_core.phi(r2_oasm_llm_star, r2_oasm, list(participants)))


def synthesize(preset, directory, seed=0, units=0):
    """Writes a synthetic dataset and its compare config; returns the manifest path."""
    return _core.synthesize(preset, seed, units, directory)


def compare(config, output, threads=1):
    """Runs a full comparison, writes the report and returns its summary."""
    return json.loads(_core.compare(config, output, threads))
