"""Spectral projectors, eigenspace Wald tests and Katz-score inference."""

from __future__ import annotations

import json
from typing import Any, Sequence

import numpy as np

from . import _eiginf
from ._eiginf import (
    ConjugationError,
    DefectiveMatrixError,
    DominantRootTieError,
    Error,
    InputError,
    RankError,
    SpectralGapError,
    eig,
    katz,
    quasi_symmetry,
    run_cli,
    split,
)

__all__ = [
    "ConjugationError",
    "DefectiveMatrixError",
    "DominantRootTieError",
    "Error",
    "InputError",
    "RankError",
    "SpectralGapError",
    "decompose",
    "eig",
    "katz",
    "quasi_symmetry",
    "run_cli",
    "simulate",
    "split",
    "ttest",
    "wald",
]


def _decode(node):
    """JSON report -> Python, turning matrix and complex objects into arrays."""
    if isinstance(node, dict):
        if set(node) == {"rows", "cols", "data"}:
            return np.asarray(node["data"], dtype=float).reshape(node["rows"], node["cols"])
        if set(node) == {"real", "imag"}:
            return np.asarray(_decode(node["real"])) + 1j * np.asarray(_decode(node["imag"]))
        return {k: _decode(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_decode(v) for v in node]
    return node


def _load(text: str) -> dict[str, Any]:
    return _decode(json.loads(text))


def _matrices(observations: Sequence[np.ndarray] | None):
    if observations is None:
        return None
    return [np.asarray(o, dtype=float) for o in observations]


def decompose(m, select: str = "largest:1") -> dict[str, Any]:
    """Full decomposition document, same schema as the CLI."""
    return _load(_eiginf.decompose_json(np.asarray(m, dtype=float), select))


def wald(candidate, *, observations=None, mean=None, omega=None, n=None,
         select: str = "largest:1", orthocomplement: bool = False,
         structure: str = "full") -> dict[str, Any]:
    """Wald test that `candidate` lies in (or spans) the selected eigenspace.

    Give either a list of p x p `observations`, or `mean`, `omega` (p^2 x p^2,
    column-major vec order) and `n`.
    """
    return _load(_eiginf.wald_json(
        np.atleast_2d(np.asarray(candidate, dtype=float).T).T,
        observations=_matrices(observations), mean=mean, omega=omega, n=n,
        select=select, orthocomplement=orthocomplement, structure=structure))


def ttest(row: int, col: int, d0: float | None = None, *, observations=None,
          mean=None, omega=None, n=None, select: str = "largest:1") -> dict[str, Any]:
    """t-test on one coefficient of the normalized basis [D; I]. Indices are 0-based."""
    return _load(_eiginf.ttest_json(
        row, col, d0, observations=_matrices(observations), mean=mean,
        omega=omega, n=n, select=select))


def simulate(config: dict[str, Any] | str, *, seed: int | None = None,
             reps: int | None = None, threads: int = 1) -> dict[str, Any]:
    """Size/power study; `config` uses the CLI's JSON config schema."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _load(_eiginf.simulate_json(text, seed, reps, threads))
