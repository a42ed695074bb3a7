"""Zeroth-order variance-reduced descent ascent for stochastic minimax problems."""

from ._core import (
    DroInstance,
    QuadraticSaddle,
    compare_traces,
    isarah_defaults,
    maximize_regularized_simplex,
    project_simplex,
    run,
    run_experiment,
    vrgda_defaults,
)

__all__ = [
    "DroInstance",
    "QuadraticSaddle",
    "compare_traces",
    "isarah_defaults",
    "maximize_regularized_simplex",
    "project_simplex",
    "run",
    "run_experiment",
    "vrgda_defaults",
]
