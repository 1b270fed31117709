"""Greedy sparse subspace clustering (SSC / GSSC) with a C++ core."""

from ._core import (
    DegenerateInputError,
    InvalidArgumentError,
    NumericalError,
    build_affinity,
    cluster,
    compute_lambdas,
    make_dataset,
    misclassification,
    run_gssc,
    run_trial,
    shrink,
    solve,
    trial_seed,
)

__all__ = [
    "DegenerateInputError",
    "InvalidArgumentError",
    "NumericalError",
    "build_affinity",
    "cluster",
    "compute_lambdas",
    "make_dataset",
    "misclassification",
    "run_gssc",
    "run_trial",
    "shrink",
    "solve",
    "trial_seed",
]
