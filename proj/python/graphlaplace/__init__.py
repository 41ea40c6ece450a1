"""Spectral methods, fractional operators and Gaussian fields on metric graphs."""

from ._core import (
    Basis,
    Graph,
    GraphLaplaceError,
    __version__,
    apply_fractional,
    covariance_series,
    dot_h_norm,
    eigensolve,
    load_graph,
    main,
    parse_graph,
    sample_field,
    solve_fractional,
    synthesize,
    verify,
)

__all__ = [
    "Basis",
    "Graph",
    "GraphLaplaceError",
    "__version__",
    "apply_fractional",
    "covariance_series",
    "dot_h_norm",
    "eigensolve",
    "load_graph",
    "main",
    "parse_graph",
    "sample_field",
    "solve_fractional",
    "synthesize",
    "verify",
]
