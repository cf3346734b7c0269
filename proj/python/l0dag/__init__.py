"""l0-penalized maximum likelihood for sparse Gaussian DAGs.

Node indices are 1-based everywhere in this package, matching the CLI files.
"""

from ._core import (
    Error,
    InvalidInput,
    NumericalError,
    __version__,
    ar1_model,
    check_conditions,
    connected_components,
    covariance_of,
    cpdag_shd,
    fit,
    gram_schmidt,
    local_score,
    minimal_edge_imap,
    neg_log_likelihood,
    random_sparse_dag,
    run_experiment,
    sample_sem,
    theorem_constants,
)

__all__ = [
    "Error",
    "InvalidInput",
    "NumericalError",
    "__version__",
    "ar1_model",
    "check_conditions",
    "connected_components",
    "covariance_of",
    "cpdag_shd",
    "fit",
    "gram_schmidt",
    "local_score",
    "minimal_edge_imap",
    "neg_log_likelihood",
    "random_sparse_dag",
    "run_experiment",
    "sample_sem",
    "theorem_constants",
]
