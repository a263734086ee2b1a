"""Sparse tensor best rank-1 approximation.

Four approximation algorithms with worst-case lower bounds, alternating
maximization refinement (l0 and l1 models), and a deflation-based tensor
clustering pipeline, plus generators and a benchmark harness.

The hot AM sweep loop ships as a compiled extension with a NumPy fallback;
``sparse_rank1.BACKEND`` reports which one is active and the
``SPARSE_RANK1_BACKEND`` environment variable (``auto``/``c``/``python``)
overrides the choice.
"""

from ._backend import BACKEND
from .approx import (
    algorithm_a,
    algorithm_b,
    algorithm_c,
    algorithm_d,
    brute_force_oracle,
    objective,
    run_algorithm,
    theoretical_bound,
    upper_bound,
)
from .cluster import (
    BicScore,
    ClusterAssignment,
    DeflationModel,
    StcConfig,
    bic,
    cluster_error,
    deflate,
    kmeans,
    reduced_samples,
    select_k,
    select_model,
    stack_samples,
    stc_pipeline,
)
from .errors import (
    BadCardinality,
    BadK,
    BadN,
    DimensionMismatch,
    Error,
    IndexOutOfRange,
    InfeasibleInit,
    InputError,
    LengthMismatch,
    ModeOutOfRange,
    NumericalError,
    ShapeMismatch,
    TooLarge,
    ZeroInput,
    ZeroMatrix,
    ZeroTensor,
)
from .factors import Rank1Result, SparseFactorSet, SparsityBudget
from .generate import gen_cluster_synthetic, gen_sparse_cp
from .linalg import SingularTriple, lambda_max, leading_singular_triple
from .refine import AmConfig, AmTrace, am_l0, am_l1, random_feasible
from .sparsity import (
    TruncationResult,
    soft_threshold_normalize,
    truncate,
    truncate_normalize,
)
from .sten import read_sten, write_sten
from .tensor import (
    DenseTensor,
    fiber,
    frobenius_norm,
    inner,
    mode_unfold,
    multilinear_grad,
    multilinear_value,
    partial_hessian,
    rank1_outer,
    reshape,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    # tensor core
    "DenseTensor", "reshape", "mode_unfold", "fiber", "multilinear_value",
    "multilinear_grad", "partial_hessian", "rank1_outer", "frobenius_norm",
    "inner", "read_sten", "write_sten",
    # sparsity
    "TruncationResult", "truncate", "truncate_normalize", "soft_threshold_normalize",
    # linear algebra
    "SingularTriple", "leading_singular_triple", "lambda_max",
    # rank-1 approximation
    "SparsityBudget", "SparseFactorSet", "Rank1Result", "objective",
    "algorithm_a", "algorithm_b", "algorithm_c", "algorithm_d", "run_algorithm",
    "upper_bound", "brute_force_oracle", "theoretical_bound",
    # refinement
    "AmConfig", "AmTrace", "am_l0", "am_l1", "random_feasible",
    # clustering
    "DeflationModel", "ClusterAssignment", "BicScore", "StcConfig",
    "stack_samples", "deflate", "reduced_samples", "kmeans", "cluster_error",
    "bic", "select_model", "select_k", "stc_pipeline",
    # generators
    "gen_sparse_cp", "gen_cluster_synthetic",
    # errors
    "Error", "InputError", "NumericalError", "ShapeMismatch", "DimensionMismatch",
    "ModeOutOfRange", "IndexOutOfRange", "BadCardinality", "InfeasibleInit",
    "BadK", "BadN", "LengthMismatch", "TooLarge", "ZeroInput", "ZeroMatrix",
    "ZeroTensor",
]
