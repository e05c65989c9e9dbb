"""Convex bi-clustering and tensor co-clustering via operator splitting."""

from ._backend import USING_COMPILED, backend_name
from .linsolve import CachedFactorization, factor, sylvester_solve, tensor_sylvester_solve
from .model import (
    ClusterAssignment,
    DifferenceOperator,
    ProblemInstance,
    WeightGraph,
    build_difference_operator,
    extract_clusters,
    gaussian_knn_weights,
    objective_value,
    uniform_weights,
)
from .proxops import GroupPenalty, dual_q, group_norms, moreau_check, project_dual_ball, prox_group
from .solvers import (
    ALGORITHMS,
    ConvergenceTrace,
    DivergenceError,
    SolverParams,
    SolverState,
    admm_solve,
    cobra_solve,
    davis_yin_solve,
    gadmm_solve,
    kkt_residual,
    operator_norm_bound,
    solve,
)
from .tensorcc import TensorSolverState, mode_product, mode_slice_norm_sum, tensor_solve

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "CachedFactorization",
    "ClusterAssignment",
    "ConvergenceTrace",
    "DifferenceOperator",
    "DivergenceError",
    "GroupPenalty",
    "ProblemInstance",
    "SolverParams",
    "SolverState",
    "TensorSolverState",
    "USING_COMPILED",
    "WeightGraph",
    "admm_solve",
    "backend_name",
    "build_difference_operator",
    "cobra_solve",
    "davis_yin_solve",
    "dual_q",
    "extract_clusters",
    "factor",
    "gadmm_solve",
    "gaussian_knn_weights",
    "group_norms",
    "kkt_residual",
    "mode_product",
    "mode_slice_norm_sum",
    "moreau_check",
    "objective_value",
    "operator_norm_bound",
    "project_dual_ball",
    "prox_group",
    "solve",
    "sylvester_solve",
    "tensor_solve",
    "tensor_sylvester_solve",
    "uniform_weights",
]
