"""Random 2-dimensional simplicial complexes: exact homology, determinantal hypertrees, graphon bounds."""
from __future__ import annotations

from ._accel import backend
from .bounds import (
    cocycle_count,
    cohen_lenstra_pmf,
    discrete_f,
    one_out_bound,
    one_out_cocycle_prob,
    prob_cocycle_exact,
    prob_subcomplex_exact,
    upperb_bound,
    upperbf_bound,
)
from .complex import (
    Complex2,
    SignedBoundaryMatrix,
    boundary_submatrix,
    full_boundary,
    graph_coboundary,
    star_tree,
    t_counts,
)
from .errors import (
    CapacityError,
    FormatError,
    HyperlabError,
    InfiniteHomologyError,
    InvalidDimensionError,
    InvariantViolation,
    NumericalFailure,
)
from .experiment import ExperimentConfig, SummaryRecord, TrialRecord, gof_report, run_experiment, torsion_report
from .graphon import (
    StepGraphon,
    StepKernel,
    cut_norm_exact,
    entropy_H,
    f_functional,
    f_k_functional,
    graphon_of_graph,
    inner,
    l1_norm,
    linf_norm,
    op_product,
    rate_I,
    z_kernel,
)
from .homology import INFINITE, h1_f2_dim, h1_fp_dim, h1_torsion_order
from .linalg import BitMatrix, SnfResult, bareiss_det, gf2_rank, gram_det, p_torsion_dim, snf
from .samplers import (
    ProjectionBasis,
    RngState,
    enumerate_hypertrees,
    exact_measure,
    hypertree_projection_basis,
    sample_hypertree,
    sample_linial_meshulam,
    sample_one_out,
)
from .verify import verify_suite

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "CapacityError",
    "Complex2",
    "ExperimentConfig",
    "FormatError",
    "HyperlabError",
    "INFINITE",
    "InfiniteHomologyError",
    "InvalidDimensionError",
    "InvariantViolation",
    "NumericalFailure",
    "ProjectionBasis",
    "RngState",
    "SignedBoundaryMatrix",
    "SnfResult",
    "StepGraphon",
    "StepKernel",
    "SummaryRecord",
    "TrialRecord",
    "__version__",
    "annotations",
    "backend",
    "bareiss_det",
    "boundary_submatrix",
    "cocycle_count",
    "cohen_lenstra_pmf",
    "cut_norm_exact",
    "discrete_f",
    "entropy_H",
    "enumerate_hypertrees",
    "exact_measure",
    "f_functional",
    "f_k_functional",
    "full_boundary",
    "gf2_rank",
    "gof_report",
    "gram_det",
    "graph_coboundary",
    "graphon_of_graph",
    "h1_f2_dim",
    "h1_fp_dim",
    "h1_torsion_order",
    "hypertree_projection_basis",
    "inner",
    "l1_norm",
    "linf_norm",
    "one_out_bound",
    "one_out_cocycle_prob",
    "op_product",
    "p_torsion_dim",
    "prob_cocycle_exact",
    "prob_subcomplex_exact",
    "rate_I",
    "run_experiment",
    "sample_hypertree",
    "sample_linial_meshulam",
    "sample_one_out",
    "snf",
    "star_tree",
    "t_counts",
    "torsion_report",
    "upperb_bound",
    "upperbf_bound",
    "verify_suite",
    "z_kernel",
]
