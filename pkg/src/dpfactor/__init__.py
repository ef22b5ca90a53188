"""Noise-correlation matrix factorizations for differentially private SGD.

Factor the prefix-workload matrix A = B C, add Gaussian noise to the
C-weighted contributions, and post-process with B.  The expected
approximation error sens(C) * ||B||_F / sqrt(n) drives every comparison
here: banded square-root and full square-root factorizations, identity
baselines, a numerically optimized banded factor, exact participation
sensitivity, and a bounded-memory streaming sampler for the noise.
"""

from .analysis import (
    ErrorReport,
    TABLE_COLUMNS,
    baseline_asymptotics,
    error_table,
    expected_error,
    lower_bound,
    report_row,
    resolve_k,
    sensitivity_of,
    sqrt_error_lower_bound,
    sqrt_error_upper_bound,
)
from .aof import (
    AofProblem,
    AofSolution,
    NotPositiveDefiniteError,
    aof_factorization,
    aof_gradient,
    aof_objective,
    aof_problem,
    aof_solve,
    extract_c_with_floor,
    project_feasible,
)
from .factor import (
    KINDS,
    Factorization,
    banded_sqrt_column,
    banded_sqrt_left_factor,
    invsqrt_series,
    make_factorization,
    reconstruction_error,
    sqrt_column,
)
from .noise import MonteCarloReport, NoiseStream, simulate_mechanism
from .sensitivity import (
    ENUMERATION_CAP,
    MonotonicityError,
    ParticipationSchema,
    count_participation_sets,
    leftmost_set_contribution_norm,
    participation_sets,
    sens_banded,
    sens_decreasing_toeplitz,
    sens_enumerated,
    sens_nondecreasing_toeplitz,
)
from .toeplitz import (
    SingularMatrixError,
    ToeplitzColumn,
    banded_forward_solve,
    convolve_truncated,
    ltt_frobenius_norm_sq,
    ltt_inverse,
    ltt_multiply,
    to_dense,
)
from .workload import (
    WorkloadSpec,
    geometric_column,
    nuclear_norm_lower_bound,
    prefix_sum_singular_value,
    prefix_sum_singular_values,
    workload_column,
)

__all__ = [
    "AofProblem",
    "AofSolution",
    "ENUMERATION_CAP",
    "ErrorReport",
    "Factorization",
    "KINDS",
    "MonotonicityError",
    "MonteCarloReport",
    "NoiseStream",
    "NotPositiveDefiniteError",
    "ParticipationSchema",
    "SingularMatrixError",
    "TABLE_COLUMNS",
    "ToeplitzColumn",
    "WorkloadSpec",
    "aof_factorization",
    "aof_gradient",
    "aof_objective",
    "aof_problem",
    "aof_solve",
    "banded_forward_solve",
    "banded_sqrt_column",
    "banded_sqrt_left_factor",
    "baseline_asymptotics",
    "convolve_truncated",
    "count_participation_sets",
    "error_table",
    "expected_error",
    "extract_c_with_floor",
    "geometric_column",
    "invsqrt_series",
    "leftmost_set_contribution_norm",
    "lower_bound",
    "ltt_frobenius_norm_sq",
    "ltt_inverse",
    "ltt_multiply",
    "make_factorization",
    "nuclear_norm_lower_bound",
    "participation_sets",
    "prefix_sum_singular_value",
    "prefix_sum_singular_values",
    "project_feasible",
    "reconstruction_error",
    "report_row",
    "resolve_k",
    "sens_banded",
    "sens_decreasing_toeplitz",
    "sens_enumerated",
    "sens_nondecreasing_toeplitz",
    "sensitivity_of",
    "simulate_mechanism",
    "sqrt_column",
    "sqrt_error_lower_bound",
    "sqrt_error_upper_bound",
    "to_dense",
    "workload_column",
]
