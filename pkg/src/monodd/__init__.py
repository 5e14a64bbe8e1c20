"""Monotone overlapping domain-decomposition solver for nonlinear
integro-parabolic equations with Volterra memory terms."""

from .discretization import (
    Field,
    Grid1D,
    Subrange,
    TridiagonalSystem,
    build_grid,
    sample_field,
    set_mmatrix_audit,
    solve_linear_parabolic,
    thomas_solve,
)
from .iteration import (
    ConvergenceHistory,
    Decomposition,
    IterationState,
    MonotoneChainError,
    Solution,
    dd_sweep,
    init_state,
    run_dd,
    run_single_domain,
)
from .model import (
    BoundaryCondition,
    Bracket,
    CatalogError,
    EllipticCoefficients,
    ProblemSpec,
    Reaction,
    SpaceTimeDomain,
    VolterraKernel,
    catalog_lookup,
    catalog_names,
    validate_problem,
)
from .verify import (
    OrderStudyResult,
    ResidualReport,
    check_bracket,
    check_monotone_chain,
    default_decomposition,
    m_matrix_check,
    order_study,
)
from .volterra import (
    StabilizerField,
    compute_stabilizers,
    eval_F1,
    eval_F1_field,
    eval_g,
    eval_g_row,
)

__all__ = [name for name in dir() if not name.startswith("_")]
