"""Numerical and Monte Carlo laboratory for the logistic minimum
recursion: the distribution's special-function layer, two grid operators
with a shared fixed point, the equivalent unit-interval recursion, a
shared-weight coupling experiment on truncated Poisson weighted trees,
and the random assignment benchmark whose limit the recursion explains.
"""

from ._version import VERSION as __version__
from .assignment import (
    ZETA2,
    AssignmentResult,
    CostMatrix,
    brute_force_minimum,
    estimate_mean_objective,
    mean_objective_table,
    parisi_partial_sum,
    sample_costs,
    solve_exact,
)
from .beta import (
    BetaSequence,
    LimitDiagnostic,
    beta_seed,
    check_L_equation,
    eta_curve,
    next_beta,
    run_recursion,
)
from .grids import (
    NonIntegrableTailError,
    QuadratureSpec,
    TailFunction,
    UnitIntervalCurve,
    evaluate,
    integrate_right,
    integrate_unit,
    logistic_tail_grid,
    logistic_tail_squared_grid,
)
from .operators import (
    BivariateTailQuery,
    EnvelopeViolationError,
    OperatorIterate,
    apply_A,
    apply_T,
    bivariate_gamma_tail,
    envelope_seed_pair,
    iterate_to_fixed_point,
    normalized_product,
    random_envelope_member,
    random_envelope_pair,
    random_integrable_tail,
    sup_distance,
)
from .pwit import (
    BoundaryLaw,
    CouplingReport,
    CouplingRow,
    InnovationStream,
    PwitConfig,
    coupled_roots,
    estimate_min_law,
    estimate_root_law,
    run_coupling,
    sample_root,
    sample_roots,
)
from .stats import (
    EmpiricalLaw,
    MeanWithError,
    decrease_z_score,
    ks_critical_value,
    ks_pvalue,
    ks_statistic,
)

from . import logistic  # noqa: E402  (namespace module, kept importable whole)

__all__ = [
    "__version__",
    "logistic",
    # grids
    "TailFunction", "UnitIntervalCurve", "QuadratureSpec", "NonIntegrableTailError",
    "evaluate", "integrate_right", "integrate_unit",
    "logistic_tail_grid", "logistic_tail_squared_grid",
    # operators
    "apply_T", "apply_A", "iterate_to_fixed_point", "OperatorIterate",
    "BivariateTailQuery", "bivariate_gamma_tail", "EnvelopeViolationError",
    "envelope_seed_pair", "normalized_product", "sup_distance",
    "random_envelope_member", "random_envelope_pair", "random_integrable_tail",
    # unit-interval recursion
    "beta_seed", "next_beta", "run_recursion", "BetaSequence",
    "check_L_equation", "LimitDiagnostic", "eta_curve",
    # tree Monte Carlo
    "PwitConfig", "InnovationStream", "BoundaryLaw",
    "sample_root", "sample_roots", "coupled_roots", "run_coupling",
    "CouplingReport", "CouplingRow", "estimate_min_law", "estimate_root_law",
    # assignment benchmark
    "CostMatrix", "AssignmentResult", "sample_costs", "solve_exact",
    "brute_force_minimum", "estimate_mean_objective", "mean_objective_table",
    "parisi_partial_sum", "ZETA2",
    # statistics
    "ks_statistic", "ks_pvalue", "ks_critical_value",
    "EmpiricalLaw", "MeanWithError", "decrease_z_score",
]
