"""quadsum: sphere representation numbers, weighted theta series,
circle-method local densities, and mod-p equidistribution experiments
for the standard quadratic form Q(x, x) = x_1^2 + ... + x_d^2.
"""

from .arith import (
    PAdicSplit,
    epsilon,
    is_prime,
    j_prime_k,
    jacobi_symbol,
    p_adic_split,
)
from .density import (
    DensityGapCheck,
    DensityReport,
    DifferenceCheck,
    PhaseSumCheck,
    SingularSeriesValue,
    a_coeff_closed,
    a_coeff_direct,
    density_gap_check,
    difference_check,
    gamma_half_integer,
    gauss_sum,
    gauss_sum_prime_power,
    local_density,
    main_term,
    singular_series,
    twisted_unit_phase_sum_check,
    unit_phase_sum_check,
)
from .equidist import (
    DiscrepancyRecord,
    EmpiricalMeasure,
    GrowthRow,
    WindowSummary,
    coeff_growth_scan,
    decay_study,
    discrepancy_record,
    dyadic_windows,
    empirical_measure,
    sup_deviation,
    tv_to_uniform,
    weyl_sum,
)
from .errors import (
    EmptyMeasureError,
    QuadsumError,
    ResourceLimitError,
    ValidationError,
)
from .lattice import (
    SphereCount,
    count_range,
    enumerate_sphere,
    enumerated_counts,
    quadric_points,
    r4_jacobi,
    residue_census,
    residue_histogram,
)
from .theta import (
    INF,
    CoefficientSeries,
    CuspCheck,
    SumCheck,
    TestFunction,
    ThetaValue,
    TransformResidual,
    constant_function,
    cusp_check,
    even_projection,
    finite_fourier,
    half_power,
    is_in_gamma,
    op_L,
    op_M,
    op_Sj,
    origin_indicator,
    random_cusp_function,
    random_even_function,
    rsum_check,
    srw_profile,
    srw_sum,
    srw_vanishing,
    theta_coeffs,
    theta_eval,
    theta_eval_full,
    theta_j_eval,
    theta_j_eval_full,
    tsum_check,
    verify_generator_actions,
    verify_poisson,
    verify_weak_modularity,
)

__version__ = "0.1.0"
