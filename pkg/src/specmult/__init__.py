"""Joint spectral multipliers on truncated eigen-systems.

Finite models for multiplier calculus: Hermite/Ornstein-Uhlenbeck and
torus eigen-systems, Mellin-transform tooling with Marcinkiewicz norms
and decay fits, Littlewood-Paley square functions with exact L2
constants, Laplace-transform-type multipliers with their Mehler-kernel
realizations, local/global operator splits with kernel-estimate audits,
and a fibered Calderon-Zygmund decomposition.
"""

from .dyadic import (
    Atom,
    AtomValidationError,
    CZResult,
    DyadicCube,
    DyadicSystem,
    cz_decompose,
    dq_maximal,
    dyadic_average,
    dyadic_maximal,
    dyadic_system,
    l1_h1_norm,
    validate_atom,
    weak_quasinorm,
)
from .multipliers import (
    ATLViolation,
    BUILTIN_MULTIPLIERS,
    DecayProfile,
    DecayReport,
    DyadicRange,
    LogGrid,
    MarcOrder,
    MellinTailError,
    builtin_multiplier,
    decay_check,
    default_t_grid,
    make_mNt,
    mar_norm,
    marcinkiewicz_seminorm,
    mellin,
    mellin_inverse,
    mellin_on_grid,
    phi_star,
    plancherel_residual,
    required_order,
    rotate_multiplier,
    square_constant,
    square_function,
    square_function_params,
    worst_case_order,
)
from .ouhermite import (
    apply_semigroup_kernel,
    heat_kernel_w,
    hermite_basis,
    lebesgue_weights,
    mehler_dr,
    mehler_kernel,
    ou_system,
    w_dr,
)
from .products import (
    EtaMetric,
    HeatKernelModel,
    KappaSpec,
    ProductGrid,
    ProductPoint,
    apply_T_split,
    cz_growth_check,
    cz_smooth_check,
    di_bound_ratio,
    di_integral,
    euclidean_heat_model,
    in_local_region,
    kappa_imag,
    kappa_indicator,
    kappa_one,
    kappa_zero,
    kernel_K,
    kernel_K_bound,
    kernel_Ktilde,
    local_mask,
    m_kappa,
    multiplier_from_kappa,
    product_grid,
    smallest_log_constant,
    torus_heat_model,
    torus_system,
)
from .spectral import (
    CoefficientVector,
    EvaluationError,
    GridFunction,
    MultiplierSpec,
    SpectralSystem,
    apply_multiplier,
    decompose,
    reconstruct,
    spectral_measure,
    tensor,
)

__version__ = "0.1.0"
