"""Two-parameter deformed Baskakov-type operators of integral type.

Deformed-calculus primitives, geometric-node integration, operator
evaluation with closed-form moment oracles, empirical smoothness moduli,
and a small experiment CLI (``pqbaskakov --help``).
"""
from .pq_core import (
    DEFAULT_TRUNCATION,
    KahanSum,
    LogValue,
    NonConvergence,
    PqParams,
    TruncationConfig,
    pq_binomial,
    pq_exponential,
    pq_exponential_log,
    pq_factorial,
    pq_int,
    pq_rising_power,
)
from .pq_integrate import jackson_finite, jackson_improper
from .operator_kernel import (
    BasisTerm,
    StancuParams,
    baskakov_basis,
    basis_row,
    durrmeyer_weight,
    stancu_argument,
)
from .operators import (
    GrowthViolation,
    RealFunction,
    apply_auxiliary,
    apply_base,
    apply_stancu,
    apply_stancu_grid,
)
from .moments import (
    GammaCoefficients,
    MomentReport,
    central_moments,
    closed_moment_base,
    closed_moment_stancu,
    gamma_coefficients,
    mu_squared,
    q_shift,
)
from .smoothness import (
    BoundReport,
    DegenerateDeltaWarning,
    GridSpec,
    ScanPoint,
    empirical_modulus,
    empirical_modulus2,
    finite_interval_error_report,
    local_error_report,
    weighted_convergence_scan,
    weighted_modulus,
    weighted_norm,
)

__version__ = "1.0.0"

__all__ = [
    "DEFAULT_TRUNCATION",
    "KahanSum",
    "LogValue",
    "NonConvergence",
    "PqParams",
    "TruncationConfig",
    "pq_binomial",
    "pq_exponential",
    "pq_exponential_log",
    "pq_factorial",
    "pq_int",
    "pq_rising_power",
    "jackson_finite",
    "jackson_improper",
    "BasisTerm",
    "StancuParams",
    "baskakov_basis",
    "basis_row",
    "durrmeyer_weight",
    "stancu_argument",
    "GrowthViolation",
    "RealFunction",
    "apply_auxiliary",
    "apply_base",
    "apply_stancu",
    "apply_stancu_grid",
    "GammaCoefficients",
    "MomentReport",
    "central_moments",
    "closed_moment_base",
    "closed_moment_stancu",
    "gamma_coefficients",
    "mu_squared",
    "q_shift",
    "BoundReport",
    "DegenerateDeltaWarning",
    "GridSpec",
    "ScanPoint",
    "empirical_modulus",
    "empirical_modulus2",
    "finite_interval_error_report",
    "local_error_report",
    "weighted_convergence_scan",
    "weighted_modulus",
    "weighted_norm",
    "__version__",
]
