"""Eigenvalue structure of the Kac-Murdock-Szego matrix K_n(rho) = [rho^|j-k|] for complex rho."""

from .borderline import (
    ConvergenceError,
    DomainError,
    TracedCurve,
    b_curve,
    curve_derivative,
    default_trace,
    evaluate_curve,
    f_curve,
    solve_v,
    trace_curve,
)
from .classification import (
    Membership,
    RegionQuery,
    ScanResult,
    count_extraordinary,
    exterior_bisector,
    query_region,
    region_labels,
    scan_path,
    table1_counts,
)
from .core import (
    ComplexFormatError,
    EigType,
    InvalidDimensionError,
    KmsError,
    build_kms,
    dirichlet_ratio,
    format_complex,
    parse_complex,
    signature_matrix,
    xi,
)
from .oracle import OracleConvergenceError, char_poly, extraordinary_counts, full_spectrum, poly_roots, spectrum_split
from .relations import (
    EigClass,
    ExcludedRhoError,
    PoleError,
    asymptotic_spectrum,
    classify_eigenvalue,
    double_condition_residual,
    lambda_of_mu,
    rho_of_mu,
)
from .singularities import (
    CuspReport,
    find_cusps,
    fit_cardioid,
    parabola_model,
    small_u_series,
    verify_double,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
