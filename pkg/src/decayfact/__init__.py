"""Toolkit for factorizations that preserve off-diagonal decay.

Builds finite sections of matrices with prescribed off-diagonal decay,
factors them directly (LU / Cholesky / QR / polar) and constructively via
alternating-projection series, measures decay norms and fitted envelopes,
splits positive Toeplitz symbols, applies matrix functions, and checks
empirically that factors inherit the localization of the input.
"""

from ._kernels import active_backend
from .errors import (
    NonConvergenceError,
    NotContractionError,
    NotHermitianError,
    NotPositiveDefiniteError,
    NumericalError,
    PivotBreakdownError,
    RankDeficiencyError,
    SingularTriangularError,
    StabilizationError,
)
from .factorizations import (
    FactorizationResult,
    cholesky,
    lu_unpivoted,
    polar,
    qr,
    relative_residual,
    triangular_inverse,
    verify_corner_block_relation,
    verify_triangular_entry_bounds,
)
from .functions import (
    Contour,
    FUNCTION_REGISTRY,
    default_contour,
    expm,
    polar_via_sqrt,
    riesz_dunford,
    sqrtm_hpd,
)
from .matrices import (
    BlockPartition,
    SectionMatrix,
    SymbolSeries,
    block_partition,
    diag_scale,
    generate_banded,
    generate_expdecay,
    generate_jaffard,
    identity,
    laurent_from_symbol,
    load_matrix,
    load_symbol,
    make_spd,
    opnorm_estimate,
    proj_lower,
    proj_strict_upper,
    save_matrix,
    save_symbol,
    stabilized_section,
)
from .norms import (
    DecayFit,
    DecayProfile,
    fit_exponential,
    fit_polynomial,
    norm_gbs,
    norm_jaffard,
    norm_schur,
    norm_weighted,
    profile,
    save_fit_json,
    save_profile_csv,
)
from .harness import (
    ExperimentConfig,
    check_against_baseline,
    emit,
    load_baseline,
    load_config,
    load_report,
    report_to_csv_rows,
    run_funcalc,
    run_inheritance,
    run_series_validation,
    run_spectral,
)
from .series import (
    SeriesLUResult,
    align_with_unit_diagonal,
    precondition_by_scaling,
    series_cholesky,
    series_lu_inverse,
    spd_rescale,
)
from .spectral import (
    PaleyWienerReport,
    SpectralFactorization,
    factor_vs_section_cholesky,
    paley_wiener_check,
    spectral_factor,
)
from .weights import (
    Weight,
    WeightCheckReport,
    check_admissible,
    eval_weight,
    grs_estimate,
    standard_weight,
    subconvolutive_constant,
    tabulated_weight,
    weight_from_dict,
    weight_to_dict,
)

__version__ = "0.1.0"
