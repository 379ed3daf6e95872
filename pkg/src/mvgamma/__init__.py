"""mvgamma: Krishnamoorthy-Parthasarathy multivariate gamma distributions
(Laplace transform det(I+RT)^{-alpha}) with Monte Carlo cdf/pdf estimators
built on Wishart expectations, a Gaussian-construction oracle for integer
degrees of freedom, and numerical verification of the extended Gaussian
correlation inequality."""

from .errors import (
    AdmissibilityError,
    MatrixError,
    MvGammaError,
    NearSingularError,
    TruncationError,
)
from .estimators import (
    McEstimate,
    MvGammaParams,
    cdf_mc,
    laplace_transform,
    mixed_partial_cdf_mc,
    pdf_mc,
    validate_admissibility,
)
from .gamma import (
    SeriesControl,
    ShapeParameter,
    gamma_cdf,
    gamma_pdf,
    noncentral_gamma_cdf,
    noncentral_gamma_lt,
    noncentral_gamma_pdf,
)
from .gci import (
    AveragedCorrelations,
    BlockPartition,
    GciReport,
    averaged_correlations,
    cdf_tau_derivative_decomposed,
    coefficient_c,
    gci_gap,
    interpolate,
    lt_tau_derivative_closed,
    subset_splits,
)
from .matrices import (
    CorrelationMatrix,
    SpectralSplit,
    SubsetSplit,
    canonical_corr_sq,
    det,
    load_matrix,
    min_eig_decompose,
    principal_minor_expansion,
    random_correlation,
    sym_eigen,
)
from .oracle import OracleParams, cdf_oracle, lt_oracle, sample_vector
from .wishart import (
    RngStream,
    WishartSpec,
    chi_square_sample,
    half_quadratic_form,
    sample_wishart,
    sample_wishart_batch,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "AveragedCorrelations",
    "BlockPartition",
    "CorrelationMatrix",
    "GciReport",
    "MatrixError",
    "McEstimate",
    "MvGammaError",
    "MvGammaParams",
    "NearSingularError",
    "OracleParams",
    "RngStream",
    "SeriesControl",
    "ShapeParameter",
    "SpectralSplit",
    "SubsetSplit",
    "TruncationError",
    "WishartSpec",
    "averaged_correlations",
    "canonical_corr_sq",
    "cdf_mc",
    "cdf_oracle",
    "cdf_tau_derivative_decomposed",
    "chi_square_sample",
    "coefficient_c",
    "det",
    "gamma_cdf",
    "gamma_pdf",
    "gci_gap",
    "half_quadratic_form",
    "interpolate",
    "laplace_transform",
    "load_matrix",
    "lt_oracle",
    "lt_tau_derivative_closed",
    "min_eig_decompose",
    "mixed_partial_cdf_mc",
    "noncentral_gamma_cdf",
    "noncentral_gamma_lt",
    "noncentral_gamma_pdf",
    "pdf_mc",
    "principal_minor_expansion",
    "random_correlation",
    "sample_vector",
    "sample_wishart",
    "sample_wishart_batch",
    "subset_splits",
    "sym_eigen",
    "validate_admissibility",
]
