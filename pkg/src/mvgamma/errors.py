"""Exception hierarchy shared by all mvgamma modules."""

from __future__ import annotations


class MvGammaError(Exception):
    """Base class for every error raised by this package."""


class MatrixError(MvGammaError, ValueError):
    """Input matrix violates a structural invariant (symmetry, unit diagonal,
    positive definiteness, shape)."""


class NearSingularError(MvGammaError):
    """Minimal eigenvalue too small for the spectral decomposition to be
    usable; the caller should regularize or reject the matrix."""


class AdmissibilityError(MvGammaError, ValueError):
    """Shape parameter outside the admissible set for the requested
    dimension (2a in N or 2a > n-2)."""


class TruncationError(MvGammaError):
    """Series truncation cap reached before the tolerance was met.

    Attributes
    ----------
    bound : float
        Achieved absolute error bound when the cap was hit.
    terms : int
        Number of terms summed.
    """

    def __init__(self, message: str, bound: float, terms: int):
        super().__init__(message)
        self.bound = bound
        self.terms = terms
