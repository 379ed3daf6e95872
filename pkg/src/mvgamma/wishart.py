"""Wishart sampling W_m(nu, I_m) and the quadratic forms 0.5*b S b^T.

Two sampling regimes cover the admissible degrees of freedom:

* ``bartlett`` (nu > m-1, any real): S = L L^T with chi-square diagonal and
  standard-normal strict lower triangle;
* ``outer_sum`` (nu a positive integer, any size, rank min(nu, m)):
  S = sum_{k<=nu} z_k z_k^T — the pseudo-Wishart construction.

When both apply, Bartlett wins (O(m^2) per draw instead of O(nu*m^2)).

Reproducibility: every sampler is a pure function of an RngStream value.
Bulk consumers split their sample budget into chunks and derive one child
generator per chunk index, so serial and parallel execution consume identical
random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, MatrixError

ADMISSIBILITY_RULE = "2α ∈ ℕ or 2α > n−2"
_DOF_INT_TOL = 1e-12


@dataclass(frozen=True)
class RngStream:
    """Seedable substream handle: (seed, stream_id) pins every draw.

    Child generators come from numpy SeedSequence spawn keys, so distinct
    stream_ids (and distinct chunk indices within a stream) give
    independent-quality streams.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be nonnegative, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,)))

    def chunk_generator(self, chunk_index: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, chunk_index))
        )

    def substream(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + offset)


@dataclass(frozen=True)
class WishartSpec:
    """Dimension, degrees of freedom and sampling regime for W_dim(dof, I)."""

    dim: int
    dof: float
    regime: str

    @classmethod
    def create(cls, dim: int, dof: float) -> "WishartSpec":
        """Pick the regime for W_dim(dof, I); raises AdmissibilityError when
        neither applies (dof not integer and dof <= dim-1)."""
        if dim < 0:
            raise ValueError(f"dimension must be >= 0, got {dim}")
        if not (dof > 0):
            raise ValueError(f"degrees of freedom must be positive, got {dof}")
        if dof > dim - 1:
            return cls(dim=dim, dof=float(dof), regime="bartlett")
        if abs(dof - round(dof)) <= _DOF_INT_TOL:
            return cls(dim=dim, dof=float(round(dof)), regime="outer_sum")
        raise AdmissibilityError(
            f"no Wishart sampling regime for dof={dof} at dimension {dim}: requires {ADMISSIBILITY_RULE} "
            f"(here n-2 = {dim - 1})"
        )

    def __post_init__(self):
        if self.regime not in ("bartlett", "outer_sum"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.regime == "bartlett" and not (self.dof > self.dim - 1):
            raise AdmissibilityError(f"bartlett regime requires dof > dim-1, got dof={self.dof}, dim={self.dim}")
        if self.regime == "outer_sum" and abs(self.dof - round(self.dof)) > _DOF_INT_TOL:
            raise AdmissibilityError(f"outer_sum regime requires integer dof, got {self.dof}")


def chi_square_sample(dof: float, rng: RngStream) -> float:
    """One chi-square draw, valid for any positive (including fractional) dof.

    Backed by gamma(dof/2, scale 2) rejection sampling (Marsaglia-Tsang with
    the shape<1 boost), exact for all shapes.
    """
    if not (dof > 0):
        raise ValueError(f"dof must be positive, got {dof}")
    return float(2.0 * rng.generator().standard_gamma(dof / 2.0))


def sample_factor_batch(spec: WishartSpec, gen: np.random.Generator, count: int):
    """Draw ``count`` Wishart factors.

    Returns (regime, data): lower-triangular L of shape (count, m, m) for
    bartlett, or normals Z of shape (count, nu, m) for outer_sum, with
    S = L L^T resp. S = Z^T Z.  Draw order is fixed (diagonal chi-squares
    column by column, then the strict lower triangle) so results are
    reproducible for a given generator state.
    """
    m = spec.dim
    if m == 0:
        return (spec.regime, np.zeros((count, 0, 0)))
    if spec.regime == "bartlett":
        lower = np.zeros((count, m, m))
        for i in range(m):
            lower[:, i, i] = np.sqrt(2.0 * gen.standard_gamma((spec.dof - i) / 2.0, size=count))
        if m > 1:
            rows, cols = np.tril_indices(m, k=-1)
            lower[:, rows, cols] = gen.standard_normal((count, rows.size))
        return ("bartlett", lower)
    nu = int(round(spec.dof))
    return ("outer_sum", gen.standard_normal((count, nu, m)))


def batch_to_matrices(batch) -> np.ndarray:
    """Assemble S matrices (count, m, m) from a factor batch."""
    regime, data = batch
    if data.shape[-1] == 0:
        return np.zeros((data.shape[0], 0, 0))
    if regime == "bartlett":
        return data @ data.transpose(0, 2, 1)
    return data.transpose(0, 2, 1) @ data


def quad_forms(batch, b_rows: np.ndarray) -> np.ndarray:
    """Half quadratic forms 0.5 * b_j S b_j^T for every draw and row.

    b_rows has shape (n, m); returns (count, n).  Uses the factor form:
    bartlett 0.5*||b L||^2 per row, outer_sum 0.5*||Z b^T||^2 per column.
    """
    regime, data = batch
    count = data.shape[0]
    n = b_rows.shape[0]
    if b_rows.shape[1] == 0 or data.shape[-1] == 0:
        return np.zeros((count, n))
    if regime == "bartlett":
        v = b_rows @ data  # (count, n, m)
        return 0.5 * np.einsum("cnm,cnm->cn", v, v)
    v = data @ b_rows.T  # (count, nu, n)
    return 0.5 * np.einsum("cvn,cvn->cn", v, v)


def sample_wishart(spec: WishartSpec, rng: RngStream) -> np.ndarray:
    """One W_dim(dof, I) draw (symmetric positive semidefinite)."""
    batch = sample_factor_batch(spec, rng.generator(), 1)
    return batch_to_matrices(batch)[0]


def sample_wishart_batch(spec: WishartSpec, rng: RngStream, count: int) -> np.ndarray:
    """``count`` W_dim(dof, I) draws as an array (count, dim, dim)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return batch_to_matrices(sample_factor_batch(spec, rng.generator(), count))


def half_quadratic_form(b, s) -> float:
    """0.5 * b S b^T for a row vector b and symmetric matrix S."""
    b = np.asarray(b, dtype=float).reshape(-1)
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise MatrixError(f"S must be square, got shape {s.shape}")
    if b.shape[0] != s.shape[0]:
        raise MatrixError(f"dimension mismatch: b has length {b.shape[0]}, S is {s.shape[0]}x{s.shape[1]}")
    if b.shape[0] == 0 or not np.any(b):
        return 0.0
    return float(0.5 * b @ s @ b)
