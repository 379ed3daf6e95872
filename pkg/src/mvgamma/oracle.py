"""Independent ground truth for integer degrees of freedom.

For nu = 2*alpha a positive integer, X_j = 0.5 * sum_{k<=nu} Z_{kj}^2 with
Z_k i.i.d. N(0, R) has exactly the Gamma_n(nu/2, R) law (Laplace transform
det(I + R*diag(t))^{-nu/2}; the 0.5 maps the Wishart-diagonal transform
det(I + 2RT)^{-alpha} onto it).  Estimates built from these vectors never
touch the non-central-series machinery, so they cross-validate it.  nu = 1
is the classical Gaussian-box setting P(|Z_j| <= sqrt(2*x_j))."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError
from .estimators import DEFAULT_CHUNK, McEstimate
from .matrices import CorrelationMatrix
from .wishart import RngStream


@dataclass(frozen=True)
class OracleParams:
    """Integer degrees of freedom nu >= 1, the matrix R and its cached
    Cholesky factor."""

    nu: int
    r: CorrelationMatrix
    chol: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not (isinstance(self.nu, (int, np.integer)) and self.nu >= 1):
            raise AdmissibilityError(
                f"the Gaussian-construction oracle requires integer degrees of freedom 2α >= 1, got {self.nu!r}"
            )
        object.__setattr__(self, "nu", int(self.nu))
        if self.chol is None:
            object.__setattr__(self, "chol", np.linalg.cholesky(self.r.entries))


def _sample_batch(p: OracleParams, gen: np.random.Generator, count: int) -> np.ndarray:
    z = gen.standard_normal((count, p.nu, p.r.n)) @ p.chol.T
    return 0.5 * np.einsum("cvn,cvn->cn", z, z)


def sample_vector(p: OracleParams, rng: RngStream) -> np.ndarray:
    """One draw of (X_1..X_n); marginals Gamma(nu/2), joint LT |I+RT|^{-nu/2}."""
    return _sample_batch(p, rng.generator(), 1)[0]


def _indicator_mean(p, rng, samples, per_chunk, chunk_size):
    sizes = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        sizes.append(samples % chunk_size)
    count, mean, m2 = 0, 0.0, 0.0
    for i, c in enumerate(sizes):
        vals = per_chunk(_sample_batch(p, rng.chunk_generator(i), c))
        total = count + c
        delta = float(vals.mean()) - mean
        mean += delta * (c / total)
        m2 += float(vals.var()) * c + delta * delta * (count * c / total)
        count = total
    se = math.sqrt(max(m2, 0.0) / (count - 1) / count) if count > 1 else 0.0
    return McEstimate(value=mean, std_err=se, samples=samples, seed=rng.seed)


def cdf_oracle(
    p: OracleParams, x, samples: int, rng: RngStream, chunk_size: int = DEFAULT_CHUNK
) -> McEstimate:
    """Fraction of sampled vectors inside the box {X_j <= x_j for all j}.

    The per-draw values are indicators, so std_err is the binomial standard
    error (up to the ddof-1 factor of the pooled sample variance).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (p.r.n,):
        raise ValueError(f"x must have length {p.r.n}, got shape {x.shape}")
    if np.any(x <= 0):
        raise ValueError("x must be componentwise positive")
    return _indicator_mean(p, rng, samples, lambda xs: np.all(xs <= x, axis=1).astype(float), chunk_size)


def lt_oracle(
    p: OracleParams, t, samples: int, rng: RngStream, chunk_size: int = DEFAULT_CHUNK
) -> McEstimate:
    """Sample mean of exp(-sum t_j X_j); unbiased for det(I+RT)^{-nu/2}."""
    t = np.asarray(t, dtype=float)
    if t.shape != (p.r.n,):
        raise ValueError(f"t must have length {p.r.n}, got shape {t.shape}")
    if np.any(t < 0):
        raise ValueError("t must be componentwise nonnegative")
    return _indicator_mean(p, rng, samples, lambda xs: np.exp(-(xs @ t)), chunk_size)
