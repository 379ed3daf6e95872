"""The Gamma_n(alpha, R) distribution: exact Laplace transform and Monte
Carlo cdf / pdf / mixed-partial estimators via the Wishart-expectation
representations

    f(x; a, R) = E prod_j lam^{-1} g_a(lam^{-1} x_j, 0.5 b_j S b_j^T)
    F(x; a, R) = E prod_j G_a(lam^{-1} x_j, 0.5 b_j S b_j^T)

with S ~ W_{n-1}(2a, I) and R = lam*(I + B B^T) the minimal-eigenvalue
decomposition.  Admissible shapes: 2a integer, or 2a > n-2.

Sampling is chunked; chunk i draws from the RngStream's child generator i,
and per-chunk partial sums are reduced in chunk order, so a run is
bit-identical for a fixed (seed, stream_id, chunk_size) whether chunks are
evaluated serially or on a thread pool.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AdmissibilityError
from .gamma import DEFAULT_SERIES, SeriesControl, ShapeParameter
from .matrices import CorrelationMatrix, SpectralSplit, min_eig_decompose
from .wishart import ADMISSIBILITY_RULE, RngStream, WishartSpec, quad_forms, sample_factor_batch

DEFAULT_CHUNK = 32768


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo result with its uncertainty: std_err is the sample
    standard deviation of the per-draw values divided by sqrt(samples)."""

    value: float
    std_err: float
    samples: int
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"estimate value must be finite, got {self.value}")

    def to_dict(self) -> dict:
        return {"value": self.value, "std_err": self.std_err, "samples": self.samples, "seed": self.seed}


def validate_admissibility(alpha, n: int):
    """None when 2a is an integer or 2a > n-2; otherwise a violation message."""
    shape = alpha if isinstance(alpha, ShapeParameter) else ShapeParameter(alpha)
    if shape.two_alpha_integer or 2.0 * shape.alpha > n - 2:
        return None
    return (
        f"alpha = {shape.alpha} is not admissible at dimension n = {n}: "
        f"2α = {2 * shape.alpha} is not an integer and not > n−2 = {n - 2} "
        f"(rule: {ADMISSIBILITY_RULE})"
    )


@dataclass(frozen=True)
class MvGammaParams:
    """Shape, correlation matrix and its cached spectral split."""

    alpha: ShapeParameter
    r: CorrelationMatrix
    split: SpectralSplit = field(default=None, repr=False)

    def __post_init__(self):
        if not isinstance(self.alpha, ShapeParameter):
            object.__setattr__(self, "alpha", ShapeParameter(self.alpha))
        violation = validate_admissibility(self.alpha, self.r.n)
        if violation:
            raise AdmissibilityError(violation)
        if self.split is None:
            object.__setattr__(self, "split", min_eig_decompose(self.r))

    @property
    def n(self) -> int:
        return self.r.n

    def wishart_spec(self) -> WishartSpec:
        return WishartSpec.create(self.r.n - 1, self.alpha.nu)


def laplace_transform(p: MvGammaParams, t) -> float:
    """Exact Laplace transform det(I + R*diag(t))^{-alpha}."""
    t = np.asarray(t, dtype=float)
    if t.shape != (p.n,):
        raise ValueError(f"t must have length {p.n}, got shape {t.shape}")
    if np.any(t < 0):
        raise ValueError("t must be componentwise nonnegative")
    d = float(np.linalg.det(np.eye(p.n) + p.r.entries * t[np.newaxis, :]))
    return d ** (-p.alpha.alpha)


# --- chunked Monte Carlo engine ----------------------------------------------


def run_chunked(
    spec: WishartSpec,
    rng: RngStream,
    samples: int,
    per_chunk,
    n_outputs: int,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
):
    """Mean and standard error of per-draw outputs over ``samples`` draws.

    ``per_chunk(batch, count) -> (count, n_outputs)`` maps one Wishart factor
    batch to per-draw output columns.  Chunk results are pooled in chunk
    order (Chan's parallel variance formula), so worker count does not change
    the result.  Returns (means, std_errs) arrays of length n_outputs.
    """
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    sizes = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        sizes.append(samples % chunk_size)

    def one(i: int):
        gen = rng.chunk_generator(i)
        batch = sample_factor_batch(spec, gen, sizes[i])
        vals = np.asarray(per_chunk(batch, sizes[i]), dtype=float)
        if vals.shape != (sizes[i], n_outputs):
            raise ValueError(f"per_chunk returned shape {vals.shape}, expected ({sizes[i]}, {n_outputs})")
        return sizes[i], vals.mean(axis=0), vals.var(axis=0) * sizes[i]

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one, range(len(sizes))))
    else:
        partials = [one(i) for i in range(len(sizes))]

    count = 0
    mean = np.zeros(n_outputs)
    m2 = np.zeros(n_outputs)
    for c, chunk_mean, chunk_m2 in partials:
        total = count + c
        delta = chunk_mean - mean
        mean = mean + delta * (c / total)
        m2 = m2 + chunk_m2 + delta * delta * (count * c / total)
        count = total
    if count > 1:
        std_err = np.sqrt(np.maximum(m2, 0.0) / (count - 1) / count)
    else:
        std_err = np.zeros(n_outputs)
    return mean, std_err


def factor_columns(alpha: float, lam: float, x, q: np.ndarray, pdf_mask, ctl: SeriesControl):
    """Per-draw factor matrix for the product estimators.

    Column j holds G_a(x_j/lam, q_ij), or lam^{-1} g_a(x_j/lam, q_ij) where
    pdf_mask[j] is set.  q is the (count, n) matrix of half quadratic forms.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(q)
    for j in range(x.shape[0]):
        xs = x[j] / lam
        if pdf_mask[j]:
            out[:, j] = kernels.nc_pdf_array(alpha, xs, q[:, j], ctl.epsilon, ctl.max_terms) / lam
        else:
            out[:, j] = kernels.nc_cdf_array(alpha, xs, q[:, j], ctl.epsilon, ctl.max_terms)
    return out


def _validate_x(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"x must have length {n}, got shape {x.shape}")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("x must be componentwise positive and finite")
    return x


def _mask_from_indices(indices_1based, n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for j in indices_1based:
        if not (1 <= j <= n):
            raise ValueError(f"index {j} outside 1..{n}")
        mask[j - 1] = True
    return mask


def _product_estimate(
    p: MvGammaParams,
    x,
    pdf_mask,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl,
    chunk_size: int,
    workers: int,
) -> McEstimate:
    x = _validate_x(x, p.n)
    spec = p.wishart_spec()
    lam, b = p.split.lam, p.split.b_rows
    alpha = p.alpha.alpha

    def per_chunk(batch, count):
        q = quad_forms(batch, b)
        cols = factor_columns(alpha, lam, x, q, pdf_mask, ctl)
        return cols.prod(axis=1)[:, np.newaxis]

    mean, std_err = run_chunked(spec, rng, samples, per_chunk, 1, chunk_size, workers)
    return McEstimate(value=float(mean[0]), std_err=float(std_err[0]), samples=samples, seed=rng.seed)


def cdf_mc(
    p: MvGammaParams,
    x,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of F(x; alpha, R); each summand lies in [0, 1]."""
    return _product_estimate(p, x, np.zeros(p.n, dtype=bool), samples, rng, ctl, chunk_size, workers)


def pdf_mc(
    p: MvGammaParams,
    x,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the density f(x; alpha, R)."""
    return _product_estimate(p, x, np.ones(p.n, dtype=bool), samples, rng, ctl, chunk_size, workers)


def mixed_partial_cdf_mc(
    p: MvGammaParams,
    x,
    j,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> McEstimate:
    """Estimate of (prod_{j in J} d/dx_j) F(x; alpha, R) for a 1-based index
    set J: cdf factors for j outside J, lam^{-1} * pdf factors inside.

    The per-draw integrand is a product of nonnegative factors, so every
    estimate is >= 0; J = {} reproduces cdf_mc and J = {1..n} reproduces
    pdf_mc draw for draw.
    """
    return _product_estimate(p, x, _mask_from_indices(j, p.n), samples, rng, ctl, chunk_size, workers)
