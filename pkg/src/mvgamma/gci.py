"""Verification machinery for the extended Gaussian correlation inequality

    F(x; a, R) > F(x_1..x_{n1}; a, R11) * F(x_{n1+1}..x_n; a, R22)

via the interpolation path R_tau (cross-block entries scaled by tau).  The
exact side: d/dtau det(I + R_tau T)^{-a} decomposes over two-block subsets J
with nonnegative coefficients

    c_J(tau) = 2*a*tau * det(R_tau,J) * sum_i rho_i^2 / (1 - tau^2 rho_i^2),

rho_i^2 the squared canonical correlations of the unscaled R restricted to
(J1, J2).  The stochastic side: d/dtau F(x; a, R_tau) equals the same
coefficients against mixed partials of F at shape a+1, each a nonnegative
Monte Carlo integrand.  Both sides are checked against finite differences
(exact-function differences for the transform, common-random-number
differences for the cdf)."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import MatrixError, MvGammaError
from .estimators import (
    DEFAULT_CHUNK,
    McEstimate,
    MvGammaParams,
    factor_columns,
    laplace_transform,
    run_chunked,
)
from .gamma import DEFAULT_SERIES, SeriesControl, ShapeParameter
from .matrices import (
    SUBSET_ENUMERATION_LIMIT,
    CorrelationMatrix,
    SubsetSplit,
    canonical_corr_sq,
    det,
    min_eig_decompose,
)
from .wishart import RngStream, quad_forms

COEFF_SINGULARITY_TOL = 1e-14
DEFAULT_TAU_CHECKPOINTS = (0.25, 0.5, 0.75)
EXACT_FD_STEP = 1e-5  # for exact-function tau derivatives
MC_FD_STEP = 1e-2  # for common-random-number cdf tau derivatives


@dataclass(frozen=True)
class BlockPartition:
    """Sizes of the two blocks: {1..n1} and {n1+1..n1+n2}."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise MatrixError(f"both blocks must be nonempty, got n1={self.n1}, n2={self.n2}")

    @classmethod
    def of(cls, n: int, n1: int) -> "BlockPartition":
        if not (1 <= n1 < n):
            raise MatrixError(f"n1 must satisfy 1 <= n1 < n, got n1={n1}, n={n}")
        return cls(n1=n1, n2=n - n1)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def block1(self) -> tuple[int, ...]:
        return tuple(range(1, self.n1 + 1))

    def block2(self) -> tuple[int, ...]:
        return tuple(range(self.n1 + 1, self.n + 1))


def _check_partition(r: CorrelationMatrix, part: BlockPartition):
    if part.n != r.n:
        raise MatrixError(f"partition covers {part.n} indices but the matrix has n={r.n}")


def _check_split(part: BlockPartition, j: SubsetSplit):
    if j.j1[-1] > part.n1 or j.j2[0] <= part.n1 or j.j2[-1] > part.n:
        raise MatrixError(
            f"split {j.label()} does not respect the partition (n1={part.n1}, n2={part.n2})"
        )


def interpolate(r: CorrelationMatrix, part: BlockPartition, tau: float) -> CorrelationMatrix:
    """R_tau: cross-block entries of R scaled by tau in [0, 1].

    Positive definiteness is guaranteed for valid inputs; a failure here
    indicates an upstream bug, not a user error.
    """
    _check_partition(r, part)
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    entries = r.entries.copy()
    entries[: part.n1, part.n1 :] *= tau
    entries[part.n1 :, : part.n1] *= tau
    try:
        return CorrelationMatrix(entries)
    except MatrixError as exc:
        raise MvGammaError(
            f"internal error: interpolated matrix at tau={tau} failed validation ({exc}); "
            "this contradicts the positive-definiteness of the path and indicates an upstream bug"
        ) from exc


def subset_splits(n: int, part: BlockPartition) -> list[SubsetSplit]:
    """All (2^n1 - 1)(2^n2 - 1) two-block subset splits, lexicographic in
    (j1, j2)."""
    if part.n != n:
        raise MatrixError(f"partition covers {part.n} indices, expected {n}")
    if n > SUBSET_ENUMERATION_LIMIT:
        raise MatrixError(f"subset enumeration limited to n <= {SUBSET_ENUMERATION_LIMIT}, got n = {n}")

    def nonempty_subsets(pool):
        subs = [
            tuple(c) for size in range(1, len(pool) + 1) for c in itertools.combinations(pool, size)
        ]
        return sorted(subs)

    return [
        SubsetSplit(j1=a, j2=b)
        for a in nonempty_subsets(part.block1())
        for b in nonempty_subsets(part.block2())
    ]


def _tau_scaled_det(r: CorrelationMatrix, part: BlockPartition, tau: float, j: SubsetSplit) -> float:
    """det of R_tau restricted to j1 u j2 (cross entries scaled by tau)."""
    idx = np.asarray(j.joint, dtype=int) - 1
    sub = r.entries[np.ix_(idx, idx)].copy()
    k = len(j.j1)
    sub[:k, k:] *= tau
    sub[k:, :k] *= tau
    return det(sub)


def coefficient_c(
    r: CorrelationMatrix, part: BlockPartition, tau: float, j: SubsetSplit, alpha
) -> float:
    """c_J(tau) = 2*alpha*tau * det(R_tau,J) * sum_i rho_i^2/(1 - tau^2 rho_i^2).

    Canonical correlations come from the unscaled R restricted to (j1, j2);
    tau enters only through the leading factor, the determinant of the
    tau-scaled restriction, and the denominators.  Zero cross-block rank
    gives 0; so does tau = 0.
    """
    _check_partition(r, part)
    _check_split(part, j)
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    a = alpha.alpha if isinstance(alpha, ShapeParameter) else ShapeParameter(alpha).alpha
    rho_sq = canonical_corr_sq(r, j)
    return _coefficient_from_rho(a, tau, _tau_scaled_det(r, part, tau, j), rho_sq)


def _coefficient_from_rho(a: float, tau: float, det_tau_j: float, rho_sq: np.ndarray) -> float:
    if rho_sq.size == 0 or tau == 0.0:
        return 0.0
    denom = 1.0 - tau * tau * rho_sq
    if np.any(denom < COEFF_SINGULARITY_TOL):
        raise MvGammaError(
            f"coefficient denominator 1 - tau^2*rho^2 = {float(denom.min()):.3e} below "
            f"{COEFF_SINGULARITY_TOL:.0e}; the restricted matrix is numerically singular"
        )
    return 2.0 * a * tau * det_tau_j * float(np.sum(rho_sq / denom))


def _split_records(r: CorrelationMatrix, part: BlockPartition):
    """(split, squared canonical correlations) for every two-block subset."""
    return [(s, canonical_corr_sq(r, s)) for s in subset_splits(r.n, part)]


def lt_tau_derivative_closed(r: CorrelationMatrix, part: BlockPartition, tau: float, alpha, t) -> float:
    """Closed form of d/dtau det(I + R_tau T)^{-alpha}:

    det(I + R_tau T)^{-(alpha+1)} * sum_J c_J(tau) prod_{j in J} t_j.
    """
    _check_partition(r, part)
    a = alpha.alpha if isinstance(alpha, ShapeParameter) else ShapeParameter(alpha).alpha
    t = np.asarray(t, dtype=float)
    if t.shape != (r.n,):
        raise ValueError(f"t must have length {r.n}, got shape {t.shape}")
    if np.any(t < 0):
        raise ValueError("t must be componentwise nonnegative")
    r_tau = interpolate(r, part, tau)
    base = det(np.eye(r.n) + r_tau.entries * t[np.newaxis, :]) ** (-(a + 1.0))
    total = 0.0
    for s, rho_sq in _split_records(r, part):
        c = _coefficient_from_rho(a, tau, _tau_scaled_det(r, part, tau, s), rho_sq)
        if c != 0.0:
            idx = np.asarray(s.joint, dtype=int) - 1
            total += c * float(np.prod(t[idx]))
    return base * total


def lt_tau_derivative_fd(
    r: CorrelationMatrix, part: BlockPartition, tau: float, alpha, t, h: float = EXACT_FD_STEP
) -> float:
    """Central finite difference of the exact transform along tau."""
    a = ShapeParameter(alpha.alpha if isinstance(alpha, ShapeParameter) else alpha)
    hi = min(tau + h, 1.0)
    lo = max(tau - h, 0.0)
    f_hi = laplace_transform(MvGammaParams(a, interpolate(r, part, hi)), t)
    f_lo = laplace_transform(MvGammaParams(a, interpolate(r, part, lo)), t)
    return (f_hi - f_lo) / (hi - lo)


# --- Monte Carlo side ---------------------------------------------------------


def cdf_tau_derivative_decomposed(
    r: CorrelationMatrix,
    part: BlockPartition,
    tau: float,
    alpha,
    x,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
):
    """Estimate d/dtau F(x; alpha, R_tau) as sum_J c_J(tau) * mixed partial
    of F at shape alpha+1 on R_tau.

    All terms are evaluated on one shared set of W_{n-1}(2(alpha+1), I)
    draws; returns (total McEstimate, list of (split, c_J, McEstimate)).
    Every per-draw term is >= 0, so negative term estimates can only be
    rounding noise.
    """
    _check_partition(r, part)
    a = alpha.alpha if isinstance(alpha, ShapeParameter) else ShapeParameter(alpha).alpha
    shifted = ShapeParameter(a + 1.0)
    params = MvGammaParams(shifted, interpolate(r, part, tau))  # validates admissibility at alpha+1
    x = np.asarray(x, dtype=float)
    records = _split_records(r, part)
    coeffs = [
        _coefficient_from_rho(a, tau, _tau_scaled_det(r, part, tau, s), rho_sq) for s, rho_sq in records
    ]
    masks = []
    for s, _ in records:
        mask = np.zeros(r.n, dtype=bool)
        mask[np.asarray(s.joint, dtype=int) - 1] = True
        masks.append(mask)
    lam, b = params.split.lam, params.split.b_rows
    n_terms = len(records)

    def per_chunk(batch, count):
        q = quad_forms(batch, b)
        cdf_cols = factor_columns(shifted.alpha, lam, x, q, np.zeros(r.n, dtype=bool), ctl)
        pdf_cols = factor_columns(shifted.alpha, lam, x, q, np.ones(r.n, dtype=bool), ctl)
        out = np.empty((count, n_terms + 1))
        total = np.zeros(count)
        for k, mask in enumerate(masks):
            term = np.full(count, coeffs[k])
            for jj in range(r.n):
                term *= pdf_cols[:, jj] if mask[jj] else cdf_cols[:, jj]
            out[:, k] = term
            total += term
        out[:, n_terms] = total
        return out

    mean, std_err = run_chunked(params.wishart_spec(), rng, samples, per_chunk, n_terms + 1, chunk_size, workers)
    terms = [
        (records[k][0], coeffs[k], McEstimate(float(mean[k]), float(std_err[k]), samples, rng.seed))
        for k in range(n_terms)
    ]
    total = McEstimate(float(mean[n_terms]), float(std_err[n_terms]), samples, rng.seed)
    return total, terms


def cdf_tau_fd(
    r: CorrelationMatrix,
    part: BlockPartition,
    tau: float,
    alpha,
    x,
    samples: int,
    rng: RngStream,
    h: float = MC_FD_STEP,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> McEstimate:
    """Common-random-number central difference of F(x; alpha, R_tau) in tau.

    Both endpoints are evaluated on identical Wishart draws (the draws do not
    depend on R), so the per-draw difference has sharply reduced variance;
    bias is O(h^2).
    """
    _check_partition(r, part)
    a = ShapeParameter(alpha.alpha if isinstance(alpha, ShapeParameter) else alpha)
    hi = min(tau + h, 1.0)
    lo = max(tau - h, 0.0)
    p_hi = MvGammaParams(a, interpolate(r, part, hi))
    p_lo = MvGammaParams(a, interpolate(r, part, lo))
    x = np.asarray(x, dtype=float)
    no_mask = np.zeros(r.n, dtype=bool)

    def per_chunk(batch, count):
        prod_hi = factor_columns(a.alpha, p_hi.split.lam, x, quad_forms(batch, p_hi.split.b_rows), no_mask, ctl).prod(axis=1)
        prod_lo = factor_columns(a.alpha, p_lo.split.lam, x, quad_forms(batch, p_lo.split.b_rows), no_mask, ctl).prod(axis=1)
        return ((prod_hi - prod_lo) / (hi - lo))[:, np.newaxis]

    mean, std_err = run_chunked(p_hi.wishart_spec(), rng, samples, per_chunk, 1, chunk_size, workers)
    return McEstimate(float(mean[0]), float(std_err[0]), samples, rng.seed)


def path_cdf_estimates(
    r: CorrelationMatrix,
    part: BlockPartition,
    alpha,
    x,
    taus,
    samples: int,
    rng: RngStream,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
):
    """F(x; alpha, R_tau) along a tau grid on shared draws.

    Returns (estimates, adjacent difference estimates); the differences are
    per-draw (common random numbers), so their std_err supports monotonicity
    checks along the path.
    """
    _check_partition(r, part)
    a = ShapeParameter(alpha.alpha if isinstance(alpha, ShapeParameter) else alpha)
    taus = [float(v) for v in taus]
    variants = [MvGammaParams(a, interpolate(r, part, tau)) for tau in taus]
    x = np.asarray(x, dtype=float)
    no_mask = np.zeros(r.n, dtype=bool)
    k = len(variants)

    def per_chunk(batch, count):
        out = np.empty((count, 2 * k - 1))
        for i, p in enumerate(variants):
            out[:, i] = factor_columns(a.alpha, p.split.lam, x, quad_forms(batch, p.split.b_rows), no_mask, ctl).prod(axis=1)
        for i in range(k - 1):
            out[:, k + i] = out[:, i + 1] - out[:, i]
        return out

    mean, std_err = run_chunked(variants[0].wishart_spec(), rng, samples, per_chunk, 2 * k - 1, chunk_size, workers)
    estimates = [McEstimate(float(mean[i]), float(std_err[i]), samples, rng.seed) for i in range(k)]
    diffs = [McEstimate(float(mean[k + i]), float(std_err[k + i]), samples, rng.seed) for i in range(k - 1)]
    return estimates, diffs


# --- averaged correlations (Remark inputs) ------------------------------------


@dataclass(frozen=True)
class AveragedCorrelations:
    """Block-mean correlations and the squared mean (and mean-square) cross
    correlation; rho1/rho2 are None for blocks of size 1 (no pairs)."""

    rho1: float | None
    rho2: float | None
    rho_sq: float
    rho_sq_alt: float
    admissible: bool | None

    def to_dict(self) -> dict:
        return {
            "rho1": self.rho1,
            "rho2": self.rho2,
            "rho_sq": self.rho_sq,
            "rho_sq_alt": self.rho_sq_alt,
            "admissible": self.admissible,
        }


def averaged_correlations(r: CorrelationMatrix, part: BlockPartition) -> AveragedCorrelations:
    """Averaged within-block and cross-block correlations with the
    admissibility flag rho1 > 0, rho2 > 0, rho_sq <= rho1*rho2."""
    _check_partition(r, part)
    e = r.entries
    n1 = part.n1

    def block_mean(lo, hi):
        if hi - lo < 2:
            return None
        vals = [e[i, j] for i in range(lo, hi) for j in range(i + 1, hi)]
        return float(np.mean(vals))

    rho1 = block_mean(0, n1)
    rho2 = block_mean(n1, r.n)
    cross = e[:n1, n1:]
    rho_bar = float(np.mean(cross))
    rho_sq = rho_bar * rho_bar
    rho_sq_alt = float(np.mean(cross * cross))
    if rho1 is None or rho2 is None:
        admissible = None
    else:
        admissible = bool(rho1 > 0.0 and rho2 > 0.0 and rho_sq <= rho1 * rho2)
    return AveragedCorrelations(rho1, rho2, rho_sq, rho_sq_alt, admissible)


# --- the Theorem 1 gap report ---------------------------------------------------


@dataclass(frozen=True)
class TauCheck:
    """Per-checkpoint record: coefficients, the exact-derivative residual and
    the Monte Carlo decomposition discrepancy (in combined-SE units)."""

    tau: float
    coefficients: list
    lt_derivative_max_rel_err: float
    decomposition_total: McEstimate
    decomposition_fd: McEstimate
    decomposition_discrepancy_se: float

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "coefficients": [
                {"j1": list(s.j1), "j2": list(s.j2), "c": c} for (s, c) in self.coefficients
            ],
            "lt_derivative_max_rel_err": self.lt_derivative_max_rel_err,
            "decomposition_total": self.decomposition_total.to_dict(),
            "decomposition_fd": self.decomposition_fd.to_dict(),
            "decomposition_discrepancy_se": self.decomposition_discrepancy_se,
        }


@dataclass(frozen=True)
class GciReport:
    """Both sides of the inequality, the gap, and the derivative checks."""

    n: int
    n1: int
    alpha: float
    x: list
    samples: int
    seed: int
    lhs: McEstimate
    rhs_block1: McEstimate
    rhs_block2: McEstimate
    rhs: float
    rhs_std_err: float
    gap: float
    gap_std_err: float
    r12_rank: int
    top_canonical_corr_sq: float
    relation: str
    note: str | None
    tau_checks: list | None
    tau_derivative_closed_form_check: float | None
    decomposition_check: float | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "n1": self.n1,
            "alpha": self.alpha,
            "x": self.x,
            "samples": self.samples,
            "seed": self.seed,
            "lhs": self.lhs.to_dict(),
            "rhs_block1": self.rhs_block1.to_dict(),
            "rhs_block2": self.rhs_block2.to_dict(),
            "rhs": self.rhs,
            "rhs_std_err": self.rhs_std_err,
            "gap": self.gap,
            "gap_std_err": self.gap_std_err,
            "r12_rank": self.r12_rank,
            "top_canonical_corr_sq": self.top_canonical_corr_sq,
            "relation": self.relation,
            "note": self.note,
            "coefficients": (
                [
                    {"tau": c.tau, "terms": [{"j1": list(s.j1), "j2": list(s.j2), "c": v} for (s, v) in c.coefficients]}
                    for c in self.tau_checks
                ]
                if self.tau_checks is not None
                else None
            ),
            "tau_checks": [c.to_dict() for c in self.tau_checks] if self.tau_checks is not None else None,
            "tau_derivative_closed_form_check": self.tau_derivative_closed_form_check,
            "decomposition_check": self.decomposition_check,
        }


def _check_t_vectors(n: int, seed: int, count: int = 5) -> np.ndarray:
    gen = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0x7C, n)))
    ts = gen.uniform(0.2, 1.5, size=(count, n))
    ts[0] = 1.0  # always include the all-ones probe
    return ts


def gci_gap(
    r: CorrelationMatrix,
    part: BlockPartition,
    alpha,
    x,
    samples: int,
    rng: RngStream,
    tau_checks=None,
    ctl: SeriesControl = DEFAULT_SERIES,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> GciReport:
    """Estimate both sides of the inequality and assemble the report.

    The left side uses the caller's stream; the two block factors use fresh
    substreams (+1, +2) so the gap's std_err is a clean quadrature
    combination.  When ``tau_checks`` is a sequence of interior tau values,
    the report also carries, per checkpoint: the coefficient table, the
    closed-form-vs-finite-difference residual of the exact transform
    derivative, and the Monte Carlo decomposition discrepancy (substreams
    +3+2k / +4+2k).
    """
    _check_partition(r, part)
    a = ShapeParameter(alpha.alpha if isinstance(alpha, ShapeParameter) else alpha)
    x = np.asarray(x, dtype=float)
    if x.shape != (r.n,):
        raise ValueError(f"x must have length {r.n}, got shape {x.shape}")

    from .estimators import cdf_mc

    params = MvGammaParams(a, r)
    i1 = list(part.block1())
    i2 = list(part.block2())
    r11 = CorrelationMatrix(r.submatrix(i1))
    r22 = CorrelationMatrix(r.submatrix(i2))
    lhs = cdf_mc(params, x, samples, rng, ctl, chunk_size, workers)
    rhs1 = cdf_mc(MvGammaParams(a, r11), x[: part.n1], samples, rng.substream(1), ctl, chunk_size, workers)
    rhs2 = cdf_mc(MvGammaParams(a, r22), x[part.n1 :], samples, rng.substream(2), ctl, chunk_size, workers)
    rhs = rhs1.value * rhs2.value
    rhs_se = math.sqrt((rhs2.value * rhs1.std_err) ** 2 + (rhs1.value * rhs2.std_err) ** 2)
    gap = lhs.value - rhs
    gap_se = math.sqrt(lhs.std_err**2 + rhs_se**2)

    full_split = SubsetSplit(j1=part.block1(), j2=part.block2())
    rho_sq_full = canonical_corr_sq(r, full_split)
    rank = int(rho_sq_full.size)
    top = float(rho_sq_full[0]) if rank else 0.0
    relation = ">" if rank else "="
    note = None if rank else "cross-block R12 has zero rank: the two blocks are independent and equality holds"

    checks = None
    lt_check = None
    decomp_check = None
    if tau_checks is not None:
        checks = []
        ts = _check_t_vectors(r.n, rng.seed)
        for k, tau in enumerate(float(v) for v in tau_checks):
            coeff_table = [(s, coefficient_c(r, part, tau, s, a)) for s in subset_splits(r.n, part)]
            rel_err = 0.0
            for t in ts:
                closed = lt_tau_derivative_closed(r, part, tau, a, t)
                fd = lt_tau_derivative_fd(r, part, tau, a, t)
                scale = max(abs(fd), abs(closed), 1e-12)
                rel_err = max(rel_err, abs(closed - fd) / scale)
            total, _terms = cdf_tau_derivative_decomposed(
                r, part, tau, a, x, samples, rng.substream(3 + 2 * k), ctl, chunk_size, workers
            )
            fd_est = cdf_tau_fd(
                r, part, tau, a, x, samples, rng.substream(4 + 2 * k), MC_FD_STEP, ctl, chunk_size, workers
            )
            combined = math.sqrt(total.std_err**2 + fd_est.std_err**2)
            disc = abs(total.value - fd_est.value) / combined if combined > 0 else 0.0
            checks.append(
                TauCheck(
                    tau=tau,
                    coefficients=coeff_table,
                    lt_derivative_max_rel_err=rel_err,
                    decomposition_total=total,
                    decomposition_fd=fd_est,
                    decomposition_discrepancy_se=disc,
                )
            )
        lt_check = max(c.lt_derivative_max_rel_err for c in checks) if checks else None
        decomp_check = max(c.decomposition_discrepancy_se for c in checks) if checks else None

    return GciReport(
        n=r.n,
        n1=part.n1,
        alpha=a.alpha,
        x=[float(v) for v in x],
        samples=samples,
        seed=rng.seed,
        lhs=lhs,
        rhs_block1=rhs1,
        rhs_block2=rhs2,
        rhs=rhs,
        rhs_std_err=rhs_se,
        gap=gap,
        gap_std_err=gap_se,
        r12_rank=rank,
        top_canonical_corr_sq=top,
        relation=relation,
        note=note,
        tau_checks=checks,
        tau_derivative_closed_form_check=lt_check,
        decomposition_check=decomp_check,
    )


def coefficients_csv(r: CorrelationMatrix, part: BlockPartition, taus, alpha) -> str:
    """Per-split coefficient table: columns j1, j2, rank, then c_J at each tau."""
    taus = [float(v) for v in taus]
    header = ["j1", "j2", "rank"] + [f"c_tau_{tau:g}" for tau in taus]
    lines = [",".join(header)]
    for s, rho_sq in _split_records(r, part):
        cells = [
            " ".join(map(str, s.j1)),
            " ".join(map(str, s.j2)),
            str(int(rho_sq.size)),
        ]
        for tau in taus:
            cells.append(repr(_coefficient_from_rho(
                alpha.alpha if isinstance(alpha, ShapeParameter) else float(alpha),
                tau,
                _tau_scaled_det(r, part, tau, s),
                rho_sq,
            )))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
