"""Small dense symmetric linear algebra on correlation matrices.

Everything in here operates on plain numpy arrays at desk scale (n <= 20 by
contract): eigendecompositions, determinants, principal-minor expansions,
canonical correlations of a two-block split, and the minimal-eigenvalue
decomposition R = lam*I + A*A^T that the Monte Carlo estimators are built on.

Index convention: public subset types carry 1-based indices (matching the
usual math notation {1..n}); conversion to 0-based numpy indexing happens
internally.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MatrixError, MvGammaError, NearSingularError

# Tolerances fixed by contract.
SYMMETRY_TOL = 1e-12
UNIT_DIAG_TOL = 1e-12
RANK_RTOL = 1e-12  # eigenvalue counts as positive iff > RANK_RTOL * max eigenvalue
MIN_EIG_FLOOR = 1e-12  # below this the spectral decomposition is refused

SUBSET_ENUMERATION_LIMIT = 20


class CorrelationMatrix:
    """Symmetric positive-definite matrix with unit diagonal.

    Construction symmetrizes the input, rejects asymmetry beyond 1e-12,
    forces the diagonal to exactly 1.0 (rejecting entries off by more than
    1e-12), requires off-diagonal entries in (-1, 1), and requires a strictly
    positive minimal eigenvalue.  The stored array is read-only.
    """

    __slots__ = ("n", "entries", "_eigvals")

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MatrixError(f"correlation matrix must be square, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise MatrixError("correlation matrix must have dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise MatrixError("correlation matrix contains non-finite entries")
        asym = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
        if asym > SYMMETRY_TOL:
            raise MatrixError(f"matrix asymmetry {asym:.3e} exceeds tolerance {SYMMETRY_TOL:.0e}")
        sym = 0.5 * (arr + arr.T)
        diag_off = float(np.max(np.abs(np.diagonal(sym) - 1.0)))
        if diag_off > UNIT_DIAG_TOL:
            raise MatrixError(f"diagonal deviates from 1 by {diag_off:.3e} (tolerance {UNIT_DIAG_TOL:.0e})")
        np.fill_diagonal(sym, 1.0)
        n = sym.shape[0]
        off = sym[~np.eye(n, dtype=bool)]
        if off.size and float(np.max(np.abs(off))) >= 1.0:
            raise MatrixError("off-diagonal entries must lie in (-1, 1)")
        eigvals = np.linalg.eigvalsh(sym)
        if eigvals[0] <= 0.0:
            raise MatrixError(f"matrix is not positive definite (minimal eigenvalue {eigvals[0]:.3e})")
        sym.flags.writeable = False
        self.n = n
        self.entries = sym
        self._eigvals = eigvals  # ascending

    @property
    def min_eigenvalue(self) -> float:
        return float(self._eigvals[0])

    def submatrix(self, indices_1based) -> np.ndarray:
        """Principal submatrix for 1-based row/column indices (writable copy)."""
        idx = _as_index_array(indices_1based, self.n)
        return self.entries[np.ix_(idx, idx)].copy()

    def __repr__(self):
        return f"CorrelationMatrix(n={self.n})"


def _as_index_array(indices_1based, n: int) -> np.ndarray:
    idx = np.asarray(list(indices_1based), dtype=int)
    if idx.size == 0:
        raise MatrixError("index set must be nonempty")
    if np.any(idx < 1) or np.any(idx > n):
        raise MatrixError(f"indices must lie in 1..{n}, got {idx.tolist()}")
    if np.any(np.diff(idx) <= 0):
        raise MatrixError("indices must be strictly increasing")
    return idx - 1


@dataclass(frozen=True)
class SubsetSplit:
    """A subset J of {1..n} split into a nonempty first-block part j1 and a
    nonempty second-block part j2 (both sorted, 1-based)."""

    j1: tuple[int, ...]
    j2: tuple[int, ...]

    def __post_init__(self):
        for name, part in (("j1", self.j1), ("j2", self.j2)):
            if len(part) == 0:
                raise MatrixError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(part, part[1:])):
                raise MatrixError(f"{name} must be strictly increasing, got {part}")
            if part[0] < 1:
                raise MatrixError(f"{name} indices are 1-based and must be >= 1")
        if self.j1[-1] >= self.j2[0]:
            raise MatrixError("j1 must precede j2 (blocks are contiguous index ranges)")

    @property
    def joint(self) -> tuple[int, ...]:
        return self.j1 + self.j2

    def label(self) -> str:
        return "{" + ",".join(map(str, self.j1)) + "}|{" + ",".join(map(str, self.j2)) + "}"


@dataclass(frozen=True)
class SpectralSplit:
    """Minimal-eigenvalue decomposition R = lam*I + lam*B*B^T.

    ``b_rows`` stacks the n row vectors b_j (length n-1); ``rank_a`` is the
    number of eigenvalues of R strictly above lam under the rank tolerance.
    With A = sqrt(lam)*B this is the representation R = lam*I + A*A^T.
    """

    lam: float
    b_rows: np.ndarray = field(repr=False)
    rank_a: int

    def reconstruct(self) -> np.ndarray:
        b = self.b_rows
        return self.lam * (np.eye(b.shape[0]) + b @ b.T)


def sym_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvector columns.  The input is symmetrized before factorization.
    """
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixError(f"sym_eigen needs a square matrix, got shape {arr.shape}")
    sym = 0.5 * (arr + arr.T)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise MvGammaError(
            f"eigendecomposition did not converge for {arr.shape[0]}x{arr.shape[1]} "
            f"symmetric matrix (max |entry| {np.max(np.abs(sym)):.3e})"
        ) from exc
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def det(m) -> float:
    """Determinant via pivoted LU factorization (0.0 for singular input)."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixError(f"det needs a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(arr))


def principal_minor_expansion(r: CorrelationMatrix, t) -> float:
    """Evaluate 1 + sum over nonempty J of det(R_J) * prod_{j in J} t_j.

    Explicit enumeration of all 2^n - 1 subsets; equals det(I + R*diag(t))
    for t >= 0.  Guarded at n <= 20 so the enumeration cannot hang.
    """
    t = np.asarray(t, dtype=float)
    if t.shape != (r.n,):
        raise MatrixError(f"t must have length {r.n}, got shape {t.shape}")
    if np.any(t < 0):
        raise MatrixError("t must be componentwise nonnegative")
    if r.n > SUBSET_ENUMERATION_LIMIT:
        raise MatrixError(f"subset enumeration limited to n <= {SUBSET_ENUMERATION_LIMIT}, got n = {r.n}")
    total = 1.0
    entries = r.entries
    for size in range(1, r.n + 1):
        for subset in itertools.combinations(range(r.n), size):
            idx = np.array(subset)
            total += det(entries[np.ix_(idx, idx)]) * float(np.prod(t[idx]))
    return total


def min_eig_decompose(r: CorrelationMatrix) -> SpectralSplit:
    """Decompose R = lam*I + A*A^T with lam the minimal eigenvalue of R.

    B = A/sqrt(lam) is built from the eigenpairs of R: column i is
    sqrt(eig_i - lam) * v_i for every eigenvalue strictly above lam, ordered
    by descending eigenvalue and zero-padded to width n-1.  When lam is a
    repeated eigenvalue, rank_a < n-1 and B carries zero columns (downstream
    estimators must tolerate zero rows b_j).
    """
    vals, vecs = sym_eigen(r.entries)
    lam = float(vals[-1])
    if lam < MIN_EIG_FLOOR:
        raise NearSingularError(
            f"minimal eigenvalue {lam:.3e} below {MIN_EIG_FLOOR:.0e}; matrix is numerically "
            "singular — regularize it (e.g. blend toward the identity) before decomposing"
        )
    tol = RANK_RTOL * float(vals[0])
    excess = vals - lam
    positive = excess > tol
    rank = int(np.count_nonzero(positive))
    n = r.n
    b = np.zeros((n, max(n - 1, 0)))
    cols = np.where(positive)[0]  # descending eigenvalue order already
    for out_col, i in enumerate(cols):
        b[:, out_col] = np.sqrt(excess[i] / lam) * vecs[:, i]
    return SpectralSplit(lam=lam, b_rows=b, rank_a=rank)


def canonical_corr_sq(r: CorrelationMatrix, j: SubsetSplit) -> np.ndarray:
    """Squared canonical correlations of the split (j1, j2) of R.

    These are the positive eigenvalues of
    R_J1^{-1/2} R_{J1,J2} R_J2^{-1} R_{J2,J1} R_J1^{-1/2}; only eigenvalues
    above the rank tolerance are returned, in descending order, so the length
    equals rank(R_{J1,J2}).
    """
    i1 = _as_index_array(j.j1, r.n)
    i2 = _as_index_array(j.j2, r.n)
    r11 = r.entries[np.ix_(i1, i1)]
    r22 = r.entries[np.ix_(i2, i2)]
    r12 = r.entries[np.ix_(i1, i2)]
    isqrt11 = _inv_sqrt_spd(r11)
    inv22 = _inv_spd(r22)
    core = isqrt11 @ r12 @ inv22 @ r12.T @ isqrt11
    vals, _ = sym_eigen(core)
    if vals.size == 0 or vals[0] <= 0.0:
        return np.empty(0)
    keep = vals > RANK_RTOL * vals[0]
    return np.asarray(vals[keep], dtype=float)


def _inv_sqrt_spd(m: np.ndarray) -> np.ndarray:
    vals, vecs = sym_eigen(m)
    if vals[-1] <= 0.0:
        raise MatrixError("submatrix is not positive definite")
    return (vecs / np.sqrt(vals)) @ vecs.T


def _inv_spd(m: np.ndarray) -> np.ndarray:
    vals, vecs = sym_eigen(m)
    if vals[-1] <= 0.0:
        raise MatrixError("submatrix is not positive definite")
    return (vecs / vals) @ vecs.T


def random_correlation(n: int, seed: int, min_eig_floor: float = 0.05) -> CorrelationMatrix:
    """Deterministic random correlation matrix with a minimal-eigenvalue floor.

    Gram matrix of i.i.d. standard normal rows normalized to unit length,
    then convex-blended with the identity just enough to push the minimal
    eigenvalue to at least ``min_eig_floor``.
    """
    if n < 1:
        raise MatrixError(f"dimension must be >= 1, got {n}")
    if not (0.0 < min_eig_floor < 1.0):
        raise MatrixError(f"min_eig_floor must lie in (0, 1), got {min_eig_floor}")
    if n == 1:
        return CorrelationMatrix([[1.0]])
    gen = np.random.default_rng(seed)
    rows = gen.standard_normal((n, n))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    gram = rows @ rows.T
    np.fill_diagonal(gram, 1.0)
    eye = np.eye(n)
    min_eig = float(np.linalg.eigvalsh(gram)[0])
    blended = gram
    if min_eig < min_eig_floor:
        w = (min_eig_floor - min_eig) / (1.0 - min_eig)
        for _ in range(8):  # nudge against roundoff landing just below the floor
            blended = (1.0 - w) * gram + w * eye
            np.fill_diagonal(blended, 1.0)
            if float(np.linalg.eigvalsh(blended)[0]) >= min_eig_floor:
                break
            w = min(w + 1e-12 + 4.0 * w * np.finfo(float).eps, 1.0)
    return CorrelationMatrix(blended)


# --- file formats -----------------------------------------------------------
# JSON: {"n": <int>, "rows": [[...], ...]}; CSV: headerless n x n decimals.


def matrix_to_json(r: CorrelationMatrix) -> str:
    return json.dumps({"n": r.n, "rows": [[float(v) for v in row] for row in r.entries]})


def matrix_to_csv(r: CorrelationMatrix) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in r.entries) + "\n"


def parse_matrix_json(text: str) -> CorrelationMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixError(f"invalid matrix JSON: {exc}") from exc
    if not isinstance(obj, dict) or "rows" not in obj:
        raise MatrixError('matrix JSON must be an object with "n" and "rows"')
    rows = obj["rows"]
    r = CorrelationMatrix(rows)
    if "n" in obj and int(obj["n"]) != r.n:
        raise MatrixError(f'matrix JSON field "n" = {obj["n"]} does not match {r.n} rows')
    return r


def parse_matrix_csv(text: str) -> CorrelationMatrix:
    rows = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise MatrixError(f"invalid matrix CSV line {line!r}: {exc}") from exc
    if not rows:
        raise MatrixError("matrix CSV is empty")
    return CorrelationMatrix(rows)


def load_matrix(path) -> CorrelationMatrix:
    """Read a correlation matrix from a .json or .csv file (sniffs content
    when the extension is ambiguous)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = str(path).lower()
    if name.endswith(".json") or text.lstrip().startswith("{"):
        return parse_matrix_json(text)
    return parse_matrix_csv(text)
