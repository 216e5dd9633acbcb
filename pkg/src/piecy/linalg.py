"""Dense linear-algebra kernels for stream summarization.

Provides exact and randomized truncated SVD, projection onto the spanned
best-fit subspace, a weighted variant that reproduces the subspace of a
row-duplicated matrix, and top singular value extraction. Points are stored
one per row throughout.

Every operation is pure with respect to its inputs and Projector values are
immutable once built, so results can move freely between threads.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_OVERSAMPLE = 10
DEFAULT_POWER_ITERATIONS = 2

#: Entry-count guard for the dense exact decomposition (oracle scale).
EXACT_ENTRY_LIMIT = 4_000_000

#: Singular values below this fraction of the largest one are clamped to 0.
_SIGMA_CLIP = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a dense, finite, float64 matrix with one point per row."""
    mat = np.ascontiguousarray(a, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={mat.ndim}")
    if mat.shape[1] < 1:
        raise ValueError("matrix must have at least one column")
    if not np.isfinite(mat).all():
        raise ValueError("matrix contains non-finite entries")
    return mat


@dataclass(frozen=True)
class SvdTruncation:
    """Configuration for the randomized truncated SVD."""

    rank: int
    oversample: int = DEFAULT_OVERSAMPLE
    power_iterations: int = DEFAULT_POWER_ITERATIONS
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.oversample < 0:
            raise ValueError("oversample must be >= 0")
        if self.power_iterations < 0:
            raise ValueError("power_iterations must be >= 0")


@dataclass(frozen=True)
class Projector:
    """Rank-l best-fit subspace: orthonormal right singular vectors plus
    the retained singular values (nonincreasing)."""

    vectors: np.ndarray         # (d, rank), orthonormal columns
    singular_values: np.ndarray  # (rank,)

    def __post_init__(self):
        self.vectors.setflags(write=False)
        self.singular_values.setflags(write=False)

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of each column nonnegative."""
    out = np.array(vectors, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        peak = np.abs(col).max()
        if peak == 0.0:
            continue
        nz = np.nonzero(np.abs(col) > 1e-12 * peak)[0]
        if nz.size and col[nz[0]] < 0.0:
            out[:, j] = -col
    return out


def _clip_small(sigma: np.ndarray) -> np.ndarray:
    if sigma.size and sigma[0] > 0.0:
        sigma[sigma < _SIGMA_CLIP * sigma[0]] = 0.0
    return sigma


def _complete_orthonormal(vectors: np.ndarray, start: int) -> None:
    """Fill columns ``start:`` with deterministic orthonormal completions.

    Walks the standard basis and Gram-Schmidts against everything accepted
    so far; always succeeds because the requested rank never exceeds the
    ambient dimension.
    """
    dim, rank = vectors.shape
    col = start
    for basis in range(dim):
        if col == rank:
            return
        v = np.zeros(dim)
        v[basis] = 1.0
        v -= vectors[:, :col] @ (vectors[:, :col].T @ v)
        nrm = np.linalg.norm(v)
        if nrm > 0.5:
            vectors[:, col] = v / nrm
            col += 1
    if col != rank:
        raise RuntimeError("failed to complete an orthonormal basis")


def exact_truncated_svd(a, rank: int, *, max_entries: int = EXACT_ENTRY_LIMIT) -> Projector:
    """Top-``rank`` right singular vectors and values via a dense
    eigendecomposition of the smaller Gram matrix.

    Intended as the small-scale reference backend; refuses inputs above
    ``max_entries`` total entries. Squaring the matrix squares its condition
    number, which is acceptable at the tolerances this backend is used for.
    """
    mat = as_matrix(a)
    rows, cols = mat.shape
    if rank < 1 or rank > min(rows, cols):
        raise ValueError(f"rank {rank} out of range for a {rows}x{cols} matrix")
    if rows * cols > max_entries:
        raise ValueError(
            f"matrix with {rows * cols} entries exceeds the exact-backend "
            f"limit of {max_entries}"
        )

    if cols <= rows:
        gram = mat.T @ mat
        evals, evecs = np.linalg.eigh(gram)
        sigma = np.sqrt(np.clip(evals[::-1][:rank], 0.0, None))
        vectors = np.array(evecs[:, ::-1][:, :rank])
    else:
        gram = mat @ mat.T
        evals, evecs = np.linalg.eigh(gram)
        sigma = np.sqrt(np.clip(evals[::-1][:rank], 0.0, None))
        left = evecs[:, ::-1][:, :rank]
        vectors = np.empty((cols, rank))
        cutoff = sigma[0] * 1e-9 if sigma[0] > 0.0 else 0.0
        filled = 0
        for i in range(rank):
            if sigma[i] <= cutoff:
                break
            v = mat.T @ left[:, i]
            v -= vectors[:, :filled] @ (vectors[:, :filled].T @ v)
            nrm = np.linalg.norm(v)
            if nrm <= cutoff:
                break
            vectors[:, filled] = v / nrm
            filled += 1
        _complete_orthonormal(vectors, filled)
        sigma[filled:] = 0.0

    return Projector(_fix_signs(vectors), _clip_small(sigma))


def randomized_truncated_svd(a, trunc: SvdTruncation) -> Projector:
    """Approximate top-``rank`` Projector via Gaussian sketching.

    Sketches the column space (with power iterations for spectral-gap
    sharpening); on tall inputs a second sketch also compresses the row
    space so the final dense SVD runs on an r-by-r core. Fully reproducible
    for a fixed seed.
    """
    mat = as_matrix(a)
    rows, cols = mat.shape
    ell = trunc.rank
    r = ell + trunc.oversample
    if r > min(rows, cols):
        raise ValueError(
            f"rank + oversample = {r} exceeds min(rows, cols) = {min(rows, cols)}"
        )

    rng = np.random.default_rng(trunc.seed)
    omega = rng.standard_normal((cols, r))
    q, _ = np.linalg.qr(mat @ omega)
    for _ in range(trunc.power_iterations):
        z, _ = np.linalg.qr(mat.T @ q)
        q, _ = np.linalg.qr(mat @ z)
    small = q.T @ mat  # (r, cols)

    if rows > 4 * r:
        # Tall input: compress the remaining long side as well and decompose
        # an r-by-r core instead of r-by-cols.
        omega2 = rng.standard_normal((r, r))
        w, _ = np.linalg.qr(small.T @ omega2)
        core = small @ w
        _, sigma, vt = np.linalg.svd(core)
        vectors = w @ vt.T
    else:
        _, sigma, vt = np.linalg.svd(small, full_matrices=False)
        vectors = vt.T

    sigma = np.array(sigma[:ell])
    vectors = vectors[:, :ell]
    return Projector(_fix_signs(vectors), _clip_small(sigma))


def project(a, projector: Projector) -> np.ndarray:
    """Project rows of ``a`` onto the subspace: returns A V V^T.

    The output keeps the ambient dimension; only the intrinsic dimension
    drops to the projector's rank.
    """
    mat = as_matrix(a)
    v = projector.vectors
    if mat.shape[1] != v.shape[0]:
        raise ValueError(
            f"matrix has {mat.shape[1]} columns but the projector expects {v.shape[0]}"
        )
    return (mat @ v) @ v.T


def reconstruction_error(a, projector: Projector) -> float:
    """Squared Frobenius norm of A minus its projection."""
    mat = as_matrix(a)
    resid = mat - project(mat, projector)
    return float(np.einsum("ij,ij->", resid, resid))


def weighted_best_fit(points, weights, trunc: SvdTruncation, *, exact: bool = False,
                      max_entries: int = EXACT_ENTRY_LIMIT) -> Projector:
    """Best-fit subspace of the multiset where row i appears ``weights[i]``
    times, computed without materializing the duplicates.

    Scaling row i by sqrt(w_i) preserves every right singular vector of the
    duplicated matrix, so the decomposition runs on the scaled matrix. The
    caller's points and weights are untouched; project the original
    (unscaled) rows with the result.
    """
    mat = as_matrix(points)
    w = np.asarray(weights)
    if w.ndim != 1 or w.shape[0] != mat.shape[0]:
        raise ValueError("weights must be one per row")
    if not np.all(w >= 1):
        raise ValueError("weights must be positive integers (>= 1)")
    scaled = mat * np.sqrt(w.astype(np.float64))[:, None]
    if exact:
        return exact_truncated_svd(scaled, trunc.rank, max_entries=max_entries)
    return randomized_truncated_svd(scaled, trunc)


def spectrum(a, count: int, *, seed: int = 0,
             max_entries: int = EXACT_ENTRY_LIMIT) -> np.ndarray:
    """Top ``count`` singular values, nonincreasing.

    Uses the exact backend when the matrix is small enough and the
    randomized one otherwise.
    """
    mat = as_matrix(a)
    rows, cols = mat.shape
    if count < 1 or count > min(rows, cols):
        raise ValueError(f"count {count} out of range for a {rows}x{cols} matrix")
    if rows * cols <= max_entries:
        proj = exact_truncated_svd(mat, count, max_entries=max_entries)
    else:
        oversample = min(DEFAULT_OVERSAMPLE, min(rows, cols) - count)
        proj = randomized_truncated_svd(
            mat, SvdTruncation(count, oversample=oversample, seed=seed)
        )
    return np.array(proj.singular_values)
