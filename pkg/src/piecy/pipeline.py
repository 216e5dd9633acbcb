"""Single-engine streaming pipelines.

``run_bico`` feeds raw points straight into one summarizer engine.
``run_piecy`` buffers the stream into pieces, reduces each piece's
intrinsic dimension by projecting onto its randomized best-fit subspace,
and feeds the projected points into the same kind of engine. Both consume
the stream exactly once and hold at most one piece, one projector and one
engine at a time.
"""

import time
from dataclasses import dataclass

import numpy as np

from .coreset import BicoEngine, Coreset
from .evaluation import CostSummary, kmeans_repetitions
from .linalg import SvdTruncation, project, randomized_truncated_svd
from .util import MASK64

DEFAULT_CORESET_FACTOR = 200


def default_svd_dim(k: int) -> int:
    """Projection dimension used when none is requested: ceil(3k/2)."""
    return (3 * k + 1) // 2


@dataclass
class PiecyConfig:
    k: int
    piece_size: int
    svd_dim: int | None = None
    coreset_size: int | None = None
    oversample: int = 10
    power_iterations: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.svd_dim is None:
            self.svd_dim = default_svd_dim(self.k)
        if self.coreset_size is None:
            self.coreset_size = DEFAULT_CORESET_FACTOR * self.k
        if self.svd_dim < 1:
            raise ValueError("svd_dim must be >= 1")
        if self.piece_size < self.svd_dim:
            raise ValueError("piece_size must be >= svd_dim")
        if self.coreset_size < self.k:
            raise ValueError("coreset_size must be >= k")


@dataclass
class PipelineStats:
    """Instrumentation counters filled in by the runners."""

    points_read: int = 0
    pieces: int = 0
    svd_calls: int = 0
    svd_seconds: float = 0.0
    insert_seconds: float = 0.0
    peak_live_projectors: int = 0


def iter_pieces(points, piece_size: int, dim: int):
    """Assemble a point iterator into row blocks of at most ``piece_size``.

    The same buffer is reused between pieces; consumers must not retain
    row views across iterations (the engine and the projection both copy
    what they keep).
    """
    if piece_size < 1:
        raise ValueError("piece_size must be >= 1")
    buf = np.empty((piece_size, dim))
    fill = 0
    for p in points:
        buf[fill] = p
        fill += 1
        if fill == piece_size:
            yield buf
            fill = 0
    if fill:
        yield buf[:fill]


def run_bico(points, dim: int, coreset_size: int,
             stats: PipelineStats | None = None) -> Coreset:
    """One pass of the plain summarizer over unit-weight points."""
    engine = BicoEngine(dim, coreset_size)
    t0 = time.perf_counter()
    count = 0
    for p in points:
        engine.insert(p)
        count += 1
    if stats is not None:
        stats.points_read += count
        stats.insert_seconds += time.perf_counter() - t0
    return engine.extract_coreset()


def run_piecy(points, dim: int, cfg: PiecyConfig,
              stats: PipelineStats | None = None) -> Coreset:
    """One pass of the piece-projected pipeline.

    Every full piece is projected onto its rank-``svd_dim`` best-fit
    subspace (randomized backend, seed xor piece index) before insertion.
    A final partial piece is projected as well unless it is smaller than
    the target rank, in which case projecting would be vacuous and the
    rows go in unprojected. Projection is skipped entirely when the target
    rank reaches the ambient dimension.
    """
    if cfg.svd_dim > dim:
        raise ValueError(f"svd_dim {cfg.svd_dim} exceeds point dimension {dim}")
    engine = BicoEngine(dim, cfg.coreset_size)
    ell = cfg.svd_dim
    for index, piece in enumerate(iter_pieces(points, cfg.piece_size, dim)):
        rows = piece.shape[0]
        block = piece
        if ell < dim and rows >= ell:
            oversample = min(cfg.oversample, min(rows, dim) - ell)
            trunc = SvdTruncation(ell, oversample, cfg.power_iterations,
                                  seed=(cfg.seed ^ index) & MASK64)
            t0 = time.perf_counter()
            projector = randomized_truncated_svd(piece, trunc)
            block = project(piece, projector)
            if stats is not None:
                stats.svd_seconds += time.perf_counter() - t0
                stats.svd_calls += 1
                stats.peak_live_projectors = max(stats.peak_live_projectors, 1)
            del projector
        t0 = time.perf_counter()
        for i in range(rows):
            engine.insert(block[i])
        if stats is not None:
            stats.insert_seconds += time.perf_counter() - t0
            stats.points_read += rows
            stats.pieces += 1
    return engine.extract_coreset()


def coreset_cost_report(coreset: Coreset, k: int, reps: int = 5, seed: int = 0,
                        max_iters: int = 100, tol: float = 1e-4) -> CostSummary:
    """Cluster the summary ``reps`` times and summarize the weighted costs."""
    if len(coreset) == 0:
        raise ValueError("cannot evaluate an empty coreset")
    runs = kmeans_repetitions(coreset.points, coreset.weights.astype(np.float64),
                              k, reps=reps, seed=seed, max_iters=max_iters, tol=tol)
    return CostSummary.of(cost for _, cost in runs)
