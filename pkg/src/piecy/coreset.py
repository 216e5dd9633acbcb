"""Bounded-memory stream summarizer built on clustering features.

A clustering feature stores, for a weighted multiset of points, its total
weight n, the weighted coordinate sum s, and the weighted sum of squared
norms q. That triple is enough to evaluate the exact summed squared error
of the multiset against any single center, so the engine can maintain an
error budget per feature without keeping the points.

The engine covers the stream with features anchored at reference points,
organized in levels whose admission radius shrinks by half per level. A
point joins the nearest eligible feature for as many copies as fit under
the error threshold T, and the remainder descends a level; when no feature
is eligible a new one opens at the point. When the feature count would
exceed the budget, T doubles and all features are re-anchored under the
larger threshold.

Inserting a point with weight w is guaranteed to leave the engine in the
same state as inserting w consecutive unit-weight copies of the same point
(identical feature multiset; weights match exactly, sums up to float
roundoff). The closed-form insertion bound below and the rebuild timing
are both arranged to preserve that equivalence.
"""

import math
from dataclasses import dataclass

import numpy as np


def insertion_error_increment(group_weight: int, copies: int, dist_sq: float) -> float:
    """Exact SSE increase from adding ``copies`` copies of one point at squared
    distance ``dist_sq`` from the centroid of a group of total weight
    ``group_weight``: s*w/(s+w) * dist_sq."""
    return group_weight * copies / (group_weight + copies) * dist_sq


def max_insertable_copies(group_weight: int, copies: int, cur_error: float,
                          threshold: float, dist_sq: float) -> int:
    """Largest w' <= copies keeping cur_error + s*w'/(s+w')*dist_sq <= threshold.

    The increment is increasing but bounded by s*dist_sq, so when
    s*dist_sq - threshold + cur_error <= 0 the threshold is unreachable and
    every copy fits. Otherwise the bound solves to
    w' = s*(threshold - cur_error) / (s*dist_sq - threshold + cur_error),
    floored because weights are integral.
    """
    slack = group_weight * dist_sq - threshold + cur_error
    if slack <= 0.0:
        return copies
    limit = (group_weight * threshold - group_weight * cur_error) / slack
    if limit >= copies:
        return copies
    if limit <= 0.0:
        return 0
    return int(limit)


@dataclass
class ClusteringFeature:
    """Snapshot of one feature: weight n, linear sum s, squared sum q, and
    the reference point the feature is anchored at."""

    weight: int
    linear_sum: np.ndarray
    square_sum: float
    reference: np.ndarray

    @classmethod
    def from_point(cls, point, weight: int = 1) -> "ClusteringFeature":
        x = np.asarray(point, dtype=np.float64)
        return cls(weight, weight * x, weight * float(x @ x), x.copy())

    @property
    def centroid(self) -> np.ndarray:
        return self.linear_sum / self.weight

    def internal_error(self) -> float:
        """SSE of the represented multiset to its own centroid: q - |s|^2/n,
        clamped at zero against roundoff."""
        err = self.square_sum - float(self.linear_sum @ self.linear_sum) / self.weight
        return err if err > 0.0 else 0.0

    def cost_to(self, center) -> float:
        """Exact weighted SSE of the represented multiset to ``center``."""
        c = np.asarray(center, dtype=np.float64)
        if c.shape != self.linear_sum.shape:
            raise ValueError("center dimension does not match the feature")
        cost = (self.square_sum - 2.0 * float(c @ self.linear_sum)
                + self.weight * float(c @ c))
        return cost if cost > 0.0 else 0.0

    def merged_with(self, other: "ClusteringFeature") -> "ClusteringFeature":
        """Componentwise merge; the reference point of ``self`` is kept."""
        return ClusteringFeature(
            self.weight + other.weight,
            self.linear_sum + other.linear_sum,
            self.square_sum + other.square_sum,
            self.reference.copy(),
        )


@dataclass
class Coreset:
    """Weighted point summary: one row per feature centroid."""

    points: np.ndarray   # (size, dim)
    weights: np.ndarray  # (size,), positive integers

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return zip(self.points, self.weights)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())


class _Group:
    """A candidate set at one tree level: nodes plus a packed reference
    index for vectorized nearest-reference queries.

    The last query is memoized by point identity (references are immutable
    and only appended, so membership changes are the only invalidation);
    repeated copies of one point hit the cache with bit-identical results.
    """

    __slots__ = ("nodes", "refs", "norms", "size", "work",
                 "ckey", "cj", "cpart")

    def __init__(self, dim: int):
        self.nodes = []
        self.refs = np.empty((8, dim))
        self.norms = np.empty(8)
        self.work = np.empty(8)
        self.size = 0
        self.ckey = None
        self.cj = -1
        self.cpart = math.inf

    def add(self, node: "_Node") -> None:
        i = self.size
        if i == self.refs.shape[0]:
            self.refs = np.resize(self.refs, (2 * i, self.refs.shape[1]))
            self.norms = np.resize(self.norms, 2 * i)
            self.work = np.empty(2 * i)
        self.refs[i] = node.reference
        self.norms[i] = node.reference @ node.reference
        self.size = i + 1
        self.nodes.append(node)
        self.ckey = None

    def nearest(self, x: np.ndarray):
        """Index and |ref|^2 - 2*ref.x of the nearest reference (add |x|^2
        for the true squared distance); (-1, inf) when empty. Ties resolve
        to the lowest insertion index."""
        n = self.size
        if n == 0:
            return -1, math.inf
        if x is self.ckey:
            return self.cj, self.cpart
        if n == 1:
            j = 0
            part = self.norms[0] - 2.0 * float(np.dot(self.refs[0], x))
        else:
            work = self.work[:n]
            np.dot(self.refs[:n], x, out=work)
            work *= -2.0
            work += self.norms[:n]
            j = int(work.argmin())
            part = float(work[j])
        self.ckey = x
        self.cj = j
        self.cpart = part
        return j, part


class _Node:
    """One feature in the tree; children hold the finer features spawned
    when this one saturated. The last s.x product is memoized by point
    identity plus the weight at cache time (any update changes the weight)."""

    __slots__ = ("weight", "linear_sum", "square_sum", "sum_norm", "reference",
                 "children", "index", "dkey", "dweight", "ddot")

    def __init__(self, x: np.ndarray, weight: int, x_sq: float, index: int):
        self.weight = weight
        self.linear_sum = weight * x          # fresh array
        self.square_sum = weight * x_sq
        self.sum_norm = float(weight * weight) * x_sq  # cached |s|^2
        self.reference = x.copy()
        self.children = None
        self.index = index
        self.dkey = None
        self.dweight = -1
        self.ddot = 0.0

    def dot_with(self, x: np.ndarray) -> float:
        if x is self.dkey and self.dweight == self.weight:
            return self.ddot
        dot = float(np.dot(self.linear_sum, x))
        self.dkey = x
        self.dweight = self.weight
        self.ddot = dot
        return dot


class BicoEngine:
    """Single-pass summarizer with a hard feature budget.

    The threshold starts from the spread of the first points seen (any
    positive start works; doubling self-corrects) and the structure is
    built once ``budget + 1`` distinct locations have arrived. Earlier
    points are buffered and replayed. One writer per engine; extracted
    coresets are independent snapshots.
    """

    def __init__(self, dim: int, budget: int, *, bootstrap_cap: int = 1001):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if budget < 1:
            raise ValueError("budget must be >= 1")
        self._dim = dim
        self._budget = budget
        self._total_weight = 0
        self._threshold = 0.0
        self._roots = None
        self._num_features = 0
        self._next_index = 0
        self._pending = []            # [x, weight, key] with consecutive-run merging
        self._sample = []             # first distinct locations, for the threshold
        self._distinct = set()
        self._sample_cap = min(budget + 1, bootstrap_cap)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def budget(self) -> int:
        return self._budget

    @property
    def total_weight(self) -> int:
        return self._total_weight

    @property
    def threshold(self) -> float:
        return self._threshold

    @property
    def num_features(self) -> int:
        if self._roots is None:
            return len(self._distinct)
        return self._num_features

    # -- ingestion ---------------------------------------------------------

    def insert(self, point, weight: int = 1) -> None:
        """Absorb ``weight`` copies of ``point``."""
        x = np.asarray(point, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self._dim:
            raise ValueError(f"expected a point of dimension {self._dim}")
        w = int(weight)
        if w < 1:
            raise ValueError("weight must be a positive integer")
        x_sq = float(x @ x)
        if not math.isfinite(x_sq):
            if not np.isfinite(x).all():
                raise ValueError("point has non-finite coordinates")
            raise ValueError("point coordinates overflow")
        self._total_weight += w
        if self._roots is None:
            self._bootstrap(x, w)
        else:
            self._insert_live(x, x_sq, w)

    def _bootstrap(self, x: np.ndarray, w: int) -> None:
        key = x.tobytes()
        pend = self._pending
        if pend and pend[-1][2] == key:
            pend[-1][1] += w
        else:
            pend.append([x.copy(), w, key])
        if key not in self._distinct:
            self._distinct.add(key)
            if len(self._sample) < self._sample_cap:
                self._sample.append(x.copy())
            if len(self._distinct) > self._budget:
                self._build()

    def _build(self) -> None:
        sample = np.stack(self._sample)
        self._threshold = _min_pairwise_sq(sample) * self._budget / 16.0
        self._roots = _Group(self._dim)
        pending, self._pending = self._pending, []
        self._sample = []
        self._distinct = set()
        for x, w, _ in pending:
            self._insert_live(x, float(x @ x), w)

    def _insert_live(self, x: np.ndarray, x_sq: float, w: int) -> None:
        remaining = w
        while remaining > 0:
            remaining -= self._absorb(x, x_sq, remaining)

    def _absorb(self, x: np.ndarray, x_sq: float, remaining: int) -> int:
        """One descent from the roots; returns the number of copies placed.

        Opens at most one feature. If opening would exceed the budget, the
        new feature takes a single copy and a rebuild runs before the caller
        retries the rest; that is exactly the order of events when the
        copies arrive one at a time, which keeps weighted and unit-weight
        streams aligned across rebuilds.

        The capacity math below inlines max_insertable_copies.
        """
        threshold = self._threshold
        group = self._roots
        radius_sq = threshold  # level-1 admission radius^2; quarters per level
        placed = 0
        while True:
            j, part = group.nearest(x)
            if j < 0 or part + x_sq > radius_sq:
                if self._num_features < self._budget:
                    self._open(group, x, x_sq, remaining)
                    return placed + remaining
                self._open(group, x, x_sq, 1)
                self._rebuild()
                return placed + 1
            node = group.nodes[j]
            n = node.weight
            norm_over_n = node.sum_norm / n
            err = node.square_sum - norm_over_n
            if err < 0.0:
                err = 0.0
            dot = node.dot_with(x)
            dist_sq = x_sq - (2.0 * dot - norm_over_n) / n
            if dist_sq < 0.0:
                dist_sq = 0.0
            slack = n * dist_sq - threshold + err
            if slack <= 0.0:
                take = remaining
            else:
                limit = (n * threshold - n * err) / slack
                if limit >= remaining:
                    take = remaining
                elif limit > 0.0:
                    take = int(limit)
                else:
                    take = 0
            if take > 0:
                node.weight = n + take
                if take == 1:
                    node.linear_sum += x
                else:
                    node.linear_sum += take * x
                node.square_sum += take * x_sq
                node.sum_norm += 2.0 * take * dot + float(take * take) * x_sq
                placed += take
                remaining -= take
                if remaining == 0:
                    return placed
            if node.children is None:
                node.children = _Group(self._dim)
            group = node.children
            radius_sq *= 0.25

    def _open(self, group: _Group, x: np.ndarray, x_sq: float, w: int) -> None:
        group.add(_Node(x, w, x_sq, self._next_index))
        self._next_index += 1
        self._num_features += 1

    # -- rebuilding --------------------------------------------------------

    def _rebuild(self) -> None:
        """Double the threshold and re-anchor every feature until the count
        fits the budget again. Heaviest features first; creation order
        breaks ties. Weight, linear and squared sums are conserved."""
        while self._num_features > self._budget:
            self._threshold *= 2.0
            nodes = []
            _collect(self._roots, nodes)
            nodes.sort(key=_rebuild_order)
            self._roots = _Group(self._dim)
            self._num_features = 0
            for node in nodes:
                self._reattach(node)

    def _reattach(self, node: _Node) -> None:
        threshold = self._threshold
        group = self._roots
        radius_sq = threshold
        ref = node.reference
        ref_sq = float(ref @ ref)
        while True:
            j, part = group.nearest(ref)
            if j < 0 or part + ref_sq > radius_sq:
                group.add(node)
                self._num_features += 1
                return
            host = group.nodes[j]
            m_weight = host.weight + node.weight
            m_sum = host.linear_sum + node.linear_sum
            m_square = host.square_sum + node.square_sum
            m_norm = float(m_sum @ m_sum)
            if m_square - m_norm / m_weight <= threshold:
                host.weight = m_weight
                host.linear_sum = m_sum
                host.square_sum = m_square
                host.sum_norm = m_norm
                return
            if host.children is None:
                host.children = _Group(self._dim)
            group = host.children
            radius_sq *= 0.25

    # -- extraction --------------------------------------------------------

    def features(self):
        """Snapshot of all features as (level, ClusteringFeature) pairs, in
        deterministic traversal order."""
        out = []
        if self._roots is None:
            for x, w, _ in _aggregate_pending(self._pending):
                out.append((1, ClusteringFeature(w, w * x, w * float(x @ x), x.copy())))
            return out
        stack = [(1, node) for node in reversed(self._roots.nodes)]
        while stack:
            level, node = stack.pop()
            out.append((level, ClusteringFeature(
                node.weight, node.linear_sum.copy(), node.square_sum,
                node.reference.copy())))
            if node.children is not None:
                stack.extend((level + 1, child) for child in reversed(node.children.nodes))
        return out

    def extract_coreset(self) -> Coreset:
        """One weighted point per feature: centroid with the feature weight.
        Weights sum exactly to the total weight consumed."""
        feats = self.features()
        if not feats:
            return Coreset(np.zeros((0, self._dim)), np.zeros(0, dtype=np.int64))
        points = np.stack([cf.linear_sum / cf.weight for _, cf in feats])
        weights = np.array([cf.weight for _, cf in feats], dtype=np.int64)
        return Coreset(points, weights)


def _rebuild_order(node: _Node):
    return (-node.weight, node.index)


def _collect(group: _Group, out: list) -> None:
    for node in group.nodes:
        out.append(node)
        if node.children is not None:
            _collect(node.children, out)
            node.children = None


def _aggregate_pending(pending):
    """Merge buffered entries per exact location, first-occurrence order."""
    agg = {}
    order = []
    for x, w, key in pending:
        if key in agg:
            agg[key][1] += w
        else:
            agg[key] = [x, w]
            order.append(key)
    return [(agg[key][0], agg[key][1], key) for key in order]


def _min_pairwise_sq(sample: np.ndarray) -> float:
    """Smallest positive squared distance among the sample rows."""
    if sample.shape[0] < 2:
        return 1.0
    norms = np.einsum("ij,ij->i", sample, sample)
    d2 = norms[:, None] + norms[None, :] - 2.0 * (sample @ sample.T)
    np.fill_diagonal(d2, np.inf)
    positive = d2[d2 > 0.0]
    if positive.size == 0:
        return 1e-12 * float(max(norms.max(), 1.0))
    return float(positive.min())
