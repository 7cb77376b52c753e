"""Corner-form simplex homothets: predicates, intersection index, depth.

Every region here is a translated and scaled copy of one fixed shape, the
corner simplex ``{x : x_k >= a_k for all k, sum_k (x_k - a_k) <= s}`` with
corner ``a`` and size ``s >= 0`` (size zero degenerates to the point
``a``).  Regions are closed, so touching homothets intersect.

Two homothets ``(a, s)`` and ``(a', s')`` intersect exactly when the
componentwise-max corner fits under both diagonal caps::

    sum_k max(a_k, a'_k) <= min(sum(a) + s, sum(a') + s')

since that corner is the least point dominating both corners and every
common point dominates it.  The same reasoning gives the deepest-point
grid property used throughout: if a point lies in every member of a
subset, so does the componentwise max of that subset's corners, hence
some deepest point has every coordinate drawn from the per-axis corner
values.

All structures are immutable once built and queries are pure.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, GuardExceededError

# Grid cells times instance size allowed in the exhaustive deepest-point scan.
EXACT_DEPTH_GUARD = 300_000_000


@dataclass(frozen=True)
class SimplexHomothet:
    """A corner-form simplex: componentwise minimum ``corner`` and ``size``."""

    corner: tuple[float, ...]
    size: float

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(float(v) for v in self.corner))
        object.__setattr__(self, "size", float(self.size))
        if not self.corner:
            raise ValueError("corner needs at least one coordinate")
        if not all(math.isfinite(v) for v in self.corner) or not math.isfinite(
            self.size
        ):
            raise ValueError("corner and size must be finite")
        if self.size < 0:
            raise ValueError(f"size must be nonnegative, got {self.size}")

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def sum_cap(self) -> float:
        """Upper bound on coordinate sums inside the region."""
        return sum(self.corner) + self.size


def contains(simplex: SimplexHomothet, point: Sequence[float]) -> bool:
    """Closed membership test: all lower bounds plus the sum bound."""
    if len(point) != simplex.dim:
        raise DimensionMismatchError(
            f"point has {len(point)} coordinates, simplex has {simplex.dim}"
        )
    total = 0.0
    for x, a in zip(point, simplex.corner):
        if x < a:
            return False
        total += x - a
    return total <= simplex.size


def intersects(s1: SimplexHomothet, s2: SimplexHomothet) -> bool:
    """Whether the two closed regions share at least one point."""
    if s1.dim != s2.dim:
        raise DimensionMismatchError(
            f"simplices have dimensions {s1.dim} and {s2.dim}"
        )
    meet = sum(max(a, b) for a, b in zip(s1.corner, s2.corner))
    return meet <= min(s1.sum_cap, s2.sum_cap)


def _as_arrays(simplices: Sequence[SimplexHomothet]) -> tuple[np.ndarray, np.ndarray]:
    if not simplices:
        raise ValueError("need at least one simplex")
    d = simplices[0].dim
    for i, s in enumerate(simplices):
        if s.dim != d:
            raise DimensionMismatchError(
                f"simplex {i} has dimension {s.dim}, expected {d}"
            )
    corners = np.array([s.corner for s in simplices], dtype=float)
    sizes = np.array([s.size for s in simplices], dtype=float)
    return corners, sizes


def depth_at(simplices: Sequence[SimplexHomothet], point: Sequence[float]) -> int:
    """Number of simplices containing ``point`` (full rescan)."""
    corners, sizes = _as_arrays(simplices)
    x = np.asarray(point, dtype=float)
    if x.shape != (corners.shape[1],):
        raise DimensionMismatchError(
            f"point has shape {x.shape}, expected ({corners.shape[1]},)"
        )
    inside = (x >= corners).all(axis=1) & ((x - corners).sum(axis=1) <= sizes)
    return int(np.count_nonzero(inside))


# ---------------------------------------------------------------------------
# Intersection reporting index
# ---------------------------------------------------------------------------


class _Layer:
    """One nested search layer: elements sorted by one derived key.

    The first ``d`` keys are the per-axis extent tops ``a_k + s`` (queried
    with a lower bound) and the last key is the extent bottom ``sum(a)``
    along the diagonal (queried with an upper bound).  Non-final layers
    carry a balanced segment hierarchy whose every node owns a child layer
    over that node's elements, so a one-sided query decomposes into
    O(log n) child layers.
    """

    __slots__ = ("keys", "ids", "last", "nodes")

    def __init__(self, ids: list[int], keymat: list[tuple[float, ...]], depth: int):
        ids = sorted(ids, key=lambda i: keymat[i][depth])
        self.keys = [keymat[i][depth] for i in ids]
        self.ids = ids
        self.last = depth + 1 == len(keymat[0])
        self.nodes: dict[tuple[int, int], _Layer] = {}
        if not self.last:
            self._build(0, len(ids), keymat, depth + 1)

    def _build(self, lo: int, hi: int, keymat, depth: int):
        self.nodes[(lo, hi)] = _Layer(self.ids[lo:hi], keymat, depth)
        if hi - lo > 1:
            mid = (lo + hi) // 2
            self._build(lo, mid, keymat, depth)
            self._build(mid, hi, keymat, depth)

    def query(self, bounds: tuple[float, ...], depth: int, out: list[int]):
        if self.last:
            # final key: diagonal bottoms at most the probe's cap
            out.extend(self.ids[: bisect_right(self.keys, bounds[depth])])
            return
        # suffix of elements whose extent top reaches the probe's corner
        pos = bisect_left(self.keys, bounds[depth])
        self._descend(0, len(self.ids), pos, bounds, depth, out)

    def _descend(self, lo: int, hi: int, pos: int, bounds, depth: int, out):
        if pos <= lo:
            self.nodes[(lo, hi)].query(bounds, depth + 1, out)
            return
        if pos >= hi:
            return
        mid = (lo + hi) // 2
        self._descend(lo, mid, pos, bounds, depth, out)
        self._descend(mid, hi, pos, bounds, depth, out)


class IntersectionIndex:
    """Static index reporting, for a probe, every stored intersecting simplex.

    Each stored homothet becomes a point with ``d + 1`` derived
    coordinates — one per facet normal of the common shape: the top of its
    extent along each axis and the bottom of its extent along the
    diagonal.  A probe can only intersect elements whose axis extents
    reach the probe's corner and whose diagonal extent starts at or below
    the probe's cap, which a nested one-sided layer per normal resolves
    with logarithmic fan-out.  Those conditions are necessary but not
    sufficient, so survivors are confirmed with the exact pairwise
    predicate before being reported; reported sets are exact in every
    dimension.
    """

    def __init__(self, simplices: Iterable[SimplexHomothet]):
        sims = list(simplices)
        corners, sizes = _as_arrays(sims)
        self._simplices = sims
        self._dim = corners.shape[1]
        keymat = [
            tuple(corners[i, k] + sizes[i] for k in range(self._dim))
            + (float(corners[i].sum()),)
            for i in range(len(sims))
        ]
        self._root = _Layer(list(range(len(sims))), keymat, 0)

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._simplices)

    def query_indices(self, probe: SimplexHomothet) -> list[int]:
        """Indices (in storage order) of stored simplices intersecting the probe."""
        if probe.dim != self._dim:
            raise DimensionMismatchError(
                f"probe has dimension {probe.dim}, index has {self._dim}"
            )
        bounds = tuple(probe.corner) + (probe.sum_cap,)
        raw: list[int] = []
        self._root.query(bounds, 0, raw)
        sims = self._simplices
        return sorted(i for i in raw if intersects(sims[i], probe))

    def query(self, probe: SimplexHomothet) -> list[SimplexHomothet]:
        return [self._simplices[i] for i in self.query_indices(probe)]


# ---------------------------------------------------------------------------
# Arrangement statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrangementStats:
    """Boundary complexity summary of a set of homothets."""

    vertex_count: int
    max_depth: int
    pairwise_intersections: int


def _crossings_2d(a: SimplexHomothet, b: SimplexHomothet) -> int:
    """Crossing points between the two triangles' boundary segments.

    Each triangle contributes a horizontal, a vertical, and a diagonal
    edge; same-orientation edges are parallel and contribute nothing.
    Counts facet-pair incidences, so a point where several facet pairs
    meet is counted once per pair.
    """
    count = 0
    for first, second in ((a, b), (b, a)):
        fx, fy = first.corner
        sx, sy = second.corner
        # horizontal edge of `first` vs vertical edge of `second`
        if fx <= sx <= fx + first.size and sy <= fy <= sy + second.size:
            count += 1
        cap = second.sum_cap
        # horizontal edge of `first` vs diagonal edge of `second`
        x = cap - fy
        if fx <= x <= fx + first.size and sx <= x <= sx + second.size:
            count += 1
        # vertical edge of `first` vs diagonal edge of `second`
        y = cap - fx
        if fy <= y <= fy + first.size and sy <= y <= sy + second.size:
            count += 1
    return count


def _max_interval_depth(lo: np.ndarray, hi: np.ndarray) -> int:
    """Max stabbing depth of closed intervals [lo_i, hi_i]."""
    m = lo.shape[0]
    coords = np.concatenate([lo, hi])
    kind = np.concatenate([np.zeros(m, dtype=np.int8), np.ones(m, dtype=np.int8)])
    order = np.lexsort((kind, coords))  # opens before closes at equal coordinates
    delta = np.where(kind[order] == 0, 1, -1)
    return int(np.cumsum(delta).max())


def _max_depth_exact(corners: np.ndarray, sizes: np.ndarray) -> int:
    """Exact max depth; scan-based for d <= 2, grid-based above."""
    n, d = corners.shape
    if d == 1:
        return _max_interval_depth(corners[:, 0], corners[:, 0] + sizes)
    if d == 2:
        # Some deepest point has both coordinates among corner values, so
        # sweeping the vertical lines through corner x-values and stabbing
        # the induced y-intervals is exact at any size.
        best = 0
        caps = corners.sum(axis=1) + sizes
        for x in np.unique(corners[:, 0]):
            active = (corners[:, 0] <= x) & (x <= corners[:, 0] + sizes)
            if int(active.sum()) <= best:
                continue
            lo = corners[active, 1]
            hi = caps[active] - x
            best = max(best, _max_interval_depth(lo, hi))
        return best
    sims = [
        SimplexHomothet(tuple(corners[i]), float(sizes[i])) for i in range(n)
    ]
    return deepest_point_exact(sims).depth


def arrangement_stats(
    simplices: Sequence[SimplexHomothet], *, count_vertices: bool = True
) -> ArrangementStats:
    """Insert homothets by decreasing size and tally boundary interactions.

    Every insertion queries the intersection index for its already-placed
    (larger or equal, earlier) neighbors, so each intersecting pair is
    counted once; for ``d == 2`` the pair's boundary crossing points are
    accumulated as the arrangement's vertex count.  Vertex counting is
    only implemented in the plane — pass ``count_vertices=False`` for
    other dimensions.  Max depth is computed exactly.
    """
    sims = list(simplices)
    corners, sizes = _as_arrays(sims)
    d = corners.shape[1]
    if count_vertices and d != 2:
        raise GuardExceededError(
            "vertex counting is implemented for d=2 only; "
            "use count_vertices=False for other dimensions"
        )
    order = sorted(range(len(sims)), key=lambda i: (-sizes[i], i))
    rank = {idx: pos for pos, idx in enumerate(order)}
    index = IntersectionIndex(sims)
    pairwise = 0
    vertices = 0
    for pos, i in enumerate(order):
        earlier = [j for j in index.query_indices(sims[i]) if rank[j] < pos]
        pairwise += len(earlier)
        if count_vertices:
            for j in earlier:
                vertices += _crossings_2d(sims[i], sims[j])
    return ArrangementStats(
        vertex_count=vertices,
        max_depth=_max_depth_exact(corners, sizes),
        pairwise_intersections=pairwise,
    )


# ---------------------------------------------------------------------------
# Deepest point, exact and sampled
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DepthResult:
    """A point, the number of input simplices containing it, and whether
    the search for it was exhaustive."""

    point: tuple[float, ...]
    depth: int
    exact: bool


def deepest_point_exact(
    simplices: Sequence[SimplexHomothet], *, max_grid_work: int = EXACT_DEPTH_GUARD
) -> DepthResult:
    """Deepest point via the per-axis corner-value grid.

    Evaluates the depth of every grid combination (some optimum lies on
    that grid — see the module notes) and returns the maximum with the
    lexicographically smallest optimal point.  Work is ``grid cells * n``;
    instances above ``max_grid_work`` are rejected.
    """
    corners, sizes = _as_arrays(simplices)
    n, d = corners.shape
    axes = [np.unique(corners[:, k]) for k in range(d)]
    shape = tuple(int(a.size) for a in axes)
    cells = 1
    for s in shape:
        cells *= s
    if cells * n > max_grid_work:
        raise GuardExceededError(
            f"grid work {cells * n} exceeds the {max_grid_work} guard"
        )
    total = np.zeros(shape, dtype=float)
    for k in range(d):
        total = total + axes[k].reshape((1,) * k + (-1,) + (1,) * (d - k - 1))
    caps = corners.sum(axis=1) + sizes
    depth = np.zeros(shape, dtype=np.int32)
    for j in range(n):
        mask = total <= caps[j]
        for k in range(d):
            mask &= axes[k].reshape((1,) * k + (-1,) + (1,) * (d - k - 1)) >= corners[
                j, k
            ]
        depth += mask
    flat_best = int(np.argmax(depth))  # first max in C-order == lex-smallest point
    at = np.unravel_index(flat_best, shape)
    point = tuple(float(axes[k][at[k]]) for k in range(d))
    return DepthResult(point, int(depth[at]), exact=True)


def sample_probability(n: int, epsilon: float, depth_guess: float) -> float:
    """Per-element sampling rate that keeps a depth-``depth_guess`` point
    visible in the sample with high probability."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return min(1.0, 8.0 * math.log(n + 2) / (epsilon * epsilon * depth_guess))


def deepest_point_approx(
    simplices: Sequence[SimplexHomothet],
    epsilon: float,
    seed: int = 0,
    *,
    max_grid_work: int = EXACT_DEPTH_GUARD,
    trace: list | None = None,
) -> DepthResult:
    """Sampled deepest point whose reported depth is its true, verified depth.

    Walks a halving ladder of depth guesses starting at ``n``.  For each
    guess, a few independent rounds sample every simplex with a rate
    calibrated to the guess, solve the sample exhaustively, and check the
    winning point against the full input; the best verified point is kept.
    The ladder stops as soon as the best verified depth confirms the
    current guess up to ``1 - epsilon``, and a guess whose rate reaches 1
    is solved exactly.  Because candidate points are re-verified before
    being returned, the reported depth is always the returned point's true
    depth; four rounds per guess push the chance that it falls short of
    ``(1 - epsilon)`` times the true maximum below roughly ``n**-2``.

    Deterministic in ``seed``.  ``trace``, when given, receives one dict
    per round for diagnostics.
    """
    sims = list(simplices)
    if not sims:
        raise ValueError("need at least one simplex")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    n = len(sims)
    seed_seq = np.random.SeedSequence(seed % 2**63)
    best_point: tuple[float, ...] | None = None
    best_depth = -1

    def consider(point: tuple[float, ...], depth: int):
        nonlocal best_point, best_depth
        if depth > best_depth or (depth == best_depth and point < best_point):
            best_point, best_depth = point, depth

    guess = 1 << max(0, (n - 1).bit_length())
    while guess >= 1:
        rate = sample_probability(n, epsilon, guess)
        rounds = 1 if rate >= 1.0 else 4
        confirmed = False
        for _ in range(rounds):
            rng = np.random.default_rng(seed_seq.spawn(1)[0])
            if rate >= 1.0:
                sample = sims
            else:
                mask = rng.random(n) < rate
                sample = [s for s, keep in zip(sims, mask) if keep]
            if trace is not None:
                trace.append(
                    {"guess": guess, "rate": rate, "sample_size": len(sample)}
                )
            if not sample:
                continue
            found = deepest_point_exact(sample, max_grid_work=max_grid_work)
            consider(found.point, depth_at(sims, found.point))
            if rate >= 1.0 or best_depth >= (1.0 - epsilon) * guess:
                confirmed = True
                break
        if confirmed:
            break
        guess //= 2
    assert best_point is not None
    return DepthResult(best_point, best_depth, exact=False)


# ---------------------------------------------------------------------------
# Instance generators
# ---------------------------------------------------------------------------


def random_homothets(
    n: int,
    d: int,
    seed: int = 0,
    *,
    corner_range: tuple[float, float] = (0.0, 8.0),
    size_range: tuple[float, float] = (0.5, 3.0),
) -> list[SimplexHomothet]:
    """Deterministic random homothets with a healthy amount of overlap."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = np.random.default_rng(seed)
    corners = rng.uniform(corner_range[0], corner_range[1], size=(n, d))
    sizes = rng.uniform(size_range[0], size_range[1], size=n)
    return [SimplexHomothet(tuple(corners[i]), float(sizes[i])) for i in range(n)]


def depth_controlled_family(
    n: int, k: int, *, seed: int = 0, size: float = 4.0
) -> list[SimplexHomothet]:
    """Plane family of ``n`` equal-size triangles with max depth exactly ``k``.

    Builds well-separated groups of ``k`` translates whose corners are
    jittered along an anti-diagonal short enough that each group shares a
    point; no point can be covered by more than one group, so the depth of
    the family is ``k`` (groups cross each other's boundaries, which keeps
    the arrangement nondegenerate).
    """
    if n < k or k < 1:
        raise ValueError("need n >= k >= 1")
    rng = np.random.default_rng(seed)
    spacing = 100.0 * size
    out: list[SimplexHomothet] = []
    group = 0
    while len(out) < n:
        members = min(k, n - len(out))
        base_x = group * spacing
        base_y = -group * spacing
        shifts = rng.uniform(0.0, size / 2.0, size=members)
        if members == k:
            shifts[0] = 0.0
            shifts[-1] = size / 2.0  # pin the spread so full groups reach depth k
        for t in np.sort(shifts):
            out.append(SimplexHomothet((base_x + float(t), base_y - float(t)), size))
        group += 1
    return out
