"""Ball coverings of a box domain, cell-based neighbour search and fill distance."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import CoveringError, InputDomainError
from .rbf_local import as_points


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``[lower, upper]``; defaults to the unit square."""

    lower: tuple = (0.0, 0.0)
    upper: tuple = (1.0, 1.0)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InputDomainError("domain bounds must have the same nonzero dimension")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InputDomainError(f"domain needs lower < upper componentwise, got {lo} and {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, dim: int = 2) -> "Domain":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def edge(self) -> float:
        return float(np.max(self.widths))

    def grid(self, side: int) -> np.ndarray:
        """Tensor grid with ``side`` equispaced points per axis, first axis varying slowest."""
        axes = [np.linspace(lo, hi, side) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


class CellIndex:
    """Uniform-grid bucketing of a point set for fixed-radius and nearest-point queries.

    Points are sorted by cell id; ``start[c]`` and ``count[c]`` give the slice of
    the sorted order that falls in cell ``c``. Queries are vectorised over the
    query points: for every cell offset and every slot within a cell, one numpy
    pass handles all queries at once.
    """

    def __init__(self, points, cell: float, origin=None):
        self.points = as_points(points)
        if len(self.points) == 0:
            raise InputDomainError("cannot index an empty point set")
        if not cell > 0:
            raise InputDomainError(f"cell size must be positive, got {cell}")
        self.cell = float(cell)
        self.dim = self.points.shape[1]
        lo = self.points.min(axis=0)
        self.origin = lo if origin is None else np.minimum(np.asarray(origin, dtype=float), lo)
        coords = self._cell_coords(self.points)
        self.shape = tuple(int(v) for v in coords.max(axis=0) + 1)
        flat = np.ravel_multi_index(coords.T, self.shape)
        self.order = np.argsort(flat, kind="stable")
        ncell = int(np.prod(self.shape))
        self.count = np.bincount(flat, minlength=ncell)
        self.start = np.concatenate(([0], np.cumsum(self.count)[:-1]))

    def _cell_coords(self, pts: np.ndarray) -> np.ndarray:
        return np.floor((pts - self.origin) / self.cell).astype(np.int64)

    def _offsets(self, reach: int):
        return itertools.product(range(-reach, reach + 1), repeat=self.dim)

    def _scan(self, q: np.ndarray, qcells: np.ndarray, reach: int):
        """Yield ``(query_rows, point_ids, distances)`` for every candidate in range."""
        shape = np.asarray(self.shape)
        rows_all = np.arange(len(q))
        for off in self._offsets(reach):
            cells = qcells + np.asarray(off)
            ok = np.all((cells >= 0) & (cells < shape), axis=1)
            if not ok.any():
                continue
            rows = rows_all[ok]
            flat = np.ravel_multi_index(cells[ok].T, self.shape)
            start, count = self.start[flat], self.count[flat]
            for slot in range(int(count.max(initial=0))):
                has = count > slot
                r = rows[has]
                ids = self.order[start[has] + slot]
                d = np.linalg.norm(self.points[ids] - q[r], axis=1)
                yield r, ids, d

    def query_pairs(self, queries, radius: float):
        """All pairs with ``|point - query| < radius``, sorted by (query, point).

        Only the ``(2k+1)^n`` cells around each query are scanned, where
        ``k = ceil(radius / cell)``; with ``radius == cell`` that is the 3^n block.
        """
        q = as_points(queries)
        reach = max(1, math.ceil(radius / self.cell))
        qi, pi, dist = [], [], []
        for r, ids, d in self._scan(q, self._cell_coords(q), reach):
            keep = d < radius
            qi.append(r[keep])
            pi.append(ids[keep])
            dist.append(d[keep])
        if not qi:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0)
        qi, pi, dist = np.concatenate(qi), np.concatenate(pi), np.concatenate(dist)
        order = np.lexsort((pi, qi))
        return qi[order], pi[order], dist[order]

    def query_ball(self, x, radius: float) -> np.ndarray:
        _, ids, _ = self.query_pairs(np.asarray(x, dtype=float).reshape(1, -1), radius)
        return ids

    def nearest(self, queries):
        """Nearest indexed point for each query; ties go to the lowest index."""
        q = as_points(queries)
        best_d = np.full(len(q), np.inf)
        best_i = np.full(len(q), -1, dtype=np.int64)
        pending = np.arange(len(q))
        reach = 1
        max_reach = max(self.shape) + 1
        while len(pending):
            sub = q[pending]
            if (2 * reach + 1) ** self.points.shape[1] > len(self.points):
                # block scan would touch more cells than there are points
                for chunk in np.array_split(np.arange(len(pending)), max(1, len(pending) // 256)):
                    d = cdist(sub[chunk], self.points)
                    i = d.argmin(axis=1)
                    best_i[pending[chunk]] = i
                    best_d[pending[chunk]] = d[np.arange(len(chunk)), i]
                break
            d_sub = np.full(len(pending), np.inf)
            i_sub = np.full(len(pending), np.iinfo(np.int64).max)
            for r, ids, d in self._scan(sub, self._cell_coords(sub), reach):
                better = (d < d_sub[r]) | ((d == d_sub[r]) & (ids < i_sub[r]))
                # a query row appears at most once per slot pass, so masked writes are safe
                d_sub[r[better]] = d[better]
                i_sub[r[better]] = ids[better]
            # every point within reach * cell of the query lies in the scanned block
            done = (d_sub <= reach * self.cell) | (reach >= max_reach)
            best_d[pending[done]] = d_sub[done]
            best_i[pending[done]] = i_sub[done]
            pending = pending[~done]
            reach *= 2
        return best_i, best_d


@dataclass(frozen=True, eq=False)
class Covering:
    """Ball patches ``B(center_j, radius)`` plus their data members once assigned."""

    centers: np.ndarray
    radius: float
    domain: Domain = field(default_factory=Domain)
    members: tuple = None
    points: np.ndarray = None

    @property
    def M(self) -> int:
        return len(self.centers)

    @property
    def counts(self) -> np.ndarray:
        if self.members is None:
            raise CoveringError("covering has no assigned points")
        return np.array([len(m) for m in self.members], dtype=np.int64)

    @property
    def center_index(self) -> CellIndex:
        # cached lazily; the dataclass is frozen so bypass __setattr__
        idx = self.__dict__.get("_center_index")
        if idx is None:
            idx = CellIndex(self.centers, self.radius, origin=self.domain.lower)
            object.__setattr__(self, "_center_index", idx)
        return idx

    def patches_near(self, x, radius=None):
        """Pairs ``(query_row, patch_id, distance)`` with the query strictly inside the patch."""
        return self.center_index.query_pairs(x, self.radius if radius is None else radius)


def patches_per_axis(N: int, dim: int = 2) -> int:
    return int(math.floor(N ** (1.0 / dim) / 2.0 + 1e-12))


def build_covering(N: int, domain: Domain | None = None) -> Covering:
    """Uniform grid of ``m^n`` patch centers with ``m = floor(N^(1/n) / 2)``.

    Centers sit at cell midpoints ``(i + 0.5) / m`` of the box and the common
    radius is ``sqrt(2) / m`` times the longest box edge, i.e. ``sqrt(2 / M)``
    on the unit square.
    """
    domain = domain or Domain()
    if N < 4:
        raise InputDomainError(f"need N >= 4 data points to build a covering, got {N}")
    m = patches_per_axis(N, domain.dim)
    if m < 1:
        raise InputDomainError(f"N = {N} gives no patches in dimension {domain.dim}")
    axes = [lo + (np.arange(m) + 0.5) / m * (hi - lo) for lo, hi in zip(domain.lower, domain.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([g.ravel() for g in mesh], axis=1)
    radius = math.sqrt(2.0) / m * domain.edge
    return Covering(centers, radius, domain)


def assign_points(covering: Covering, X) -> Covering:
    """Fill ``members[j] = {i : |x_i - center_j| < radius}`` using cells of side ``radius``."""
    X = as_points(X)
    index = CellIndex(X, covering.radius, origin=covering.domain.lower)
    rows, ids, _ = index.query_pairs(covering.centers, covering.radius)
    split = np.searchsorted(rows, np.arange(1, covering.M))
    members = tuple(np.split(ids, split))
    seen = np.zeros(len(X), dtype=bool)
    seen[ids] = True
    if not seen.all():
        bad = int(np.flatnonzero(~seen)[0])
        raise CoveringError(
            f"data point {bad} at {X[bad].tolist()} lies in no patch "
            f"({int((~seen).sum())} uncovered in total)",
            point_index=bad,
        )
    return replace(covering, members=members, points=X)


@dataclass(frozen=True)
class FillDistance:
    value: float
    sample_size: int


def default_probe(X, domain: Domain | None = None, factor: int = 4) -> np.ndarray:
    """Probe grid ``factor`` times finer per axis than the data resolution."""
    X = as_points(X)
    domain = domain or Domain.unit(X.shape[1])
    per_axis = max(2, math.ceil(len(X) ** (1.0 / X.shape[1]) - 1e-9))
    return domain.grid(factor * (per_axis - 1) + 1)


def fill_distance(X, probe=None, domain: Domain | None = None) -> FillDistance:
    """Largest distance from a probe point to its nearest data site.

    With ``probe=None`` a grid four times finer than the data is used.
    """
    X = as_points(X)
    if len(X) == 0:
        raise InputDomainError("fill distance needs a nonempty data set")
    probe = default_probe(X, domain) if probe is None else as_points(probe)
    if len(probe) == 0:
        raise InputDomainError("fill distance needs a nonempty probe set")
    lo = np.minimum(X.min(axis=0), probe.min(axis=0))
    hi = np.maximum(X.max(axis=0), probe.max(axis=0))
    volume = float(np.prod(np.maximum(hi - lo, 1e-300)))
    cell = max((volume / len(X)) ** (1.0 / X.shape[1]), 1e-12)
    _, d = CellIndex(X, cell, origin=lo).nearest(probe)
    d = np.where(d < 1e-15, 0.0, d)
    return FillDistance(float(d.max()), len(probe))
