"""Finite metric spaces: validation, balls, occupancy, doubling bounds, generators.

All geometry in the package runs against a validated distance matrix.  Points
are addressed by integer index; every space also carries a tuple of opaque
string names used for serialization and reports.  Threshold comparisons are
exact floating comparisons with no tolerance: generated test spaces keep every
distance well clear of any decision threshold.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AsymmetricMatrix,
    DuplicatePoint,
    InvalidParams,
    NonzeroDiagonal,
    TriangleViolation,
    UnknownPoint,
)

__all__ = [
    "FiniteMetricSpace",
    "validate_metric",
    "space_from_coords",
    "ball",
    "max_ball_occupancy",
    "set_distance",
    "doubling_estimate",
    "min_cover_doubling",
    "make_space",
    "load_space",
    "save_space",
]


class FiniteMetricSpace:
    """A finite point set with a validated distance matrix.

    Immutable after construction; the matrix is marked read-only, so instances
    are safe for concurrent reads.  Construct through :func:`validate_metric`
    (or the generators below), not directly.
    """

    def __init__(self, points: Sequence[str], d: np.ndarray):
        self.points: tuple[str, ...] = tuple(str(p) for p in points)
        mat = np.array(d, dtype=float)
        mat.setflags(write=False)
        self.d: np.ndarray = mat
        self._index = {name: i for i, name in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={len(self)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownPoint(f"no point named {name!r}") from None

    def resolve(self, point: int | str) -> int:
        """Normalize a point given by index or name to its index."""
        if isinstance(point, str):
            return self.index(point)
        i = int(point)
        if not 0 <= i < len(self):
            raise UnknownPoint(f"index {point} out of range for n={len(self)}")
        return i

    def name(self, i: int) -> str:
        return self.points[i]

    def distance(self, a: int | str, b: int | str) -> float:
        return float(self.d[self.resolve(a), self.resolve(b)])

    @property
    def min_distance(self) -> float:
        """Smallest positive pairwise distance; +inf for a singleton."""
        n = len(self)
        if n < 2:
            return math.inf
        off = self.d[~np.eye(n, dtype=bool)]
        return float(off.min())

    @property
    def diameter(self) -> float:
        return float(self.d.max()) if len(self) else 0.0

    def pairwise_distances(self) -> list[float]:
        """Sorted distinct positive pairwise distances."""
        n = len(self)
        vals = {float(self.d[i, j]) for i in range(n) for j in range(i + 1, n)}
        return sorted(vals)

    def rescale(self, factor: float) -> "FiniteMetricSpace":
        """New space with every distance divided by ``factor``."""
        if factor <= 0:
            raise InvalidParams("rescale factor must be positive")
        return FiniteMetricSpace(self.points, self.d / factor)

    def subspace(self, indices: Iterable[int]) -> "FiniteMetricSpace":
        idx = sorted(self.resolve(i) for i in indices)
        sub = self.d[np.ix_(idx, idx)]
        return FiniteMetricSpace([self.points[i] for i in idx], sub)

    def to_json(self) -> dict:
        return {"points": list(self.points), "dist": self.d.tolist()}


def validate_metric(matrix, points: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Validate a square matrix against the metric axioms.

    Checks, in order: shape, nonnegativity, zero diagonal, symmetry, absence
    of duplicate points, and the triangle inequality.  The first violation
    found is raised with its witness indices; the triangle check reports the
    lexicographically smallest violating triple (i, j, k) with
    dist(i,k) > dist(i,j) + dist(j,k).
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidParams(f"matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if points is None:
        points = [f"p{i}" for i in range(n)]
    if len(points) != n:
        raise InvalidParams("points list length must match the matrix size")
    if len(set(points)) != n:
        raise InvalidParams("point names must be distinct")
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise InvalidParams("distances must be finite and nonnegative")
    for i in range(n):
        if d[i, i] != 0:
            raise NonzeroDiagonal(i, float(d[i, i]))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] != d[j, i]:
                raise AsymmetricMatrix(i, j, float(d[i, j]), float(d[j, i]))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] == 0:
                raise DuplicatePoint(i, j)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # d[i,k] <= d[i,j] + d[j,k] for all k; find smallest violating k
            bad = np.flatnonzero(d[i] > d[i, j] + d[j])
            bad = [k for k in bad if k != i and k != j]
            if bad:
                raise TriangleViolation(i, j, int(bad[0]))
    return FiniteMetricSpace(points, d)


def space_from_coords(coords, names: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Euclidean space on explicit coordinates (one row per point)."""
    pts = np.atleast_2d(np.asarray(coords, dtype=float))
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=-1))
    d = (d + d.T) / 2.0  # exact symmetry despite rounding
    np.fill_diagonal(d, 0.0)
    if names is None:
        names = [f"p{i}" for i in range(len(pts))]
    return validate_metric(d, names)


# --- queries ------------------------------------------------------------------

def ball(space: FiniteMetricSpace, center: int | str, radius: float,
         mode: str = "open") -> frozenset[int]:
    """Members of the ball around ``center``: strict ``<`` (open) or ``<=`` (closed)."""
    c = space.resolve(center)
    if radius < 0:
        raise InvalidParams("radius must be nonnegative")
    row = space.d[c]
    if mode == "open":
        hit = row < radius
    elif mode == "closed":
        hit = row <= radius
    else:
        raise InvalidParams(f"mode must be 'open' or 'closed', got {mode!r}")
    return frozenset(int(i) for i in np.flatnonzero(hit))


def max_ball_occupancy(space: FiniteMetricSpace, radius: float) -> int:
    """Largest number of points in any open ball of the given radius."""
    if radius <= 0:
        raise InvalidParams("radius must be positive")
    counts = (space.d < radius).sum(axis=1)
    return int(counts.max())


def set_distance(space: FiniteMetricSpace, a: Iterable[int], b: Iterable[int]) -> float:
    """Min pairwise distance between two point sets; +inf if either is empty."""
    ia, ib = list(a), list(b)
    if not ia or not ib:
        return math.inf
    return float(space.d[np.ix_(ia, ib)].min())


# --- doubling-type bounds -----------------------------------------------------

def _greedy_cover_count(space: FiniteMetricSpace, target: np.ndarray, r: float) -> int:
    """Greedily cover the target index set with closed r-balls centered at its points."""
    uncovered = set(int(i) for i in target)
    count = 0
    while uncovered:
        # center whose ball covers the most remaining points; ties to lowest index
        best, best_gain = None, -1
        for c in sorted(uncovered):
            gain = sum(1 for x in uncovered if space.d[c, x] <= r)
            if gain > best_gain:
                best, best_gain = c, gain
        uncovered -= {x for x in uncovered if space.d[best, x] <= r}
        count += 1
    return count


def doubling_estimate(space: FiniteMetricSpace) -> int:
    """Upper bound on the doubling constant over the pairwise-distance radius family.

    For every center x and radius r drawn from the pairwise distances, covers
    the closed ball B(x, 2r) greedily by closed r-balls centered at its own
    points, and reports the worst count.  Greedy covering over this finite
    radius family yields a bound, not the exact constant; see
    :func:`min_cover_doubling` for the exact value on small spaces.
    """
    if len(space) <= 1:
        return 1
    worst = 1
    for r in space.pairwise_distances():
        for x in range(len(space)):
            target = np.flatnonzero(space.d[x] <= 2 * r)
            worst = max(worst, _greedy_cover_count(space, target, r))
    return worst


def min_cover_doubling(space: FiniteMetricSpace) -> int:
    """Exact doubling constant over the same radius family, by minimum set cover.

    Exponential in |X|; intended for |X| <= 12 as an oracle for the greedy bound.
    """
    n = len(space)
    if n <= 1:
        return 1
    if n > 12:
        raise InvalidParams("exact covering is limited to |X| <= 12")
    worst = 1
    for r in space.pairwise_distances():
        for x in range(n):
            target = frozenset(int(i) for i in np.flatnonzero(space.d[x] <= 2 * r))
            balls = {c: frozenset(int(i) for i in np.flatnonzero(space.d[c] <= r))
                     for c in target}
            found = None
            for size in range(1, len(target) + 1):
                for centers in itertools.combinations(sorted(target), size):
                    covered = frozenset().union(*(balls[c] for c in centers))
                    if target <= covered:
                        found = size
                        break
                if found is not None:
                    break
            worst = max(worst, found)
    return worst


# --- generators -----------------------------------------------------------------

def _tree_space(branching: int, height: int) -> FiniteMetricSpace:
    """Rooted tree with unit edges; distance is the shortest path through the LCA."""
    if branching < 1 or height < 0:
        raise InvalidParams("tree needs branching >= 1 and height >= 0")
    paths: list[tuple[int, ...]] = [()]
    frontier = [()]
    for _ in range(height):
        nxt = []
        for p in frontier:
            for c in range(branching):
                nxt.append(p + (c,))
        paths.extend(nxt)
        frontier = nxt
    n = len(paths)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = paths[i], paths[j]
            lca = 0
            for x, y in zip(a, b):
                if x != y:
                    break
                lca += 1
            d[i, j] = d[j, i] = (len(a) - lca) + (len(b) - lca)
    names = ["r" + "".join(f".{c}" for c in p) for p in paths]
    return FiniteMetricSpace(names, d)


def _grid_space(shape: Sequence[int], spacing: float = 1.0) -> FiniteMetricSpace:
    if not shape or any(s < 1 for s in shape):
        raise InvalidParams("grid shape must have positive extents")
    axes = [np.arange(s) for s in shape]
    coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(shape))
    return space_from_coords(coords * float(spacing))


def _cloud_space(rng: np.random.Generator, n: int, dim: int, scale: float,
                 min_sep: float, levels: int, branching: int, ratio: float,
                 spread: tuple[float, float]) -> FiniteMetricSpace:
    if n < 1 or dim < 1:
        raise InvalidParams("cloud needs n >= 1 and dim >= 1")
    for _ in range(200):
        if levels <= 0:
            pts = rng.uniform(0.0, scale, size=(n, dim))
        else:
            # hierarchical cascade: each level splits every center into
            # `branching` children offset by ~spread * scale * ratio^level
            centers = np.zeros((1, dim))
            for lev in range(1, levels + 1):
                step = scale * ratio ** (lev - 1)
                new = []
                for c in centers:
                    for _ in range(branching):
                        direction = rng.normal(size=dim)
                        direction /= np.linalg.norm(direction)
                        mag = rng.uniform(spread[0], spread[1]) * step
                        new.append(c + mag * direction)
                centers = np.asarray(new)
            if n > len(centers):
                raise InvalidParams(
                    f"cascade with branching={branching}, levels={levels} "
                    f"yields only {len(centers)} points, need {n}")
            pick = rng.permutation(len(centers))[:n]
            pts = centers[np.sort(pick)]
        if dim == 1:
            # exactly collinear points can break the exact triangle check
            # through rounding; a gentle parabola keeps strict real margins
            pts = np.column_stack([pts[:, 0], 0.05 * pts[:, 0] ** 2 / scale])
        space = space_from_coords(pts)
        if space.min_distance > min_sep:
            return space
    raise InvalidParams("could not satisfy min_sep after 200 attempts")


def _snowflake(base: FiniteMetricSpace, alpha: float) -> FiniteMetricSpace:
    if not 0 < alpha <= 1:
        raise InvalidParams("snowflake exponent must lie in (0, 1]")
    return FiniteMetricSpace(base.points, base.d ** alpha)


def make_space(kind: str, seed: int | None = None, **params) -> FiniteMetricSpace:
    """Generate a test space: ``tree``, ``grid_points``, ``random_cloud``, or ``snowflake``.

    tree:          branching, height  (unit edge lengths)
    grid_points:   shape (tuple of extents), spacing
    random_cloud:  n, dim, scale, min_sep, and optionally levels/branching/ratio/spread
                   for a hierarchical cascade cloud; requires a seed
    snowflake:     base (a FiniteMetricSpace), alpha in (0, 1]

    Deterministic for a fixed seed.
    """
    try:
        if kind == "tree":
            return _tree_space(int(params.pop("branching")), int(params.pop("height")))
        if kind == "grid_points":
            return _grid_space(params.pop("shape"), params.pop("spacing", 1.0))
        if kind == "random_cloud":
            if seed is None:
                raise InvalidParams("random_cloud requires a seed")
            rng = np.random.default_rng(seed)
            return _cloud_space(
                rng,
                n=int(params.pop("n")),
                dim=int(params.pop("dim", 2)),
                scale=float(params.pop("scale", 1.0)),
                min_sep=float(params.pop("min_sep", 0.0)),
                levels=int(params.pop("levels", 0)),
                branching=int(params.pop("branching", 3)),
                ratio=float(params.pop("ratio", 0.1)),
                spread=tuple(params.pop("spread", (0.25, 0.45))),
            )
        if kind == "snowflake":
            return _snowflake(params.pop("base"), float(params.pop("alpha")))
    except KeyError as exc:
        raise InvalidParams(f"missing parameter {exc} for kind {kind!r}") from None
    raise InvalidParams(f"unknown space kind {kind!r}")


# --- input / output -------------------------------------------------------------

def load_space(path: str) -> FiniteMetricSpace:
    """Load a space from JSON ({"points", "dist"}) or a CSV of coordinates.

    CSV rows are coordinate vectors; an optional leading non-numeric field per
    row names the point, and a non-numeric first row is treated as a header.
    """
    if str(path).endswith(".json"):
        with open(path) as fh:
            payload = json.load(fh)
        return validate_metric(payload["dist"], payload.get("points"))
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append(row)
    if not rows:
        raise InvalidParams(f"no rows in {path}")

    def _numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    if not all(_numeric(c) for c in rows[0]):
        rows = rows[1:]
    names, coords = [], []
    for i, row in enumerate(rows):
        if _numeric(row[0]):
            names.append(f"p{i}")
            coords.append([float(c) for c in row])
        else:
            names.append(row[0])
            coords.append([float(c) for c in row[1:]])
    return space_from_coords(coords, names)


def save_space(space: FiniteMetricSpace, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(space.to_json(), fh, sort_keys=True)
        fh.write("\n")
