"""Random parent links between grid levels, the cubes they generate, and checks.

Each point of a fine grid is linked to one point of the next coarser grid: the
unique coarser point within a quarter of the coarse scale when one exists,
otherwise a uniformly random choice among coarser points within three times
the coarse scale.  The cube of a coarse point is the union, over all of its
descendants z at finer levels l, of the open balls B(z, scale(l)/100)
intersected with the space.

On a finite space closures are trivial, so covering statements are checked as
plain covers and the "interior" of a cube is the space minus all sibling
cubes' member sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CoverViolation,
    HypothesesNotMet,
    InvalidParams,
    NoCandidateParent,
    TooLargeForExhaustive,
    UnknownCenter,
)
from .grids import Grid, GridHierarchy, enumerate_maximal_separated, finest_level
from .metric import FiniteMetricSpace, set_distance

__all__ = [
    "Cube",
    "TildeCube",
    "LatticeForest",
    "assign_parents",
    "build_forest",
    "build_cubes",
    "tilde_cube",
    "check_grid_cover",
    "check_cube_cover",
    "check_forest_invariants",
    "verify_chain_separation",
    "scan_chain_separation",
    "enumerate_forest_outcomes",
    "forest_to_json",
    "cube_to_json",
]

BALL_DIVISOR = 100          # descendant ball radius = scale / 100
CAPTURE_DIVISOR = 4         # deterministic link radius = coarse scale / 4
CANDIDATE_FACTOR = 3        # random link radius = 3 * coarse scale
DIAMETER_FACTOR = 21.0      # asserted cube diameter bound, in units of the scale
ANCESTOR_FACTOR = 10.0      # asserted ancestor proximity bound
COVER_FACTOR = 3.0          # asserted grid covering radius


@dataclass(frozen=True)
class Cube:
    """Region of one grid point: union of its descendants' small balls."""
    center: int
    level: int
    scale: float
    members: frozenset[int]


@dataclass(frozen=True)
class TildeCube:
    """Cube interior on a finite space: everything outside all sibling cubes."""
    center: int
    level: int
    members: frozenset[int]


@dataclass(frozen=True)
class LatticeForest:
    """A hierarchy together with one sampled parent map per consecutive level pair.

    ``parents[l]`` maps every member of the level-l grid to its parent in the
    level-(l-1) grid, for every level l above the coarsest.  ``seed`` records
    the seed used to draw the forest when one was given.
    """
    hierarchy: GridHierarchy
    parents: Mapping[int, Mapping[int, int]]
    seed: object = None

    @property
    def space(self) -> FiniteMetricSpace:
        return self.hierarchy.space

    @property
    def delta(self) -> float:
        return self.hierarchy.delta

    @property
    def levels(self) -> tuple[int, ...]:
        return self.hierarchy.levels

    def parent(self, level: int, point: int) -> int:
        return self.parents[level][point]

    def ancestor(self, point: int, from_level: int, to_level: int) -> int:
        """Walk the parent chain from ``from_level`` down to ``to_level``."""
        if to_level > from_level:
            raise InvalidParams("ancestor level must be at most the point's level")
        p = point
        for lev in range(from_level, to_level, -1):
            p = self.parents[lev][p]
        return p

    def ancestor_map(self, fine_level: int, coarse_level: int) -> dict[int, int]:
        """Level-``coarse_level`` ancestor of every member of the fine grid."""
        anc = {p: p for p in self.hierarchy.grid(coarse_level).members}
        for lev in range(coarse_level + 1, fine_level + 1):
            anc = {c: anc[self.parents[lev][c]]
                   for c in self.hierarchy.grid(lev).members}
        return anc

    def chain(self, point: int, from_level: int, to_level: int) -> list[int]:
        """Ancestors [point, parent, ...] from fine to coarse, inclusive."""
        out = [point]
        p = point
        for lev in range(from_level, to_level, -1):
            p = self.parents[lev][p]
            out.append(p)
        return out


def _parent_options(space: FiniteMetricSpace, child: int, parents: Grid) -> list[int]:
    """Possible parents of a child: the captured one, or all within reach."""
    scale = parents.scale
    members = sorted(parents.members)
    captured = [p for p in members if space.d[child, p] <= scale / CAPTURE_DIVISOR]
    if len(captured) > 1:
        # impossible for a valid grid: two such parents would be within scale/2
        raise InvalidParams(
            f"grid at scale {scale} has two points within {scale / CAPTURE_DIVISOR} "
            f"of child {child}")
    if captured:
        return captured
    cands = [p for p in members if space.d[child, p] <= CANDIDATE_FACTOR * scale]
    if not cands:
        raise NoCandidateParent(
            f"child {child} has no parent within {CANDIDATE_FACTOR * scale}")
    return cands


def assign_parents(space: FiniteMetricSpace, children: Grid, parents: Grid,
                   rng: np.random.Generator | int | None) -> dict[int, int]:
    """Link every child to one parent; random choices are uniform and independent.

    Children are processed in index order, consuming one draw per child that
    is not captured, so the map is deterministic for a fixed generator state.
    """
    if not parents.members <= children.members:
        raise InvalidParams("parent grid must be a subset of the child grid")
    rng = np.random.default_rng(rng)
    out: dict[int, int] = {}
    for child in sorted(children.members):
        options = _parent_options(space, child, parents)
        if len(options) == 1:
            out[child] = options[0]
        else:
            out[child] = options[int(rng.integers(len(options)))]
    return out


def build_forest(hierarchy: GridHierarchy,
                 rng: np.random.Generator | int | None) -> LatticeForest:
    """Assign parents between every consecutive pair of levels, coarse to fine."""
    seed = rng if isinstance(rng, int) else None
    rng = np.random.default_rng(rng)
    parents: dict[int, dict[int, int]] = {}
    levels = hierarchy.levels
    for lev in levels[1:]:
        parents[lev] = assign_parents(
            hierarchy.space, hierarchy.grid(lev), hierarchy.grid(lev - 1), rng)
    return LatticeForest(hierarchy=hierarchy, parents=parents, seed=seed)


def build_cubes(forest: LatticeForest, level: int) -> list[Cube]:
    """One cube per grid point of the level, per the descendant-ball definition."""
    h = forest.hierarchy
    if level not in h.levels:
        raise InvalidParams(f"level {level} not present in the hierarchy")
    space = h.space
    members: dict[int, set[int]] = {y: set() for y in h.grid(level).members}
    anc = {p: p for p in h.grid(level).members}
    for lev in range(level, h.finest_level + 1):
        if lev > level:
            anc = {c: anc[forest.parents[lev][c]] for c in h.grid(lev).members}
        radius = h.scale(lev) / BALL_DIVISOR
        for z in h.grid(lev).members:
            inside = np.flatnonzero(space.d[z] < radius)
            members[anc[z]].update(int(i) for i in inside)
    return [Cube(center=y, level=level, scale=h.scale(level),
                 members=frozenset(members[y]))
            for y in sorted(members)]


def tilde_cube(space: FiniteMetricSpace, cubes: Sequence[Cube], center: int) -> TildeCube:
    """Space minus all other cubes of the level (closures are trivial here)."""
    centers = {c.center for c in cubes}
    if center not in centers:
        raise UnknownCenter(f"no cube centered at {center}")
    others: set[int] = set()
    level = None
    for c in cubes:
        level = c.level
        if c.center != center:
            others |= c.members
    return TildeCube(center=center, level=level,
                     members=frozenset(range(len(space))) - others)


# --- covering and structural checks -------------------------------------------


@dataclass(frozen=True)
class GridCoverReport:
    level: int
    max_distance: float
    bound: float            # asserted: 3 * scale
    sharp_bound: float      # scale / (1 - delta), from the telescoping argument
    worst_point: int
    sharp_ok: bool


def check_grid_cover(hierarchy: GridHierarchy, level: int) -> GridCoverReport:
    """Every point must lie within 3 * scale (closed) of the level's grid."""
    if level not in hierarchy.levels:
        raise InvalidParams(f"level {level} not present")
    space = hierarchy.space
    members = sorted(hierarchy.grid(level).members)
    dist = space.d[:, members].min(axis=1)
    worst = int(dist.argmax())
    scale = hierarchy.scale(level)
    bound = COVER_FACTOR * scale
    if dist[worst] > bound:
        raise CoverViolation(
            f"point {worst} is {dist[worst]} from the level-{level} grid "
            f"(> {bound})", witness=worst)
    sharp = scale / (1.0 - hierarchy.delta)
    return GridCoverReport(level=level, max_distance=float(dist[worst]),
                           bound=bound, sharp_bound=sharp, worst_point=worst,
                           sharp_ok=bool(dist[worst] <= sharp))


@dataclass(frozen=True)
class CubeCoverReport:
    level: int
    witness: dict[int, int]  # point -> covering cube center
    multi_covered: tuple[int, ...]


def check_cube_cover(forest: LatticeForest, level: int) -> CubeCoverReport:
    """Every point must belong to at least one cube of the level."""
    cubes = build_cubes(forest, level)
    witness: dict[int, int] = {}
    counts: dict[int, int] = {}
    for cube in cubes:
        for x in cube.members:
            witness.setdefault(x, cube.center)
            counts[x] = counts.get(x, 0) + 1
    missing = [x for x in range(len(forest.space)) if x not in witness]
    if missing:
        raise CoverViolation(
            f"point {missing[0]} is in no level-{level} cube", witness=missing[0])
    multi = tuple(sorted(x for x, c in counts.items() if c > 1))
    return CubeCoverReport(level=level, witness=witness, multi_covered=multi)


@dataclass
class ForestInvariantReport:
    violations: list[str] = field(default_factory=list)
    max_ancestor_ratio: float = 0.0   # dist(z, ancestor) / scale(ancestor level)
    max_diameter_ratio: float = 0.0   # cube diameter / scale
    checked_links: int = 0
    checked_cubes: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_forest_invariants(forest: LatticeForest) -> ForestInvariantReport:
    """Parent uniqueness, ancestor proximity, cube nesting, and diameter bounds."""
    h = forest.hierarchy
    space = h.space
    rep = ForestInvariantReport()

    # no child may see two coarser points within the capture radius
    for lev in h.levels[1:]:
        coarse = sorted(h.grid(lev - 1).members)
        radius = h.scale(lev - 1) / CAPTURE_DIVISOR
        for child in h.grid(lev).members:
            close = [p for p in coarse if space.d[child, p] <= radius]
            if len(close) > 1:
                rep.violations.append(
                    f"child {child} at level {lev} captured by {close}")

    # every descendant stays within 10x the ancestor's scale
    for k in h.levels:
        scale = h.scale(k)
        for lev in range(k + 1, h.finest_level + 1):
            anc = forest.ancestor_map(lev, k)
            for z, a in anc.items():
                ratio = space.d[z, a] / scale
                rep.max_ancestor_ratio = max(rep.max_ancestor_ratio, ratio)
                rep.checked_links += 1
                if space.d[z, a] > ANCESTOR_FACTOR * scale:
                    rep.violations.append(
                        f"descendant {z} (level {lev}) is {space.d[z, a]} from "
                        f"ancestor {a} (level {k})")

    # child cubes nest inside their parent's cube; diameters stay bounded
    cubes_at = {k: build_cubes(forest, k) for k in h.levels}
    for k in h.levels:
        for cube in cubes_at[k]:
            rep.checked_cubes += 1
            if cube.center not in cube.members:
                rep.violations.append(f"cube {cube.center}@{k} misses its center")
            if cube.members:
                idx = sorted(cube.members)
                diam = float(space.d[np.ix_(idx, idx)].max())
                ratio = diam / cube.scale
                rep.max_diameter_ratio = max(rep.max_diameter_ratio, ratio)
                if diam > DIAMETER_FACTOR * cube.scale:
                    rep.violations.append(
                        f"cube {cube.center}@{k} has diameter {diam} "
                        f"> {DIAMETER_FACTOR} * {cube.scale}")
    for lev in h.levels[1:]:
        parent_cubes = {c.center: c for c in cubes_at[lev - 1]}
        for cube in cubes_at[lev]:
            up = parent_cubes[forest.parents[lev][cube.center]]
            if not cube.members <= up.members:
                rep.violations.append(
                    f"cube {cube.center}@{lev} not nested in parent "
                    f"{up.center}@{lev - 1}")
    return rep


# --- chain separation -----------------------------------------------------------

def _other_cube_union(cubes: Sequence[Cube], center: int) -> frozenset[int]:
    out: set[int] = set()
    for c in cubes:
        if c.center != center:
            out |= c.members
    return frozenset(out)


def verify_chain_separation(forest: LatticeForest, x: int, chain: Sequence[int],
                            base_level: int, eps: float,
                            cubes_cache: dict | None = None) -> bool:
    """Check pairwise separation along a parent chain under the boundary hypotheses.

    ``chain`` lists points from the finest level ``base_level + len(chain) - 1``
    down to ``base_level``, one per level.  Hypotheses: the hierarchy scale
    ratio is at most 1/1000, delta**m >= 100*eps for the chain span m, x lies
    in the finest chain point's cube, and x lies in some level-``base_level``
    cube whose interior boundary is closer to x than eps * scale.  When they
    fail, HypothesesNotMet is raised (a vacuous case, not a verdict).

    Returns True iff every pair (z_i at level i, z_j at level j < i) in the
    chain satisfies dist(z_i, z_j) >= scale(j) / 100.
    """
    h = forest.hierarchy
    delta = h.delta
    m = len(chain) - 1
    top_level = base_level + m
    if m < 0 or top_level not in h.levels or base_level not in h.levels:
        raise InvalidParams("chain levels must lie inside the hierarchy")
    if delta > 1.0 / 1000.0:
        raise HypothesesNotMet(f"scale ratio {delta} exceeds 1/1000")
    if eps <= 0 or delta ** m < 100.0 * eps:
        raise HypothesesNotMet(f"need delta**m >= 100*eps, got {delta**m} < {100*eps}")

    def cubes(level: int) -> list[Cube]:
        if cubes_cache is not None:
            if level not in cubes_cache:
                cubes_cache[level] = build_cubes(forest, level)
            return cubes_cache[level]
        return build_cubes(forest, level)

    top_cubes = {c.center: c for c in cubes(top_level)}
    if chain[0] not in top_cubes or x not in top_cubes[chain[0]].members:
        raise HypothesesNotMet(
            f"point {x} not in the cube of {chain[0]} at level {top_level}")
    base_cubes = cubes(base_level)
    scale_k = h.scale(base_level)
    hypothesis = False
    for cube in base_cubes:
        if x not in cube.members:
            continue
        rival = _other_cube_union(base_cubes, cube.center)
        if set_distance(forest.space, [x], rival) < eps * scale_k:
            hypothesis = True
            break
    if not hypothesis:
        raise HypothesesNotMet(
            f"point {x} is not within eps*scale of any rival cube at level {base_level}")

    for j_off in range(m + 1):
        for i_off in range(j_off):
            # chain[i_off] sits at the finer level, chain[j_off] at the coarser
            level_j = top_level - j_off
            threshold = h.scale(level_j) / 100.0
            if forest.space.d[chain[i_off], chain[j_off]] < threshold:
                return False
    return True


@dataclass
class ChainScanReport:
    verified: int = 0
    vacuous: int = 0
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def scan_chain_separation(forest: LatticeForest) -> ChainScanReport:
    """Exhaustively test every chain whose boundary hypotheses can be met.

    For each base level k and span m >= 1 the widest admissible layer width
    eps = delta**m / 100 is used; a point activates the hypotheses exactly
    when some rival cube at level k comes within eps * scale(k) of it.
    """
    h = forest.hierarchy
    rep = ChainScanReport()
    if h.delta > 1.0 / 1000.0:
        return rep  # hypotheses are never met at this scale ratio
    space = forest.space
    cubes_at = {k: build_cubes(forest, k) for k in h.levels}
    containing = {
        k: {x: [c for c in cubes_at[k] if x in c.members]
            for x in range(len(space))}
        for k in h.levels
    }
    for base_level in h.levels:
        scale_k = h.scale(base_level)
        base_cubes = cubes_at[base_level]
        # distance from each member of a cube to the union of the other cubes
        depth: dict[int, float] = {}
        for cube in base_cubes:
            rival = sorted(_other_cube_union(base_cubes, cube.center))
            members = sorted(cube.members)
            if rival:
                mins = space.d[np.ix_(members, rival)].min(axis=1)
            else:
                mins = np.full(len(members), np.inf)
            for x, dist in zip(members, mins):
                depth[x] = min(depth.get(x, np.inf), float(dist))
        for m in range(1, h.finest_level - base_level + 1):
            eps = h.delta ** m / 100.0
            top = base_level + m
            anc_chain_cache: dict[int, list[int]] = {}
            for x in range(len(space)):
                if depth.get(x, np.inf) >= eps * scale_k:
                    rep.vacuous += 1
                    continue
                for cube in containing[top][x]:
                    z = cube.center
                    if z not in anc_chain_cache:
                        anc_chain_cache[z] = forest.chain(z, top, base_level)
                    chain = anc_chain_cache[z]
                    rep.verified += 1
                    for j_off in range(m + 1):
                        threshold = h.scale(top - j_off) / 100.0
                        for i_off in range(j_off):
                            if space.d[chain[i_off], chain[j_off]] < threshold:
                                rep.violations.append(
                                    (x, base_level, m, chain[i_off], chain[j_off]))
    return rep


# --- exact enumeration of the whole random construction -------------------------

def enumerate_forest_outcomes(space: FiniteMetricSpace, delta: float,
                              coarsest_level: int,
                              limit: int = 20,
                              max_outcomes: int = 100_000,
                              ) -> list[tuple[LatticeForest, Fraction]]:
    """All (forest, probability) outcomes of the construction on a small space.

    Grid choices are uniform over the maximal-set family at each level
    (conditioned on the finer levels), and parent choices are uniform over the
    candidate lists; probabilities are exact rationals and sum to one.
    """
    m = finest_level(space, delta, coarsest_level)
    levels = tuple(range(coarsest_level, m + 1))
    full = Grid(scale=delta ** m, members=frozenset(range(len(space))))
    grid_outcomes: list[tuple[dict[int, Grid], Fraction]] = [({m: full}, Fraction(1))]
    for k in range(m - 1, coarsest_level - 1, -1):
        nxt = []
        for partial, prob in grid_outcomes:
            options = enumerate_maximal_separated(
                space, sorted(partial[k + 1].members), delta ** k, limit=limit)
            for g in options:
                grids = dict(partial)
                grids[k] = g
                nxt.append((grids, prob / len(options)))
        grid_outcomes = nxt
        if len(grid_outcomes) > max_outcomes:
            raise TooLargeForExhaustive("too many grid outcomes")

    results: list[tuple[LatticeForest, Fraction]] = []
    for grids, prob in grid_outcomes:
        hierarchy = GridHierarchy(space=space, delta=delta, levels=levels, grids=grids)
        partial_parents: list[tuple[dict[int, dict[int, int]], Fraction]] = [({}, prob)]
        for lev in levels[1:]:
            children = sorted(grids[lev].members)
            per_child = [(c, _parent_options(space, c, grids[lev - 1]))
                         for c in children]
            nxt = []
            for pmap, p in partial_parents:
                combos: list[tuple[dict[int, int], Fraction]] = [({}, p)]
                for child, options in per_child:
                    combos = [
                        ({**cmap, child: opt}, cp / len(options))
                        for cmap, cp in combos for opt in options
                    ]
                    if len(combos) * len(partial_parents) > max_outcomes:
                        raise TooLargeForExhaustive("too many parent outcomes")
                for cmap, cp in combos:
                    nxt.append(({**pmap, lev: cmap}, cp))
            partial_parents = nxt
        for pmap, p in partial_parents:
            results.append((LatticeForest(hierarchy=hierarchy, parents=pmap), p))
    return results


# --- serialization --------------------------------------------------------------

def cube_to_json(space: FiniteMetricSpace, cube: Cube) -> dict:
    return {
        "center": space.name(cube.center),
        "level": cube.level,
        "scale": cube.scale,
        "members": [space.name(i) for i in sorted(cube.members)],
    }


def forest_to_json(forest: LatticeForest) -> dict:
    space = forest.space
    edges = []
    for lev in forest.levels[1:]:
        for child, parent in sorted(forest.parents[lev].items()):
            edges.append({"level": lev, "child": space.name(child),
                          "parent": space.name(parent)})
    return {
        "delta": forest.delta,
        "levels": list(forest.levels),
        "edges": edges,
        "seed": forest.seed,
    }
