"""Maximal separated subsets (k-grids) and nested random grid hierarchies.

A k-grid of a base set is a maximal subset whose points are pairwise at
distance >= k; equivalently a maximal independent set of the conflict graph
with an edge between any two base points at distance < k.  Enumeration and
uniform sampling factor over connected components of that graph: a subset is
maximal exactly when its restriction to every component is, so the family of
grids is the product of the per-component families and per-component uniform
choices compose to a uniform choice overall.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidParams, TooLargeForExhaustive
from .metric import FiniteMetricSpace

__all__ = [
    "Grid",
    "GridHierarchy",
    "DEFAULT_EXHAUSTIVE_LIMIT",
    "greedy_grid",
    "is_maximal_separated",
    "enumerate_maximal_separated",
    "sample_maximal_separated",
    "build_nested_grids",
    "finest_level",
    "grid_to_json",
    "hierarchy_to_json",
]

DEFAULT_EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class Grid:
    """A maximal `scale`-separated subset of some base point set."""
    scale: float
    members: frozenset[int]

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class GridHierarchy:
    """Nested grids G_coarsest <= ... <= G_finest with scale delta**level.

    ``levels`` is ascending, so coarser grids come first and each grid is a
    maximal subset of the next (finer) one.  The finest grid is the whole
    space.
    """
    space: FiniteMetricSpace
    delta: float
    levels: tuple[int, ...]
    grids: Mapping[int, Grid]

    @property
    def coarsest_level(self) -> int:
        return self.levels[0]

    @property
    def finest_level(self) -> int:
        return self.levels[-1]

    def grid(self, level: int) -> Grid:
        return self.grids[level]

    def scale(self, level: int) -> float:
        return self.delta ** level


def _conflict_lists(space: FiniteMetricSpace, base: Sequence[int], k: float) -> dict[int, list[int]]:
    """Adjacency of the conflict graph: edges between base points at distance < k."""
    base = sorted(base)
    adj: dict[int, list[int]] = {b: [] for b in base}
    for idx, a in enumerate(base):
        for b in base[idx + 1:]:
            if space.d[a, b] < k:
                adj[a].append(b)
                adj[b].append(a)
    return adj


def _components(adj: dict[int, list[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _component_mis(adj: dict[int, list[int]], comp: list[int]) -> list[frozenset[int]]:
    """All maximal independent sets of one component, in canonical order.

    Bron-Kerbosch with pivoting, run on the complement graph (maximal
    independent sets are exactly the maximal cliques of the complement).
    """
    comp_set = set(comp)
    # complement adjacency: compatible pairs are those at distance >= k
    compat = {u: comp_set - set(adj[u]) - {u} for u in comp}
    out: list[frozenset[int]] = []

    def bk(chosen: set[int], cand: set[int], excl: set[int]) -> None:
        if not cand and not excl:
            out.append(frozenset(chosen))
            return
        pivot = max(cand | excl, key=lambda u: len(compat[u] & cand))
        for v in sorted(cand - compat[pivot]):
            bk(chosen | {v}, cand & compat[v], excl & compat[v])
            cand = cand - {v}
            excl = excl | {v}

    bk(set(), set(comp), set())
    return sorted(out, key=sorted)


def _component_families(space, base, k, limit, cache=None) -> list[list[frozenset[int]]]:
    """Per-component maximal-set families; each component must fit the cap."""
    key = (frozenset(base), float(k))
    if cache is not None and key in cache:
        return cache[key]
    adj = _conflict_lists(space, base, k)
    families = []
    for comp in _components(adj):
        if len(comp) > limit:
            raise TooLargeForExhaustive(
                f"component of size {len(comp)} exceeds the cap {limit}")
        families.append(_component_mis(adj, comp))
    if cache is not None:
        cache[key] = families
    return families


# --- operations ---------------------------------------------------------------

def greedy_grid(space: FiniteMetricSpace, base: Sequence[int], k: float,
                order: Sequence[int]) -> Grid:
    """Scan ``base`` in the given order, admitting points >= k from all admitted."""
    base_set = set(space.resolve(p) for p in base)
    order = [space.resolve(p) for p in order]
    if set(order) != base_set or len(order) != len(base_set):
        raise InvalidParams("order must be a permutation of the base set")
    chosen: list[int] = []
    for p in order:
        if all(space.d[p, q] >= k for q in chosen):
            chosen.append(p)
    return Grid(scale=k, members=frozenset(chosen))


def is_maximal_separated(space: FiniteMetricSpace, base: Sequence[int],
                         subset: Sequence[int], k: float) -> bool:
    """True iff the subset is pairwise >= k and no base point can be added."""
    base_set = {space.resolve(p) for p in base}
    sub = [space.resolve(p) for p in subset]
    if not set(sub) <= base_set:
        raise InvalidParams("subset must be contained in the base set")
    for i, a in enumerate(sub):
        for b in sub[i + 1:]:
            if space.d[a, b] < k:
                return False
    for p in base_set - set(sub):
        if all(space.d[p, q] >= k for q in sub):
            return False
    return True


def enumerate_maximal_separated(space: FiniteMetricSpace, base: Sequence[int],
                                k: float, limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                                cache: dict | None = None) -> list[Grid]:
    """Complete duplicate-free list of maximal k-separated subsets of ``base``."""
    base = sorted(space.resolve(p) for p in base)
    if len(base) > limit:
        raise TooLargeForExhaustive(f"|base|={len(base)} exceeds the cap {limit}")
    families = _component_families(space, base, k, limit, cache)
    combos: list[frozenset[int]] = [frozenset()]
    for fam in families:
        combos = [acc | piece for acc in combos for piece in fam]
    combos.sort(key=sorted)
    return [Grid(scale=k, members=c) for c in combos]


def sample_maximal_separated(space: FiniteMetricSpace, base: Sequence[int], k: float,
                             rng: np.random.Generator,
                             mode: str = "exhaustive_uniform",
                             limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                             cache: dict | None = None) -> Grid:
    """Draw one maximal k-separated subset of ``base``.

    exhaustive_uniform: exactly uniform over all maximal subsets, realized as
    an independent uniform choice per conflict-graph component (the family is
    the product of the component families).  The enumeration cap applies per
    component.

    greedy_permutation: greedy scan of a uniformly random permutation.  Works
    for arbitrarily large bases but its distribution over maximal subsets is
    not uniform; probabilistic verdicts should use exhaustive_uniform.
    """
    base = sorted(space.resolve(p) for p in base)
    if mode == "greedy_permutation":
        order = [base[i] for i in rng.permutation(len(base))]
        return greedy_grid(space, base, k, order)
    if mode != "exhaustive_uniform":
        raise InvalidParams(f"unknown sampling mode {mode!r}")
    families = _component_families(space, base, k, limit, cache)
    members: set[int] = set()
    for fam in families:
        members.update(fam[int(rng.integers(len(fam)))])
    return Grid(scale=k, members=frozenset(members))


def finest_level(space: FiniteMetricSpace, delta: float,
                 coarsest_level: int) -> int:
    """Smallest level M with delta**M below the min pairwise distance.

    At that scale the whole space is the unique maximal grid.  A singleton has
    no constraint and the hierarchy collapses to the coarsest level.
    """
    if not 0 < delta < 1:
        raise InvalidParams("delta must lie in (0, 1)")
    md = space.min_distance
    if md == np.inf:
        return coarsest_level
    # log-based guess, corrected by exact comparison
    import math

    m = int(math.floor(math.log(md) / math.log(delta))) + 1
    while delta ** m >= md:
        m += 1
    while delta ** (m - 1) < md:
        m -= 1
    return m


def build_nested_grids(space: FiniteMetricSpace, delta: float, coarsest_level: int,
                       rng: np.random.Generator | int | None,
                       mode: str = "exhaustive_uniform",
                       limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                       freeze_above: int | None = None,
                       cache: dict | None = None) -> GridHierarchy:
    """Sample a nested hierarchy of grids at scales delta**level.

    The finest level M makes the whole space the (unique) grid; every coarser
    grid is drawn inside the next finer one, independently per level, walking
    from fine to coarse.  ``freeze_above`` optionally pins all levels >= that
    index to the deterministic greedy grid in index order, leaving only the
    coarser choices random.
    """
    if len(space) == 0:
        raise InvalidParams("space must be nonempty")
    rng = np.random.default_rng(rng)
    m = finest_level(space, delta, coarsest_level)
    if coarsest_level > m:
        raise InvalidParams(
            f"coarsest level {coarsest_level} is finer than the finest level {m}")
    levels = list(range(coarsest_level, m + 1))
    grids: dict[int, Grid] = {m: Grid(scale=delta ** m, members=frozenset(range(len(space))))}
    for k in range(m - 1, coarsest_level - 1, -1):
        base = sorted(grids[k + 1].members)
        scale = delta ** k
        if freeze_above is not None and k >= freeze_above:
            grid = greedy_grid(space, base, scale, base)
        else:
            grid = sample_maximal_separated(space, base, scale, rng, mode=mode,
                                            limit=limit, cache=cache)
        grids[k] = grid
    return GridHierarchy(space=space, delta=delta, levels=tuple(levels), grids=grids)


# --- serialization --------------------------------------------------------------

def grid_to_json(space: FiniteMetricSpace, grid: Grid) -> dict:
    return {"scale": grid.scale,
            "members": [space.name(i) for i in grid.sorted_members()]}


def hierarchy_to_json(h: GridHierarchy) -> dict:
    return {
        "delta": h.delta,
        "levels": [
            {"level": k, **grid_to_json(h.space, h.grids[k])} for k in h.levels
        ],
    }
