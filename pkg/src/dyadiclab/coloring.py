"""Exhaustive red/green colorings at unit scale and the recoloring injection.

A coloring is proper when red points are pairwise at distance >= 1 and every
green point has a red point strictly within distance 1; the red set is then a
maximal 1-separated subset.  All probabilities here are exact rationals over
the complete enumeration; nothing in this module is sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    InjectivityViolation,
    InvalidParams,
    PreconditionNotWS,
    TooLargeForExhaustive,
)
from .grids import DEFAULT_EXHAUSTIVE_LIMIT, enumerate_maximal_separated
from .metric import FiniteMetricSpace, ball, make_space, max_ball_occupancy

__all__ = [
    "ProperColoring",
    "ColoringUniverse",
    "is_proper",
    "enumerate_proper_colorings",
    "membership_probability",
    "close_membership_probability",
    "recolor",
    "verify_recoloring_injective",
    "RecoloringReport",
    "tree_experiment",
]


@dataclass(frozen=True)
class ProperColoring:
    """Red point set of one proper coloring; everything else is green."""
    red: frozenset[int]
    n_points: int

    def green(self) -> frozenset[int]:
        return frozenset(range(self.n_points)) - self.red

    def color_of(self, point: int) -> str:
        return "red" if point in self.red else "green"


@dataclass(frozen=True)
class ColoringUniverse:
    """Complete list of proper colorings of a space, at unit threshold."""
    space: FiniteMetricSpace
    colorings: tuple[ProperColoring, ...]
    d: int  # largest open-unit-ball occupancy

    def __len__(self) -> int:
        return len(self.colorings)


def is_proper(space: FiniteMetricSpace, red: Iterable[int]) -> bool:
    """Check both coloring conditions directly from the definition."""
    red = set(red)
    n = len(space)
    for a in red:
        for b in red:
            if a != b and space.d[a, b] < 1.0:
                return False
    for g in set(range(n)) - red:
        if not any(space.d[g, r] < 1.0 for r in red):
            return False
    return True


def enumerate_proper_colorings(space: FiniteMetricSpace,
                               limit: int = DEFAULT_EXHAUSTIVE_LIMIT) -> ColoringUniverse:
    """All proper colorings; red sets are exactly the maximal 1-separated subsets."""
    grids = enumerate_maximal_separated(space, range(len(space)), 1.0, limit=limit)
    colorings = tuple(ProperColoring(red=g.members, n_points=len(space)) for g in grids)
    return ColoringUniverse(space=space, colorings=colorings,
                            d=max_ball_occupancy(space, 1.0))


def membership_probability(universe: ColoringUniverse, v: int | str) -> Fraction:
    """Exact probability that a point is red under a uniform proper coloring."""
    v = universe.space.resolve(v)
    hits = sum(1 for c in universe.colorings if v in c.red)
    return Fraction(hits, len(universe.colorings))


def close_membership_probability(universe: ColoringUniverse, v: int | str,
                                 tol: float) -> Fraction:
    """Probability that some red point lies strictly within ``tol`` of v.

    With ``tol`` below the minimum pairwise distance this reduces to
    membership of v itself; it is never smaller than the membership
    probability.
    """
    v = universe.space.resolve(v)
    d = universe.space.d
    hits = sum(1 for c in universe.colorings
               if any(d[v, r] < tol for r in c.red))
    return Fraction(hits, len(universe.colorings))


def _tilde_set(space: FiniteMetricSpace, ball_v: frozenset[int],
               subset_s: frozenset[int]) -> frozenset[int]:
    """Points outside the unit ball of v but within distance < 1 of the set S."""
    out = set()
    for y in range(len(space)):
        if y in ball_v:
            continue
        if any(space.d[y, s] < 1.0 for s in subset_s):
            out.add(y)
    return frozenset(out)


def recolor(universe: ColoringUniverse, coloring: ProperColoring, v: int | str,
            subset_s: Iterable[int]) -> ProperColoring:
    """Turn a coloring with v green into one with v red, by the six-step procedure.

    Requires the input to lie in the class of S: v green, S red, and the rest
    of the open unit ball of v green.  Steps: recolor v red and S green; among
    the points outside the ball that had a red neighbor in S, mark as yellow
    those whose whole open unit ball is now green; scan the yellow points in
    ascending index order, recoloring each to red unless it is within distance
    < 1 of an already recolored one; remaining yellow points stay green.
    """
    space = universe.space
    v = space.resolve(v)
    s_set = frozenset(space.resolve(p) for p in subset_s)
    ball_v = ball(space, v, 1.0, mode="open")

    if not s_set <= ball_v - {v}:
        raise PreconditionNotWS("S must be a subset of the open unit ball minus v")
    if v in coloring.red:
        raise PreconditionNotWS("v must be green in the input coloring")
    if not s_set <= coloring.red:
        raise PreconditionNotWS("every point of S must be red in the input")
    if (ball_v - {v} - s_set) & coloring.red:
        raise PreconditionNotWS("the rest of the unit ball of v must be green")

    tilde = _tilde_set(space, ball_v, s_set)
    red = (set(coloring.red) - s_set) | {v}
    yellow = [y for y in sorted(tilde)
              if not any(space.d[y, r] < 1.0 for r in red)]
    recolored: list[int] = []
    for y in yellow:
        if all(space.d[y, z] >= 1.0 for z in recolored):
            recolored.append(y)
    red.update(recolored)
    return ProperColoring(red=frozenset(red), n_points=len(space))


@dataclass
class RecoloringReport:
    v: int
    card_b: int
    class_sizes: dict[frozenset, int] = field(default_factory=dict)
    checked: int = 0
    improper_outputs: list[frozenset] = field(default_factory=list)
    touched_outside: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.improper_outputs and not self.touched_outside


def verify_recoloring_injective(universe: ColoringUniverse,
                                v: int | str) -> RecoloringReport:
    """Apply the recoloring to every coloring of every class of v and check it.

    Asserts injectivity within each class (raising InjectivityViolation with
    the witness pair on failure) and card W_S <= card B for every class;
    records, rather than repairing, any improper output or any color change
    outside the unit ball of v and the shadow of S.
    """
    space = universe.space
    v = space.resolve(v)
    ball_v = ball(space, v, 1.0, mode="open")
    b_class = [c for c in universe.colorings if v in c.red]
    rep = RecoloringReport(v=v, card_b=len(b_class))

    classes: dict[frozenset, list[ProperColoring]] = {}
    for col in universe.colorings:
        if v in col.red:
            continue
        s_set = frozenset(col.red & (ball_v - {v}))
        classes.setdefault(s_set, []).append(col)

    for s_set, members in sorted(classes.items(), key=lambda kv: sorted(kv[0])):
        rep.class_sizes[s_set] = len(members)
        if len(members) > rep.card_b:
            raise InjectivityViolation(
                f"class of S={sorted(s_set)} has {len(members)} colorings "
                f"but only {rep.card_b} have v red")
        tilde = _tilde_set(space, ball_v, s_set)
        allowed = ball_v | tilde
        seen: dict[frozenset, ProperColoring] = {}
        for col in members:
            out = recolor(universe, col, v, s_set)
            rep.checked += 1
            if v not in out.red:
                rep.improper_outputs.append(out.red)
            elif not is_proper(space, out.red):
                rep.improper_outputs.append(out.red)
            changed = (col.red ^ out.red)
            if not changed <= allowed:
                rep.touched_outside.append((sorted(s_set), sorted(changed - allowed)))
            if out.red in seen:
                raise InjectivityViolation(
                    f"colorings {sorted(seen[out.red].red)} and {sorted(col.red)} "
                    f"in class S={sorted(s_set)} map to the same output",
                    first=seen[out.red], second=col)
            seen[out.red] = col
    return rep


def tree_experiment(branching: int, height: int, vertex: int | str | None = None,
                    limit: int = DEFAULT_EXHAUSTIVE_LIMIT) -> Fraction:
    """Exact probability that a tree vertex joins a uniform maximal 2-separated set.

    The tree has unit edge lengths, so the conflict graph at threshold 2 is
    the tree's own adjacency.  Defaults to the root.
    """
    if branching < 1 or height < 0:
        raise InvalidParams("need branching >= 1 and height >= 0")
    space = make_space("tree", branching=branching, height=height)
    if len(space) > limit:
        # the enumeration below would refuse anyway; fail early with context
        raise TooLargeForExhaustive(
            f"tree with {len(space)} vertices exceeds the exhaustive cap {limit}")
    grids = enumerate_maximal_separated(space, range(len(space)), 2.0, limit=limit)
    v = space.resolve(vertex if vertex is not None else "r")
    hits = sum(1 for g in grids if v in g.members)
    return Fraction(hits, len(grids))
