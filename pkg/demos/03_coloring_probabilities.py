"""Walkthrough: exhaustive colorings, membership probabilities, recoloring.

Run with:  python demos/03_coloring_probabilities.py
"""
from fractions import Fraction

import dyadiclab as dl

l3 = dl.validate_metric([[0.0, 0.5, 1.0],
                         [0.5, 0.0, 0.5],
                         [1.0, 0.5, 0.0]], points=("a", "b", "c"))

print("== every proper coloring of three points on a line ==")
universe = dl.enumerate_proper_colorings(l3)
for coloring in universe.colorings:
    print("red set:", sorted(l3.name(i) for i in coloring.red))
print(f"unit-ball occupancy d = {universe.d},"
      f" so every membership probability is at least 2^-{universe.d}"
      f" = {Fraction(1, 2 ** universe.d)}")
for name in l3.points:
    print(f"P({name} red) = {dl.membership_probability(universe, name)}")

print()
print("== the recoloring map, applied and audited ==")
source = next(c for c in universe.colorings if l3.index("b") not in c.red)
out = dl.recolor(universe, source, "b", sorted(source.red))
print("recoloring the lattice", sorted(l3.name(i) for i in source.red),
      "around 'b' gives", sorted(l3.name(i) for i in out.red))
for name in l3.points:
    rep = dl.verify_recoloring_injective(universe, name)
    print(f"classes of {name}: sizes"
          f" {sorted(rep.class_sizes.values())} vs {rep.card_b} red colorings;"
          f" injective and proper: {rep.ok}")

print()
print("== the unit-edge tree, colored at separation two ==")
for branching, height in [(1, 1), (2, 2), (3, 2)]:
    prob = dl.tree_experiment(branching, height)
    print(f"branching {branching}, height {height}: P(root red) = {prob}")
print("the ternary tree of height two exceeds 1/16:",
      dl.tree_experiment(3, 2) > Fraction(1, 16))
