"""Walkthrough: weight characteristic, growth constants, measure doubling.

Run with:  python demos/05_weights.py
"""
import numpy as np

import dyadiclab as dl
from dyadiclab.measures import WeightedMeasure

rng = np.random.default_rng(3)
space = dl.space_from_coords(rng.uniform(0, 2, size=(8, 2)))

print("== the two-weight characteristic over all balls ==")
flat = WeightedMeasure(mu=np.ones(8), w=np.ones(8))
print("a constant weight scores exactly", dl.a2_characteristic(space, flat))

w = rng.uniform(0.2, 5.0, size=8)
wm = WeightedMeasure(mu=np.ones(8), w=w)
value = dl.a2_characteristic(space, wm)
flipped = dl.a2_characteristic(space, WeightedMeasure(mu=np.ones(8), w=1.0 / w))
print(f"a random weight scores {value:.6f}"
      f" (always >= 1); inverting the weight gives {flipped:.6f}")

print()
print("== growth constants and their scaling ==")
rep = dl.growth_constant(space, wm, m=1.5)
print(f"smallest C with mass(B(x, r)) <= C * r^1.5 over the tested radii:"
      f" {rep.c_min:.4f}, attained at center {rep.witness_center},"
      f" radius {rep.witness_radius:.4f}")
half = dl.growth_constant(space.rescale(2.0), wm, m=1.5)
print(f"halving all distances multiplies it by 2^1.5: {half.c_min:.4f}"
      f" vs {rep.c_min * 2 ** 1.5:.4f}")

print()
print("== measure doubling ==")
print("uniform mass doubling constant:",
      f"{dl.measure_doubling_constant(space, flat):.4f}")
spiky = WeightedMeasure(mu=rng.uniform(0.01, 5.0, size=8), w=np.ones(8))
print("a spiky mass is still doubling, with a larger constant:",
      f"{dl.measure_doubling_constant(space, spiky):.4f}")
