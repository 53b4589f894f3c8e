"""Weights and measures on a finite space: two-weight characteristic, growth,
and measure doubling.

Suprema over balls are taken over closed balls with radii drawn from the
pairwise-distance set: on a finite space every ball realized by any radius
equals one of these, so the finite family attains the supremum.  The
small-radius degeneracy of growth conditions (point masses blow up as the
radius shrinks) is avoided by the same restriction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegenerateMeasure, InvalidParams
from .metric import FiniteMetricSpace

__all__ = [
    "WeightedMeasure",
    "GrowthReport",
    "a2_characteristic",
    "growth_constant",
    "measure_doubling_constant",
    "weighted_measure_from_maps",
]


@dataclass(frozen=True)
class WeightedMeasure:
    """Per-point masses mu >= 0 (not all zero) and weights w > 0 where mu > 0."""
    mu: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "w", w)
        if mu.ndim != 1 or w.shape != mu.shape:
            raise InvalidParams("mu and w must be 1-d arrays of equal length")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise InvalidParams("masses must be finite and nonnegative")
        if mu.sum() <= 0:
            raise DegenerateMeasure("total mass must be positive")
        if np.any((mu > 0) & (w <= 0)) or not np.all(np.isfinite(w)):
            raise InvalidParams("weights must be finite and positive where mu > 0")


def weighted_measure_from_maps(space: FiniteMetricSpace,
                               mu: Mapping[str, float] | None,
                               w: Mapping[str, float] | None) -> WeightedMeasure:
    """Build from name->value maps; missing mu defaults to 1, missing w to 1."""
    n = len(space)
    mu_arr = np.ones(n) if mu is None else np.array(
        [float(mu[space.name(i)]) for i in range(n)])
    w_arr = np.ones(n) if w is None else np.array(
        [float(w[space.name(i)]) for i in range(n)])
    return WeightedMeasure(mu=mu_arr, w=w_arr)


def _center_radii(space: FiniteMetricSpace, center: int) -> np.ndarray:
    """Radii producing every distinct closed ball around the center."""
    return np.unique(space.d[center])


def a2_characteristic(space: FiniteMetricSpace, wm: WeightedMeasure) -> float:
    """Supremum over closed balls of avg(w) * avg(1/w) with respect to mu.

    Balls of zero mass are skipped; the weight is inverted only where the
    measure charges the point.
    """
    mu, w = wm.mu, wm.w
    if mu.sum() <= 0:
        raise DegenerateMeasure("measure is identically zero")
    winv = np.zeros_like(w)
    positive = mu > 0
    winv[positive] = 1.0 / w[positive]
    best = -np.inf
    for center in range(len(space)):
        row = space.d[center]
        for radius in _center_radii(space, center):
            inside = row <= radius
            mass = mu[inside].sum()
            if mass <= 0:
                continue
            avg_w = float((w[inside] * mu[inside]).sum() / mass)
            avg_winv = float((winv[inside] * mu[inside]).sum() / mass)
            best = max(best, avg_w * avg_winv)
    return best


@dataclass(frozen=True)
class GrowthReport:
    """Minimal constant with mu(B(x, r)) <= C * r**m over the tested radii."""
    m: float
    c_min: float
    witness_center: int
    witness_radius: float


def growth_constant(space: FiniteMetricSpace, wm: WeightedMeasure,
                    m: float) -> GrowthReport:
    """Largest mu(B(x, r)) / r**m over centers and positive pairwise radii.

    A singleton has no positive radii; by convention its constant is 0.
    """
    if m <= 0:
        raise InvalidParams("growth exponent must be positive")
    radii = space.pairwise_distances()
    best, w_center, w_radius = 0.0, -1, 0.0
    for center in range(len(space)):
        row = space.d[center]
        for r in radii:
            value = float(wm.mu[row <= r].sum() / r ** m)
            if value > best:
                best, w_center, w_radius = value, center, r
    return GrowthReport(m=m, c_min=best, witness_center=w_center,
                        witness_radius=w_radius)


def measure_doubling_constant(space: FiniteMetricSpace, wm: WeightedMeasure) -> float:
    """Largest mu(B(x, 2r)) / mu(B(x, r)) over centers and pairwise radii.

    Only balls of positive mass enter; with no positive pairwise radii the
    constant is 1 (balls cannot grow).
    """
    mu = wm.mu
    if mu.sum() <= 0:
        raise DegenerateMeasure("measure is identically zero")
    best = 1.0
    for center in range(len(space)):
        row = space.d[center]
        for r in space.pairwise_distances():
            inner = mu[row <= r].sum()
            if inner <= 0:
                continue
            outer = mu[row <= 2 * r].sum()
            best = max(best, float(outer / inner))
    return best
