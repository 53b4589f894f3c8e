"""Weight characteristic, growth constants, and measure doubling."""

import numpy as np
import pytest

import dyadiclab as dl
from dyadiclab.errors import DegenerateMeasure, InvalidParams
from dyadiclab.measures import WeightedMeasure, weighted_measure_from_maps


def uniform_wm(n, w=None):
    return WeightedMeasure(mu=np.ones(n), w=np.ones(n) if w is None else np.asarray(w))


def test_characteristic_constant_weight_is_one(l3):
    assert dl.a2_characteristic(l3, uniform_wm(3)) == 1.0


def test_characteristic_two_point_example():
    space = dl.validate_metric([[0, 1], [1, 0]])
    wm = uniform_wm(2, w=[1.0, 4.0])
    # three distinct balls; the full ball gives (5/2) * (5/8)
    assert dl.a2_characteristic(space, wm) == pytest.approx(25 / 16, rel=1e-15)


def test_characteristic_singleton(singleton):
    wm = uniform_wm(1, w=[17.0])
    assert dl.a2_characteristic(singleton, wm) == 1.0


def test_characteristic_at_least_one_and_symmetric():
    rng = np.random.default_rng(5)
    space = dl.space_from_coords(rng.uniform(0, 2, size=(7, 2)))
    for _ in range(50):
        w = rng.uniform(0.1, 10.0, size=7)
        wm = WeightedMeasure(mu=rng.uniform(0.1, 2.0, size=7), w=w)
        value = dl.a2_characteristic(space, wm)
        assert value >= 1.0
        flipped = WeightedMeasure(mu=wm.mu, w=1.0 / w)
        assert dl.a2_characteristic(space, flipped) == pytest.approx(value, rel=1e-9)


def test_weighted_measure_validation():
    with pytest.raises(DegenerateMeasure):
        WeightedMeasure(mu=np.zeros(2), w=np.ones(2))
    with pytest.raises(InvalidParams):
        WeightedMeasure(mu=np.ones(2), w=np.array([1.0, 0.0]))
    with pytest.raises(InvalidParams):
        WeightedMeasure(mu=-np.ones(2), w=np.ones(2))
    # zero weight is fine where the measure vanishes
    WeightedMeasure(mu=np.array([1.0, 0.0]), w=np.array([1.0, 0.0]))


def test_growth_two_points():
    space = dl.validate_metric([[0, 1], [1, 0]])
    rep = dl.growth_constant(space, uniform_wm(2), 1.0)
    assert rep.c_min == 2.0
    assert rep.witness_radius == 1.0


def test_growth_singleton_vacuous(singleton):
    rep = dl.growth_constant(singleton, uniform_wm(1), 1.0)
    assert rep.c_min == 0.0


def test_growth_scaling_homogeneity():
    rng = np.random.default_rng(11)
    space = dl.space_from_coords(rng.uniform(0, 3, size=(6, 2)))
    wm = uniform_wm(6, w=rng.uniform(0.5, 2, size=6))
    m = 1.3
    base = dl.growth_constant(space, wm, m).c_min
    for lam in (2.0, 0.5, 3.7):
        scaled = dl.growth_constant(space.rescale(1.0 / lam), wm, m).c_min
        assert scaled == pytest.approx(base * lam ** (-m), rel=1e-12)


def test_growth_requires_positive_exponent(singleton):
    with pytest.raises(InvalidParams):
        dl.growth_constant(singleton, uniform_wm(1), 0.0)


def test_measure_doubling_examples(singleton):
    assert dl.measure_doubling_constant(singleton, uniform_wm(1)) == 1.0
    space = dl.validate_metric([[0, 1], [1, 0]])
    assert dl.measure_doubling_constant(space, uniform_wm(2)) == 1.0


def test_measure_doubling_at_least_one():
    rng = np.random.default_rng(3)
    space = dl.space_from_coords(rng.uniform(0, 4, size=(8, 2)))
    for _ in range(20):
        wm = WeightedMeasure(mu=rng.uniform(0.0, 2.0, size=8) + 1e-3,
                             w=np.ones(8))
        assert dl.measure_doubling_constant(space, wm) >= 1.0


def test_weighted_measure_from_maps(l3):
    wm = weighted_measure_from_maps(l3, {"a": 1, "b": 2, "c": 3},
                                    {"a": 1, "b": 1, "c": 4})
    assert wm.mu.tolist() == [1, 2, 3]
    assert wm.w.tolist() == [1, 1, 4]
    default = weighted_measure_from_maps(l3, None, None)
    assert default.mu.tolist() == [1, 1, 1]
