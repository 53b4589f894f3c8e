"""Good/bad classification, boundary layers, Monte Carlo estimates, equalization."""
from fractions import Fraction

import numpy as np
import pytest

import dyadiclab as dl
from dyadiclab.errors import (
    CenterNotInGrid,
    InvalidParams,
    InvalidProbabilities,
    InvalidTrials,
    ScheduleInvalid,
)
from dyadiclab.goodness import (
    GoodnessParams,
    _complement,
    estimate_bad_probability,
    estimate_boundary_decay,
    estimate_really_good,
    exact_good_probability,
)
from dyadiclab.mc import wilson_interval


PARAMS = GoodnessParams(delta=0.1, gamma=0.1, r=1)


def forest_for(space, delta, seed, n0=0):
    rng = np.random.default_rng(seed)
    h = dl.build_nested_grids(space, delta, n0, rng=rng)
    return dl.build_forest(h, rng)


# --- parameters -----------------------------------------------------------------

def test_params_validation():
    with pytest.raises(InvalidParams):
        GoodnessParams(delta=1.5, gamma=0.1, r=1)
    with pytest.raises(InvalidParams):
        GoodnessParams(delta=0.1, gamma=0.0, r=1)
    with pytest.raises(InvalidParams):
        GoodnessParams(delta=0.1, gamma=0.1, r=0)
    with pytest.raises(InvalidParams):
        # 0.9**0.9 wildly exceeds 1/2
        GoodnessParams(delta=0.9, gamma=0.1, r=1)
    assert GoodnessParams(delta=0.9, gamma=0.1, r=8).threshold(8, 0) \
        == pytest.approx(0.9 ** 0.8)


# --- classification --------------------------------------------------------------

def test_good_vacuous_without_coarse_levels(two_far):
    """No level is coarser by r, so the quantifier is empty and the cube is good."""
    forest = forest_for(two_far, 0.5, 0)
    params = GoodnessParams(delta=0.5, gamma=0.5, r=3)
    for cube in dl.build_cubes(forest, forest.hierarchy.finest_level):
        assert dl.is_good(forest, cube, params)


def test_good_when_coarse_cube_swallows_space(singleton):
    forest = forest_for(singleton, 0.1, 0)
    cube = dl.build_cubes(forest, forest.levels[-1])[0]
    assert dl.is_good(forest, cube, PARAMS)


def test_elbow_badness_matches_hand_analysis(elbow):
    """Bad exactly when the middle point attaches to the far side: p = 1/4."""
    bad = 0
    trials = 4000
    for t in range(trials):
        forest = forest_for(elbow, 0.1, t)
        cubes_by_level = {n: dl.build_cubes(forest, n) for n in forest.levels}
        cube = next(c for c in cubes_by_level[2] if c.center == 0)
        bad += not dl.is_good(forest, cube, PARAMS, cubes_by_level)
    sigma = (0.25 * 0.75 / trials) ** 0.5
    assert abs(bad / trials - 0.25) <= 4 * sigma


def test_exact_good_probability_elbow(elbow):
    assert exact_good_probability(elbow, "x", 2, PARAMS) == Fraction(3, 4)


def test_goodness_monotone_in_r(elbow):
    """A stricter level gap can only remove constraints: good stays good."""
    loose = GoodnessParams(delta=0.1, gamma=0.1, r=2)
    for t in range(100):
        forest = forest_for(elbow, 0.1, t)
        cubes_by_level = {n: dl.build_cubes(forest, n) for n in forest.levels}
        cube = next(c for c in cubes_by_level[2] if c.center == 0)
        if dl.is_good(forest, cube, PARAMS, cubes_by_level):
            assert dl.is_good(forest, cube, loose, cubes_by_level)


# --- boundary layers ---------------------------------------------------------------

def test_boundary_layer_whole_space_is_empty(singleton):
    forest = forest_for(singleton, 0.1, 0)
    cube = dl.build_cubes(forest, forest.levels[-1])[0]
    assert dl.boundary_layer(singleton, cube, 10.0).members == frozenset()


def test_boundary_layer_monotone_and_oracle(ladder):
    rng = np.random.default_rng(48)
    h = dl.build_nested_grids(ladder, 0.1, 0, rng=rng)
    forest = dl.build_forest(h, rng)
    cube = dl.build_cubes(forest, 0)[0]
    small = dl.boundary_layer(ladder, cube, 0.05)
    big = dl.boundary_layer(ladder, cube, 0.5)
    assert small.members <= big.members
    # naive double scan oracle
    width = 0.5 * cube.scale
    inside = sorted(cube.members)
    outside = _complement(ladder, cube.members)
    want = {x for x in range(len(ladder))
            if dl.set_distance(ladder, [x], inside) <= width
            and dl.set_distance(ladder, [x], outside) <= width}
    assert big.members == want


def test_boundary_layer_requires_positive_eps(two_far):
    forest = forest_for(two_far, 0.5, 0)
    cube = dl.build_cubes(forest, forest.levels[-1])[0]
    with pytest.raises(InvalidParams):
        dl.boundary_layer(two_far, cube, 0.0)


# --- bad-probability estimator --------------------------------------------------------

def test_estimate_bad_probability_elbow(elbow):
    est = estimate_bad_probability(elbow, 2, "x", PARAMS, trials=2000, seed=5)
    sigma = (0.25 * 0.75 / 2000) ** 0.5
    assert abs(est.fraction - 0.25) <= 4 * sigma
    assert est.wilson_low <= est.fraction <= est.wilson_high
    assert est.step_violations == 0


def test_estimate_deterministic_and_worker_invariant(elbow):
    a = estimate_bad_probability(elbow, 2, 0, PARAMS, trials=300, seed=9)
    b = estimate_bad_probability(elbow, 2, 0, PARAMS, trials=300, seed=9)
    c = estimate_bad_probability(elbow, 2, 0, PARAMS, trials=300, seed=9,
                                 workers=2)
    assert a == b == c


def test_estimate_singleton_never_bad(singleton):
    est = estimate_bad_probability(singleton, 0, 0, PARAMS, trials=50, seed=0)
    assert est.bad_count == 0


def test_estimate_rejects_zero_trials(elbow):
    with pytest.raises(InvalidTrials):
        estimate_bad_probability(elbow, 2, 0, PARAMS, trials=0, seed=0)


def test_estimate_center_not_in_grid(elbow):
    """At a random coarse level the fixed center is sometimes absent."""
    with pytest.raises(CenterNotInGrid):
        estimate_bad_probability(elbow, 1, "u", PARAMS, trials=50, seed=0)


# --- boundary decay estimator -----------------------------------------------------------

DECAY_PARAMS = GoodnessParams(delta=0.001, gamma=0.1, r=1)
DECAY_SCHEDULE = (2e-6, 4e-9, 8e-12)


def test_decay_probe_estimates(decay_probe):
    fit = estimate_boundary_decay(decay_probe, "x", 0, DECAY_SCHEDULE,
                                  trials=1500, seed=7, params=DECAY_PARAMS)
    assert fit.counts[0] > fit.counts[1] > 0
    assert fit.counts[2] == 0
    assert all(a >= b for a, b in zip(fit.estimates, fit.estimates[1:]))
    assert fit.eta_hat is not None and fit.eta_hat > 0
    again = estimate_boundary_decay(decay_probe, "x", 0, DECAY_SCHEDULE,
                                    trials=1500, seed=7, params=DECAY_PARAMS)
    assert again.counts == fit.counts


def test_decay_singleton_all_zero(singleton):
    fit = estimate_boundary_decay(singleton, 0, 0, (2e-6, 4e-9), trials=20,
                                  seed=0, params=DECAY_PARAMS)
    assert fit.counts == (0, 0)
    assert fit.eta_hat is None


def test_decay_schedule_validation(decay_probe):
    with pytest.raises(ScheduleInvalid):
        estimate_boundary_decay(decay_probe, 0, 0, (4e-9, 2e-6), trials=10,
                                seed=0, params=DECAY_PARAMS)  # increasing
    with pytest.raises(ScheduleInvalid):
        estimate_boundary_decay(decay_probe, 0, 0, (1e-2,), trials=10,
                                seed=0, params=DECAY_PARAMS)  # 500*eps > delta
    with pytest.raises(ScheduleInvalid):
        estimate_boundary_decay(decay_probe, 0, 0, (), trials=10,
                                seed=0, params=DECAY_PARAMS)


# --- equalization ------------------------------------------------------------------------

def test_equalize_examples():
    assert dl.equalize(0.4, 0.4, 0.99) is True          # threshold one
    assert dl.equalize(0.6, 0.3, 0.6) is False          # threshold 0.5
    assert dl.equalize(0.6, 0.3, 0.5) is True
    with pytest.raises(InvalidProbabilities):
        dl.equalize(0.3, 0.6, 0.5)                       # a > p_q
    with pytest.raises(InvalidProbabilities):
        dl.equalize(0.0, 0.0, 0.5)
    with pytest.raises(InvalidProbabilities):
        dl.equalize(0.6, 0.3, 1.5)


def test_really_good_frequency_elbow(elbow):
    p_q = exact_good_probability(elbow, "x", 2, PARAMS)
    a = Fraction(1, 4)
    freq = estimate_really_good(elbow, "x", 2, PARAMS, float(a), float(p_q),
                                trials=20_000, seed=3)
    sigma = (float(a) * (1 - float(a)) / 20_000) ** 0.5
    assert abs(freq - float(a)) <= 4 * sigma


# --- Wilson intervals ---------------------------------------------------------------------

def test_wilson_endpoints_satisfy_definition():
    """Oracle: interval endpoints solve |phat - p| = z * sqrt(p(1-p)/n)."""
    z = 1.959963984540054
    for successes, trials in ((0, 10), (3, 17), (50, 100), (999, 1000)):
        lo, hi = wilson_interval(successes, trials)
        phat = successes / trials
        for p in (lo, hi):
            lhs = (phat - p) ** 2
            rhs = z * z * p * (1 - p) / trials
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_wilson_rejects_bad_counts():
    with pytest.raises(InvalidTrials):
        wilson_interval(1, 0)
    with pytest.raises(InvalidTrials):
        wilson_interval(5, 3)
