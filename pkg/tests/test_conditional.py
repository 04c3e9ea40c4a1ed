"""Conditional dependence: averaged conditional-to-marginal transport."""

import numpy as np
import pytest

from wassdep.conditional import (
    d_conditional,
    d_conditional_1d,
    d_conditional_entropic,
    gaussian_conditional_index,
    i_conditional,
    w_lipschitz_estimate,
)
from wassdep.empirical import ConditionalFamily, PairedSample, partition, to_measure
from wassdep.exceptions import DataError
from wassdep.measures import CostSpec


def _tied_sample():
    x = np.repeat(np.arange(6.0), 10)
    y = 0.5 * x + np.random.default_rng(1).normal(size=60)
    return PairedSample(x, y, seed=0)


def test_two_group_hand_values():
    # Groups are dirac(0) and dirac(1); the marginal is uniform on {0,0,1,1},
    # so each group pays mean distance 1/2 (p=1) or mean square 1/2 (p=2).
    sample = PairedSample(np.array([0.0, 0.0, 1.0, 1.0]), np.array([0.0, 0.0, 1.0, 1.0]), seed=0)
    family = partition(sample, "exact")
    marginal = to_measure(sample.ys)
    assert d_conditional(family, marginal, p=1.0) == pytest.approx(0.5, abs=1e-12)
    assert d_conditional(family, marginal, p=2.0) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_zero_when_each_conditional_equals_the_marginal():
    sample = PairedSample(np.array([0.0, 0.0, 1.0, 1.0]), np.array([0.0, 1.0, 0.0, 1.0]), seed=0)
    family = partition(sample, "exact")
    assert d_conditional(family, to_measure(sample.ys), p=1.0) == 0.0


def test_marginal_mismatch_is_rejected():
    sample = _tied_sample()
    family = partition(sample, "exact")
    wrong = to_measure(sample.ys + 1.0)
    with pytest.raises(DataError):
        d_conditional(family, wrong)


def test_gaussian_closed_form():
    assert gaussian_conditional_index(0.0) == 0.0
    assert gaussian_conditional_index(1.0) == pytest.approx(1.0)
    assert gaussian_conditional_index(0.6) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValueError):
        gaussian_conditional_index(-1.2)


def test_functional_sample_scores_exactly_one():
    x = np.repeat(np.arange(5.0), 3)
    y = x * x - 2.0 * x
    report = i_conditional(PairedSample(x, y, seed=0), mode="exact", p=1.0)
    assert report.value == 1.0
    assert report.numerator == report.denominator


def test_exact_grouping_is_discontinuous_on_continuous_data():
    # With all-distinct x every conditional is a dirac, so even an
    # independent sample is scored as perfectly dependent.
    rng = np.random.default_rng(0)
    sample = PairedSample(rng.normal(size=300), rng.normal(size=300), seed=0)
    assert i_conditional(sample, mode="exact").value == 1.0


def test_exact_mode_never_exceeds_one_on_tied_data():
    report = i_conditional(_tied_sample(), mode="exact", p=2.0)
    assert report.value <= 1.0 + 1e-12
    assert report.value > 0.0
    assert report.exceeds_unit is False


def test_binned_mode_is_small_under_independence():
    rng = np.random.default_rng(0)
    sample = PairedSample(rng.normal(size=300), rng.normal(size=300), seed=0)
    report = i_conditional(sample, mode="bins", p=1.0)
    assert report.value < 0.35
    assert report.partition == "bins"
    assert report.to_dict()["bins"] >= 1


def test_quantile_route_matches_the_solver_route():
    family = partition(_tied_sample(), "exact")
    marginal = to_measure(_tied_sample().ys)
    for p in (1.0, 2.0, 3.0):
        a = d_conditional(family, marginal, p=p)
        b = d_conditional_1d(family, marginal, p=p)
        assert a == pytest.approx(b, abs=1e-12)


def test_quantile_route_needs_scalar_y():
    rng = np.random.default_rng(3)
    sample = PairedSample(np.repeat([0.0, 1.0], 4), rng.normal(size=(8, 2)), seed=0)
    family = partition(sample, "exact")
    with pytest.raises(DataError):
        d_conditional_1d(family, family.pooled_marginal())


def test_entropic_average_sits_above_exact_and_grows_with_eps():
    sample = _tied_sample()
    family = partition(sample, "exact")
    marginal = to_measure(sample.ys)
    exact_power = d_conditional(family, marginal, p=2.0) ** 2.0
    small = d_conditional_entropic(family, marginal, 0.05, CostSpec(p=2.0))
    big = d_conditional_entropic(family, marginal, 1.0, CostSpec(p=2.0))
    assert exact_power <= small + 1e-9
    assert small <= big + 1e-9


def test_lipschitz_ratio_recovers_a_linear_slope():
    x = np.repeat(np.arange(4.0), 2)
    family = partition(PairedSample(x, 2.0 * x, seed=0), "exact")
    assert w_lipschitz_estimate(family, p=1.0) == pytest.approx(2.0, abs=1e-12)


def test_lipschitz_needs_distinct_groups():
    x = np.repeat(np.arange(2.0), 3)
    family = partition(PairedSample(x, x, seed=0), "exact")
    single = ConditionalFamily(
        representatives=family.representatives[:1],
        laws=family.laws[:1],
        groups=family.groups[:1],
        group_weights=np.array([1.0]),
        n_rows=3,
    )
    with pytest.raises(DataError):
        w_lipschitz_estimate(single)
    stacked = ConditionalFamily(
        representatives=np.zeros((2, 1)),
        laws=family.laws,
        groups=family.groups,
        group_weights=family.group_weights,
        n_rows=6,
    )
    with pytest.raises(DataError):
        w_lipschitz_estimate(stacked)


def test_partition_mode_is_validated():
    with pytest.raises(ValueError):
        i_conditional(_tied_sample(), mode="kmeans")
