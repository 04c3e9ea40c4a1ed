"""Log-domain Sinkhorn contracts: marginals, bounds, limits, failure mode."""

import numpy as np
import pytest

from wassdep import (
    CostSpec,
    SinkhornConvergenceError,
    cost_matrix,
    sinkhorn_discrepancy,
    sinkhorn_divergence,
    solve_exact,
    to_measure,
)


def _instance(seed, n=11, m=8, d=2):
    rng = np.random.default_rng(seed)
    return to_measure(rng.normal(size=(n, d))), to_measure(rng.normal(size=(m, d)) + 0.3)


def test_plan_marginals_match_within_tolerance():
    src, dst = _instance(0)
    plan, _ = sinkhorn_discrepancy(src, dst, eps=0.5, tol=1e-9)
    row, col = plan.marginals()
    assert np.abs(row - src.weights).max() <= 1e-8
    assert np.abs(col - dst.weights).max() <= 1e-8
    assert np.all(plan.mass >= 0)


def test_regularized_value_upper_bounds_exact_cost():
    for seed in range(5):
        src, dst = _instance(seed)
        exact = solve_exact(src, dst, CostSpec(p=2.0)).cost
        _, value = sinkhorn_discrepancy(src, dst, eps=0.8)
        assert value >= exact - 1e-9


def test_gap_shrinks_as_regularization_shrinks():
    src, dst = _instance(3)
    spec = CostSpec(p=2.0)
    exact = solve_exact(src, dst, spec).cost
    med = float(np.median(cost_matrix(src, dst, spec)))
    gaps = []
    for mult, tol in ((1.0, 1e-9), (0.3, 1e-9), (0.1, 1e-9)):
        _, value = sinkhorn_discrepancy(src, dst, mult * med, spec, tol=tol)
        gaps.append(value - exact)
    assert gaps[0] > gaps[1] > gaps[2] > -1e-9


def test_value_approaches_exact_cost_for_small_eps():
    src, dst = _instance(4, n=9, m=9)
    spec = CostSpec(p=2.0)
    exact = solve_exact(src, dst, spec).cost
    med = float(np.median(cost_matrix(src, dst, spec)))
    _, value = sinkhorn_discrepancy(src, dst, 0.01 * med, spec, tol=1e-6, max_iter=200_000)
    assert value == pytest.approx(exact, abs=0.05 * max(exact, 1.0))


def test_self_divergence_is_zero():
    src, _ = _instance(5)
    assert sinkhorn_divergence(src, src, eps=0.7) == 0.0


def test_divergence_is_symmetric_and_nonnegative():
    src, dst = _instance(6)
    ab = sinkhorn_divergence(src, dst, eps=0.9)
    ba = sinkhorn_divergence(dst, src, eps=0.9)
    assert ab >= 0.0
    assert ab == pytest.approx(ba, rel=1e-6, abs=1e-10)
    assert ab > 1e-3  # distinct clouds separated by a shift


def test_divergence_detects_equal_measures_under_distinct_atom_lists():
    # same measure written as 4 atoms and as a duplicated 8-atom list
    pts = np.array([[0.0], [1.0], [2.0], [3.0]])
    a = to_measure(pts)
    b = to_measure(np.vstack([pts, pts]))
    assert sinkhorn_divergence(a, b, eps=0.5) <= 1e-8


def test_symmetric_path_agrees_with_alternating_path():
    """The self-solve shortcut must not change the reported value."""
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(10, 2))
    a = to_measure(pts)
    b = to_measure(pts.copy())  # bit-equal points: symmetric shortcut
    b2 = to_measure((pts * 3.0) / 3.0)  # same measure up to rounding: alternating path
    assert not np.array_equal(a.points, b2.points)
    v_sym = sinkhorn_discrepancy(a, b, 0.6)[1]
    v_alt = sinkhorn_discrepancy(a, b2, 0.6)[1]
    assert v_sym == pytest.approx(v_alt, rel=1e-6, abs=1e-8)


def test_raises_with_achieved_violation_when_budget_too_small():
    src, dst = _instance(8)
    with pytest.raises(SinkhornConvergenceError) as err:
        sinkhorn_discrepancy(src, dst, eps=0.05, tol=1e-12, max_iter=3)
    assert err.value.achieved_violation > 0.0
    assert "violation" in str(err.value)


def test_rejects_nonpositive_eps():
    src, dst = _instance(9)
    with pytest.raises(ValueError):
        sinkhorn_discrepancy(src, dst, eps=0.0)
    with pytest.raises(ValueError):
        sinkhorn_discrepancy(src, dst, eps=-1.0)


def test_deep_regularization_stays_finite_in_log_domain():
    """Potentials survive eps three orders below the median cost."""
    src, dst = _instance(10, n=7, m=7)
    spec = CostSpec(p=2.0)
    med = float(np.median(cost_matrix(src, dst, spec)))
    plan, value = sinkhorn_discrepancy(
        src, dst, 1e-3 * med, spec, tol=1e-4, max_iter=200_000
    )
    assert np.isfinite(value)
    assert np.all(np.isfinite(plan.mass))
