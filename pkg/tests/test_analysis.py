import csv
import math

import numpy as np
import pytest

from informed_rrt.analysis import (
    BoundInputs,
    InsufficientData,
    RateReport,
    convergence_config,
    convergence_experiment,
    convergence_problem,
    expected_next_cost_lower,
    fit_rate,
    initial_solution_tree,
    predicted_costs,
    rate_bounds,
    rejection_bound,
    sampling_prob_bound,
)
from informed_rrt.geometry import phs_measure, tight_rectangle_measure


def test_bound_inputs_validation():
    BoundInputs(2, 1.5, 1.0, 4.0, 0.5)
    for bad in [(0, 1.5, 1.0), (2, 0.9, 1.0), (2, 1.5, 0.0)]:
        with pytest.raises(ValueError):
            BoundInputs(*bad)
    with pytest.raises(ValueError):
        BoundInputs(2, 1.5, 1.0, p=1.2)


def test_sampling_prob_bound_examples():
    assert sampling_prob_bound(2, 1.0, 1.0, 4.0) == 0.0
    assert sampling_prob_bound(2, 2.0, 1.0, 4.0) == pytest.approx(math.pi * math.sqrt(3) / 8, rel=1e-14)
    assert sampling_prob_bound(2, 2.0, 1.0, 4.0) == pytest.approx(0.680176, abs=5e-6)
    assert sampling_prob_bound(3, 1.7, 1.2, 10.0) == pytest.approx(phs_measure(1.2, 1.7, 3) / 10.0)
    assert sampling_prob_bound(2, 100.0, 1.0, 4.0) == 1.0


def test_rejection_bound_examples():
    assert rejection_bound(2) == pytest.approx(math.pi / 4, rel=1e-14)
    assert rejection_bound(8) == pytest.approx(math.pi**4 / (2**8 * 24), rel=1e-14)
    assert rejection_bound(16) == pytest.approx(3.59e-6, rel=2e-3)


@pytest.mark.parametrize("n", range(1, 31))
def test_rejection_bound_decay_ratio(n):
    assert rejection_bound(n + 2) / rejection_bound(n) == pytest.approx(math.pi / (4 * (n / 2 + 1)), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_sampling_bound_over_tight_rectangle_is_rejection_bound(n):
    c_min, c = 1.0, 1.3
    box = tight_rectangle_measure(c_min, c, n)
    assert sampling_prob_bound(n, c, c_min, box) <= rejection_bound(n) * (1 + 1e-12)


def test_expected_next_cost_examples():
    assert expected_next_cost_lower(2, 2.0, 1.0, p=0.0) == 2.0
    assert expected_next_cost_lower(2, 2.0, 1.0, p=1.0) == pytest.approx(1.5)
    assert expected_next_cost_lower(4, 1.0, 1.0) == pytest.approx(1.0)


def test_expected_next_cost_properties():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 12))
        c_min = rng.uniform(0.1, 3)
        c = c_min * rng.uniform(1, 5)
        vals = [expected_next_cost_lower(n, c, c_min, p) for p in np.linspace(0, 1, 11)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(c_min - 1e-12 <= v <= c + 1e-12 for v in vals)


def test_rate_bounds_examples():
    r = rate_bounds(2)
    assert r["rrtstar"] == 1.0
    assert r["informed"] == pytest.approx(1 / 3)
    assert r["reject"] == pytest.approx(1 - math.pi / 6, abs=1e-5)
    with pytest.raises(ValueError):
        rate_bounds(1)


def test_rate_ordering_up_to_32():
    for n in range(2, 33):
        r = rate_bounds(n)
        assert r["informed"] <= r["reject"] <= r["rrtstar"]


def test_predicted_costs_iterates_bound():
    curve = predicted_costs(2, 1.4, 1.0, 3)
    assert curve[0] == 1.4
    assert curve[1] == pytest.approx((2 * 1.4**2 + 1) / (3 * 1.4))
    assert np.all(np.diff(curve) < 0)


def test_fit_rate_recovers_geometric_decay():
    errors = 0.4 * 0.5 ** np.arange(40)
    assert fit_rate(errors) == pytest.approx(0.5)
    assert fit_rate(errors, start=0) == pytest.approx(0.5)
    # values at or below the floor end the window
    floored = np.concatenate([errors[:20], np.full(20, 1e-13)])
    assert fit_rate(floored, floor=1e-12) == pytest.approx(0.5)
    assert math.isnan(fit_rate(np.array([1.0])))


def test_initial_solution_tree_cost():
    p = convergence_problem(3)
    t = initial_solution_tree(p, 1.4)
    t.check()
    assert t.best_solution()[0] == pytest.approx(1.4)
    with pytest.raises(ValueError):
        initial_solution_tree(p, 1.0)


def test_convergence_config_modes():
    assert convergence_config("infinite", 10, 0).rewire_mode == "all"
    assert math.isinf(convergence_config("constant", 10, 0).rewire_scale)
    assert convergence_config("shrinking", 10, 0).rewire_scale == pytest.approx(1.1)
    with pytest.raises(ValueError):
        convergence_config("bogus", 10, 0)


def test_rate_report_csv(tmp_path):
    rep = convergence_experiment(2, "infinite", trials=20, iterations=30, seed=0)
    path = tmp_path / "rates.csv"
    rep.to_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["iteration", "mean_log_error", "predicted_log_error", "n_trials"]
    assert len(rows) == 32 and rows[1][3] == "20"
    assert np.all(rep.errors >= 0)
    assert np.all(np.diff(rep.costs, axis=1) <= 0)


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        convergence_experiment(2, "infinite", trials=10, iterations=3, seed=0)
    with pytest.raises(ValueError):
        convergence_experiment(2, "infinite", trials=5, iterations=30)


def test_difference_metric():
    costs = np.array([[1.4, 1.2, 1.1], [1.4, 1.3, 1.0]])
    rep = RateReport(2, "infinite", 1.0, costs, np.array([1.4, 1.2, 1.05]), 4)
    d = rep.difference()
    assert d[0] == 0.0
    assert d[1] == pytest.approx(0.05 / 0.25)
    assert d[2] == pytest.approx(0.0)


def test_infinite_rewiring_mean_respects_lower_bound_n8():
    # away from the rounding floor the mean cost never undercuts the bound by more than 3 SE
    rep = convergence_experiment(8, "infinite", trials=200, iterations=40, seed=1)
    se = rep.standard_error[1:]
    gap = rep.mean_cost[1:] - rep.predicted[1:]
    assert np.all(gap >= -3.0 * se)


def test_infinite_rewiring_rate_n8():
    rep = convergence_experiment(8, "infinite", trials=200, iterations=100, seed=2)
    assert rep.fitted_rate == pytest.approx(rate_bounds(8)["informed"], abs=0.05)


def test_shrinking_radius_is_sublinear():
    rep = convergence_experiment(2, "shrinking", trials=50, iterations=200, seed=3)
    assert rep.fitted_rate > 0.9
