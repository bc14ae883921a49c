"""RRT*, Informed RRT* with direct spheroid sampling, graph pruning, bounds and benchmarks."""
from .analysis import (RateReport, convergence_experiment, expected_next_cost_lower, rate_bounds,
                       rejection_bound, sampling_prob_bound)
from .bench import BenchConfig, median_ci, run_benchmark, sample_bench
from .geometry import (ProlateHyperspheroid, make_rng, phs_measure, rotation_to_world, sample_phs,
                       sample_unit_ball, unit_ball_measure)
from .planner import VARIANTS, Planner, PlannerConfig, PlanResult, Tree, extend, nearest, plan, prune, steer
from .sampling import (InformedSampler, SamplingError, f_hat, informed_set_precision_recall, keep_sample,
                       random_goal, sample_informed)
from .worlds import ProblemInstance, World, grid_world, obstacle_free_world, toy_world

__all__ = [
    "BenchConfig", "InformedSampler", "PlanResult", "Planner", "PlannerConfig", "ProblemInstance",
    "ProlateHyperspheroid", "RateReport", "SamplingError", "Tree", "VARIANTS", "World",
    "convergence_experiment", "expected_next_cost_lower", "extend", "f_hat", "grid_world",
    "informed_set_precision_recall", "keep_sample", "make_rng", "median_ci", "nearest",
    "obstacle_free_world", "phs_measure", "plan", "prune", "random_goal", "rate_bounds",
    "rejection_bound", "rotation_to_world", "run_benchmark", "sample_bench", "sample_informed",
    "sample_phs", "sample_unit_ball", "sampling_prob_bound", "steer", "toy_world", "unit_ball_measure",
]
