"""Closed-form probability and convergence-rate bounds, and the convergence-rate harness."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import phs_measure, unit_ball_measure
from .planner import Planner, PlannerConfig, Tree
from .worlds import ProblemInstance, obstacle_free_world


class InsufficientData(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundInputs:
    n: int
    c: float
    c_min: float
    domain_measure: float = math.inf
    p: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.c >= self.c_min > 0):
            raise ValueError("need c >= c_min > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be a probability")


def sampling_prob_bound(n, c, c_min, domain_measure):
    """Upper bound on the chance that a uniform sample of the domain lands in the L2 informed set."""
    return min(1.0, phs_measure(c_min, c, n) / domain_measure)


def rejection_bound(n):
    """Best-case acceptance rate of rejection sampling from the tight bounding box."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return unit_ball_measure(n) / 2.0**n


def expected_next_cost_lower(n, c, c_min, p=1.0):
    """Lower bound on E[next cost] given improvement probability p (exact for infinite rewiring)."""
    return p * (n * c * c + c_min * c_min) / ((n + 1) * c) + (1.0 - p) * c


def rate_bounds(n):
    """Best-case expected convergence rates of RRT*, RRT* with tight-box rejection, and Informed RRT*."""
    if n < 2:
        raise ValueError("rates are stated for n >= 2")
    reject = 1.0 - math.pi ** (n / 2) / ((n + 1) * 2.0 ** (n - 1) * math.gamma(n / 2 + 1))
    return {"rrtstar": 1.0, "reject": reject, "informed": (n - 1) / (n + 1)}


def predicted_costs(n, c0, c_min, iterations, p=1.0):
    """Lower-bound cost curve from repeatedly applying the expected next-iteration cost."""
    out = np.empty(iterations + 1)
    out[0] = c = c0
    for i in range(1, iterations + 1):
        c = expected_next_cost_lower(n, c, c_min, p)
        out[i] = c
    return out


RESOLUTION_FLOOR = 1e-9  # relative error below which costs are dominated by rounding


def fit_rate(errors, start=None, floor=0.0):
    """exp(slope) of least squares on log(errors) vs iteration.

    The usable window ends just before the first error at or below ``floor``;
    by default the fit covers the final half of that window. Returns nan when
    fewer than two points remain.
    """
    errors = np.asarray(errors, dtype=float)
    below = np.flatnonzero(errors <= floor)
    stop = int(below[0]) if below.size else errors.size
    if start is None:
        start = stop // 2
    if stop - start < 2:
        return math.nan
    idx = np.arange(start, stop)
    slope = np.polyfit(idx, np.log(errors[start:stop]), 1)[0]
    return float(math.exp(slope))


@dataclass
class RateReport:
    n: int
    mode: str
    c_opt: float
    costs: np.ndarray  # (trials, iterations + 1); column 0 is the initial solution
    predicted: np.ndarray  # (iterations + 1,)
    improving_iterations: int

    @property
    def n_trials(self):
        return self.costs.shape[0]

    @property
    def errors(self):
        # rounding can put a cost a few ulps below the optimum
        return np.maximum(self.costs - self.c_opt, 0.0)

    @property
    def mean_cost(self):
        return self.costs.mean(axis=0)

    @property
    def mean_error(self):
        return self.errors.mean(axis=0)

    @property
    def mean_log_error(self):
        with np.errstate(divide="ignore"):
            return np.log(self.mean_error)

    @property
    def predicted_error(self):
        return self.predicted - self.c_opt

    @property
    def predicted_log_error(self):
        with np.errstate(divide="ignore"):
            return np.log(self.predicted_error)

    @property
    def standard_error(self):
        return self.costs.std(axis=0, ddof=1) / math.sqrt(self.n_trials)

    def difference(self):
        """|(mean - predicted) / (mean - c_opt)| per iteration (inf where the mean error is 0)."""
        num = np.abs(self.mean_cost - self.predicted)
        den = self.mean_error
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        out[den == 0] = math.inf
        return out

    @property
    def fitted_rate(self):
        """Rate fitted to the final half of the mean-error iterations above the rounding floor."""
        return fit_rate(self.mean_error, floor=RESOLUTION_FLOOR * self.c_opt)

    @property
    def theoretical_rate(self):
        return rate_bounds(self.n)["informed"]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "mean_log_error", "predicted_log_error", "n_trials"])
            for i, (m, p) in enumerate(zip(self.mean_log_error, self.predicted_log_error)):
                w.writerow([i, repr(float(m)), repr(float(p)), self.n_trials])


CONVERGENCE_MODES = ("infinite", "constant", "shrinking")


def initial_solution_tree(problem, c0):
    """Tree holding the two-segment path start -> (mid, h, 0, ...) -> goal of cost c0."""
    start = problem.x_start
    goal = problem.goals[0]
    c_min = float(np.linalg.norm(goal - start))
    if c0 <= c_min:
        raise ValueError("initial cost must exceed the start-goal distance")
    axis = (goal - start) / c_min
    perp = np.zeros_like(axis)
    perp[1 if abs(axis[0]) > 0.5 else 0] = 1.0
    perp -= (perp @ axis) * axis
    perp /= np.linalg.norm(perp)
    h = math.sqrt((0.5 * c0) ** 2 - (0.5 * c_min) ** 2)
    via = 0.5 * (start + goal) + h * perp
    tree = Tree(start)
    tree.heuristic[0] = c_min
    half = float(np.linalg.norm(via - start))
    v = tree.add(via, 0, half, c0)
    tree.add(goal, v, half + float(np.linalg.norm(goal - via)), c_min, is_goal=True)
    return tree


def convergence_config(mode, iterations, seed, constant_eta=0.4, shrink_scale=1.1):
    base = dict(informed_sampling=True, graph_pruning=True, goal_bias=0.0,
                max_iterations=iterations, seed=seed)
    if mode == "infinite":
        return PlannerConfig(eta=math.inf, rewire_mode="all", **base)
    if mode == "constant":
        return PlannerConfig(eta=constant_eta, rewire_mode="radius", rewire_scale=math.inf, **base)
    if mode == "shrinking":
        return PlannerConfig(eta=math.inf, rewire_mode="radius", rewire_scale=shrink_scale, **base)
    raise ValueError(f"unknown rewiring mode {mode!r}; choose from {CONVERGENCE_MODES}")


def convergence_problem(n):
    start = np.zeros(n)
    start[0] = -0.5
    goal = np.zeros(n)
    goal[0] = 0.5
    return ProblemInstance(obstacle_free_world(n, 1.0), start, goal[None, :], c_opt=1.0,
                           name="free", params={"n": n})


def _convergence_trial(args):
    n, mode, iterations, seed, c0_ratio = args
    problem = convergence_problem(n)
    tree = initial_solution_tree(problem, c0_ratio * problem.c_opt)
    res = Planner(problem, convergence_config(mode, iterations, seed), tree=tree).run()
    out = np.empty(iterations + 1)
    out[0] = c0_ratio * problem.c_opt
    out[1:] = res.cost
    return out


def convergence_experiment(n, mode="infinite", trials=100, iterations=200, seed=0, c0_ratio=1.4,
                           workers=1):
    """Run Informed RRT* ``trials`` times from a common initial solution on an obstacle-free world.

    Trial k uses seed ``seed + k``. Returns the per-trial cost curves with the
    lower-bound prediction.
    """
    if trials < 10:
        raise ValueError("need at least 10 trials")
    jobs = [(n, mode, iterations, seed + k, c0_ratio) for k in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_convergence_trial, jobs, chunksize=8))
    else:
        rows = [_convergence_trial(j) for j in jobs]
    costs = np.vstack(rows)
    improving = int(np.count_nonzero(np.diff(costs, axis=1) < 0))
    if improving < 100:
        raise InsufficientData(f"only {improving} improving iterations across all trials")
    predicted = predicted_costs(n, c0_ratio, 1.0, iterations)
    return RateReport(n, mode, 1.0, costs, predicted, improving)
