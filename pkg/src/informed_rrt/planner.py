"""RRT* and its focused variants: pruning, heuristic rejection, and Informed RRT*."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import make_rng, unit_ball_measure
from .sampling import InformedSampler, SamplingError, sample_informed

GOAL_TOL = 1e-9
RESOLUTION = 0.002  # collision checkpoint spacing as a fraction of eta

VARIANTS = {
    "rrtstar": {},
    "prune": {"graph_pruning": True},
    "reject_x_new": {"reject_x_new": True},
    "reject_x_rand": {"reject_x_rand": True},
    "combined": {"graph_pruning": True, "reject_x_rand": True, "reject_x_new": True},
    "informed": {"informed_sampling": True, "graph_pruning": True},
}
REJECTION_VARIANTS = ("reject_x_new", "reject_x_rand", "combined")


@dataclass
class PlannerConfig:
    """Tuning and variant flags for one planner run.

    ``rewire_mode`` is ``"radius"`` (r-disc), ``"knearest"``, or ``"all"`` (every
    vertex is a neighbour; the infinite-neighbourhood setting). A budget of
    ``max_iterations`` and/or ``max_time`` seconds must be given.
    """

    eta: float = 0.3
    rewire_mode: str = "radius"
    rewire_scale: float = 2.0
    goal_bias: float = 0.05
    goal_bias_after_solution: bool = False
    prune_threshold: float = 0.05
    informed_sampling: bool = False
    graph_pruning: bool = False
    reject_x_rand: bool = False
    reject_x_new: bool = False
    max_iterations: int | None = None
    max_time: float | None = None
    target_cost: float | None = None
    seed: int = 0
    retry_cap: int = 10**6

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.rewire_mode not in ("radius", "knearest", "all"):
            raise ValueError(f"unknown rewire mode {self.rewire_mode!r}")
        if not self.rewire_scale > 1:
            raise ValueError("rewire_scale must exceed 1")
        if not 0.0 <= self.goal_bias < 1.0:
            raise ValueError("goal_bias must be in [0, 1)")
        if self.max_iterations is None and self.max_time is None:
            raise ValueError("a budget (max_iterations and/or max_time) is required")
        if (self.max_iterations is not None and self.max_iterations < 1) or (
                self.max_time is not None and self.max_time <= 0):
            raise ValueError("budget must be positive")

    @classmethod
    def for_variant(cls, name, **kwargs):
        if name not in VARIANTS:
            raise ValueError(f"unknown variant {name!r}; choose from {sorted(VARIANTS)}")
        return cls(**{**VARIANTS[name], **kwargs})

    @property
    def variant(self):
        flags = {k: getattr(self, k) for k in ("informed_sampling", "graph_pruning", "reject_x_rand", "reject_x_new")}
        for name, on in VARIANTS.items():
            if flags == {k: on.get(k, False) for k in flags}:
                return name
        return "custom"

    @property
    def spacing(self):
        return RESOLUTION * self.eta


class Tree:
    """RRT* tree stored in flat arrays; vertex 0 is the root.

    ``heuristic`` holds each vertex's f_hat value so pruning never recomputes it.
    """

    def __init__(self, root, capacity=1024):
        root = np.asarray(root, dtype=float)
        self.dimension = root.shape[0]
        self.x = np.empty((capacity, self.dimension))
        self.cost = np.empty(capacity)
        self.heuristic = np.empty(capacity)
        self.x[0] = root
        self.cost[0] = 0.0
        self.heuristic[0] = 0.0
        self.parent = [-1]
        self.children = [[]]
        self.size = 1
        self.solution = []

    def __len__(self):
        return self.size

    @property
    def vertices(self):
        return self.x[: self.size]

    @property
    def costs(self):
        return self.cost[: self.size]

    def _grow(self):
        cap = 2 * self.x.shape[0]
        for name in ("x", "cost", "heuristic"):
            old = getattr(self, name)
            new = np.empty((cap,) + old.shape[1:])
            new[: self.size] = old[: self.size]
            setattr(self, name, new)

    def add(self, x, parent, cost, heuristic=0.0, is_goal=False):
        if self.size == self.x.shape[0]:
            self._grow()
        i = self.size
        self.x[i] = x
        self.cost[i] = cost
        self.heuristic[i] = heuristic
        self.parent.append(parent)
        self.children.append([])
        self.children[parent].append(i)
        self.size += 1
        if is_goal:
            self.solution.append(i)
        return i

    def subtree(self, v):
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children[u])
        return out

    def ancestors(self, v):
        out = set()
        v = self.parent[v]
        while v != -1:
            out.add(v)
            v = self.parent[v]
        return out

    def reparent(self, v, new_parent, new_cost):
        """Move v under new_parent and shift the costs of its whole subtree."""
        old = self.parent[v]
        self.children[old].remove(v)
        self.children[new_parent].append(v)
        self.parent[v] = new_parent
        delta = new_cost - self.cost[v]
        self.cost[self.subtree(v)] += delta

    def best_solution(self):
        """(cost, vertex) of the cheapest goal vertex, or (inf, -1)."""
        if not self.solution:
            return math.inf, -1
        sol = self.solution
        k = int(np.argmin(self.cost[sol]))
        return float(self.cost[sol[k]]), sol[k]

    def path_to(self, v):
        idx = []
        while v != -1:
            idx.append(v)
            v = self.parent[v]
        return self.x[idx[::-1]].copy()

    def compact(self, keep):
        """Drop vertices where ``keep`` is False (must be a subtree-closed complement)."""
        keep = np.asarray(keep, dtype=bool)
        old_idx = np.flatnonzero(keep)
        new_of = np.full(self.size, -1, dtype=np.int64)
        new_of[old_idx] = np.arange(old_idx.size)
        m = old_idx.size
        for name in ("x", "cost", "heuristic"):
            arr = getattr(self, name)
            arr[:m] = arr[old_idx]
        parent = [-1] * m
        children = [[] for _ in range(m)]
        for new, old in enumerate(old_idx.tolist()):
            p = self.parent[old]
            if p != -1:
                np_ = int(new_of[p])
                parent[new] = np_
                children[np_].append(new)
        self.parent = parent
        self.children = children
        self.solution = [int(new_of[s]) for s in self.solution if keep[s]]
        self.size = m
        return new_of

    def check(self, rtol=1e-9):
        """Raise AssertionError unless the tree is rooted, acyclic and cost-consistent."""
        assert self.parent[0] == -1 and self.cost[0] == 0.0
        seen = np.zeros(self.size, dtype=bool)
        for v in self.subtree(0):
            assert not seen[v], "cycle or shared child"
            seen[v] = True
        assert seen.all(), "vertices unreachable from the root"
        for v in range(1, self.size):
            p = self.parent[v]
            assert v in self.children[p]
            expect = self.cost[p] + float(np.linalg.norm(self.x[v] - self.x[p]))
            assert abs(self.cost[v] - expect) <= rtol * max(1.0, abs(expect)), (v, self.cost[v], expect)


def nearest(tree, x):
    """Index of the closest vertex (lowest index on ties)."""
    d = tree.vertices - x
    return int(np.argmin(np.einsum("ij,ij->i", d, d)))


def steer(v, x, eta):
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    d = x - v
    dist = math.sqrt(float(d @ d))
    if dist <= eta:
        return x.copy()
    return v + (eta / dist) * d


def rewire_radius(n, measure, card, scale):
    """Scaled r-disc radius; pass the informed-set measure bound and vertex count in informed mode."""
    if card < 2:
        raise ValueError("rewiring radius needs at least 2 vertices")
    if math.isinf(measure) or math.isinf(scale):
        return math.inf
    return scale * (2.0 * (1.0 + 1.0 / n) * (measure / unit_ball_measure(n)) * (math.log(card) / card)) ** (1.0 / n)


def rewire_k(n, card, scale):
    if card < 2:
        raise ValueError("k-nearest rewiring needs at least 2 vertices")
    return math.ceil(scale * math.e * (1.0 + 1.0 / n) * math.log(card))


def extend(tree, x_new, world, near, spacing, v_nearest, heuristic=0.0, is_goal=False):
    """Insert x_new under its cheapest collision-free parent and rewire ``near`` through it.

    ``near`` is an index array of neighbour vertices; the edge v_nearest -> x_new
    must already be known to be free. Returns (new index, number of rewirings).
    """
    x_new = np.asarray(x_new, dtype=float)
    near = np.asarray(near, dtype=np.int64)
    d_nearest = math.sqrt(float(((tree.x[v_nearest] - x_new) ** 2).sum()))
    best_parent = v_nearest
    best_cost = tree.cost[v_nearest] + d_nearest
    d_near = np.sqrt(np.einsum("ij,ij->i", tree.x[near] - x_new, tree.x[near] - x_new)) if near.size else np.zeros(0)
    if near.size:
        through = tree.cost[near] + d_near
        cand = np.flatnonzero(through < best_cost)
        if cand.size:
            order = cand[np.lexsort((near[cand], through[cand]))]
            for k in order:
                v = int(near[k])
                if world.segment_free(tree.x[v], x_new, spacing):
                    best_parent = v
                    best_cost = float(through[k])
                    break
    new = tree.add(x_new, best_parent, best_cost, heuristic, is_goal)

    rewired = 0
    if near.size:
        via = best_cost + d_near
        cand = np.flatnonzero(via < tree.cost[near])
        if cand.size:
            order = cand[np.lexsort((near[cand], via[cand]))]
            ancestors = tree.ancestors(new)
            for k in order:
                v = int(near[k])
                if v in ancestors or v == new:
                    continue
                c_via = best_cost + float(d_near[k])
                if not c_via < tree.cost[v]:
                    continue
                if world.segment_free(x_new, tree.x[v], spacing):
                    tree.reparent(v, new, c_via)
                    rewired += 1
    return new, rewired


def prune(tree, c):
    """Iteratively remove leaves with f_hat > c; returns the number of removed vertices.

    A vertex survives iff it or one of its descendants has f_hat <= c, which is
    the fixpoint of repeated leaf removal. Goal vertices are always kept: on a
    straight-line solution their f_hat can exceed c by a rounding error.
    """
    if math.isinf(c):
        return 0
    keep = tree.heuristic[: tree.size] <= c
    keep[0] = True
    keep[tree.solution] = True
    parent = tree.parent
    for v in np.flatnonzero(keep).tolist():
        p = parent[v]
        while p != -1 and not keep[p]:
            keep[p] = True
            p = parent[p]
    removed = int(tree.size - keep.sum())
    if removed:
        tree.compact(keep)
    return removed


@dataclass
class PlanResult:
    """Per-iteration record of a planner run plus the final best path."""

    iterations: np.ndarray
    wall_time: np.ndarray
    cost: np.ndarray
    path: np.ndarray | None
    counters: dict = field(default_factory=dict)
    config: PlannerConfig | None = None

    @property
    def best_cost(self):
        return float(self.cost[-1]) if self.cost.size else math.inf

    @property
    def solved(self):
        return math.isfinite(self.best_cost)

    def time_to(self, threshold):
        """Wall time (s) of the first record with cost < threshold, else inf."""
        hit = np.flatnonzero(self.cost < threshold)
        return float(self.wall_time[hit[0]]) if hit.size else math.inf

    def iteration_to(self, threshold):
        hit = np.flatnonzero(self.cost < threshold)
        return int(self.iterations[hit[0]]) if hit.size else None


class Planner:
    """One planner run on a problem instance; see :func:`plan`.

    ``tree`` may be supplied to start from an existing (e.g. already solved) tree.
    ``callback(planner, info)`` is called after every iteration for auditing.
    """

    def __init__(self, problem, config, tree=None, rng=None, callback=None):
        self.problem = problem
        self.config = config
        self.world = problem.world
        self.start = problem.x_start
        self.goals = problem.goals
        self.n = problem.dimension
        self._single_goal = self.goals[0] if len(self.goals) == 1 else None
        self.rng = make_rng(config.seed) if rng is None else rng
        self.callback = callback
        self.spacing = config.spacing if math.isfinite(config.eta) else RESOLUTION * float(
            np.linalg.norm(self.world.upper - self.world.lower))
        self.sampler = InformedSampler(self.start, self.goals, self.world.lower, self.world.upper,
                                       is_valid=self.world.point_free, retry_cap=config.retry_cap)
        if tree is None:
            tree = Tree(self.start)
            tree.heuristic[0] = self.heuristic(self.start)
        self.tree = tree
        self.counters = {"samples": 0, "rejected": 0, "rewirings": 0, "pruned": 0, "added": 0,
                         "collisions": 0, "sampling_failures": 0}
        self._prune_ref = math.inf
        self._informed_cost = None
        self._n_informed = 0

    def heuristic(self, x):
        d = x - self.start
        if self._single_goal is not None:
            e = self._single_goal - x
            return math.sqrt(float(d @ d)) + math.sqrt(float(e @ e))
        return math.sqrt(float(d @ d)) + float(np.min(np.linalg.norm(self.goals - x, axis=1)))

    # -- sampling -----------------------------------------------------------
    def _sample_domain(self):
        return self.rng.uniform(self.world.lower, self.world.upper)

    def _sample_rejecting(self, c):
        """Uniform domain samples, one at a time, until one has f_hat < c."""
        w = self.world
        if not np.any(self.sampler.measures(c) > 0.0):
            raise SamplingError(f"informed set is empty at cost {c}")
        for k in range(self.config.retry_cap):
            x = self.rng.uniform(w.lower, w.upper)
            if self.heuristic(x) < c:
                self.counters["rejected"] += k
                return x
        self.counters["rejected"] += self.config.retry_cap
        raise SamplingError(f"rejection sampling found nothing below cost {c}")

    def sample(self, c):
        cfg = self.config
        if cfg.goal_bias > 0.0 and (math.isinf(c) or cfg.goal_bias_after_solution):
            if self.rng.random() < cfg.goal_bias:
                return self.goals[int(self.rng.integers(len(self.goals)))].copy()
        if math.isfinite(c):
            if cfg.informed_sampling:
                return sample_informed(self.sampler, c, self.rng)
            if cfg.reject_x_rand:
                return self._sample_rejecting(c)
        return self._sample_domain()

    # -- neighbourhood ------------------------------------------------------
    def _update_informed_count(self, c):
        if c != self._informed_cost:
            self._informed_cost = c
            self._n_informed = int(np.count_nonzero(self.tree.heuristic[: self.tree.size] < c))

    def _neighbourhood_size(self, c, new_in_informed):
        """(measure, card) used in the rewiring formulas."""
        if self.config.informed_sampling and math.isfinite(c):
            measure = min(self.world.measure, float(np.sum(self.sampler.measures(c))))
            card = self._n_informed + (1 if new_in_informed else 0)
        else:
            measure = self.world.measure
            card = self.tree.size + 1
        return measure, card

    def near(self, d2, c, new_in_informed):
        cfg = self.config
        if cfg.rewire_mode == "all":
            return np.arange(self.tree.size)
        measure, card = self._neighbourhood_size(c, new_in_informed)
        if cfg.rewire_mode == "radius":
            r = cfg.eta if card < 2 else min(cfg.eta, rewire_radius(self.n, measure, card, cfg.rewire_scale))
            return np.flatnonzero(d2 <= r * r)
        k = 1 if card < 2 else rewire_k(self.n, card, cfg.rewire_scale)
        k = min(k, d2.size)
        return np.sort(np.argsort(d2, kind="stable")[:k])

    # -- main loop ----------------------------------------------------------
    def step(self, c):
        """One iteration at current best cost ``c``; returns info for auditing."""
        cfg = self.config
        tree = self.tree
        info = {"added": None, "x_new": None}
        try:
            x_rand = self.sample(c)
        except SamplingError:
            self.counters["sampling_failures"] += 1
            return info
        self.counters["samples"] += 1
        diff = tree.vertices - x_rand
        d2 = np.einsum("ij,ij->i", diff, diff)
        v_nearest = int(np.argmin(d2))
        dist = math.sqrt(float(d2[v_nearest]))
        if dist == 0.0:
            return info
        clamped = dist > cfg.eta
        x_new = tree.x[v_nearest] + (cfg.eta / dist) * (x_rand - tree.x[v_nearest]) if clamped else x_rand
        h_new = self.heuristic(x_new)
        if cfg.reject_x_new and math.isfinite(c) and not h_new < c:
            self.counters["rejected"] += 1
            return info
        if not self.world.segment_free(tree.x[v_nearest], x_new, self.spacing):
            self.counters["collisions"] += 1
            return info
        if clamped:
            diff = tree.vertices - x_new
            d2 = np.einsum("ij,ij->i", diff, diff)
        in_informed = h_new < c
        nb = self.near(d2, c, in_informed)
        is_goal = float(np.min(np.linalg.norm(self.goals - x_new, axis=1))) <= GOAL_TOL
        new, rewired = extend(tree, x_new, self.world, nb, self.spacing, v_nearest, h_new, is_goal)
        if in_informed:
            self._n_informed += 1
        self.counters["added"] += 1
        self.counters["rewirings"] += rewired
        info.update(added=new, x_new=x_new, heuristic=h_new)
        return info

    def run(self):
        cfg = self.config
        it_rec, t_rec, c_rec = [], [], []
        t0 = time.perf_counter()
        max_it = cfg.max_iterations if cfg.max_iterations is not None else math.inf
        max_t = cfg.max_time if cfg.max_time is not None else math.inf
        it = 0
        c = self.tree.best_solution()[0]
        while it < max_it:
            now = time.perf_counter() - t0
            if now >= max_t:
                break
            it += 1
            if cfg.graph_pruning and c < (1.0 - cfg.prune_threshold) * self._prune_ref:
                removed = prune(self.tree, c)
                self.counters["pruned"] += removed
                self._prune_ref = c
                self._informed_cost = None
            if cfg.informed_sampling:
                self._update_informed_count(c)
            info = self.step(c)
            c_next = self.tree.best_solution()[0]
            if self.callback is not None:
                info["cost_before"] = c
                info["cost_after"] = c_next
                info["iteration"] = it
                self.callback(self, info)
            c = c_next
            it_rec.append(it)
            t_rec.append(time.perf_counter() - t0)
            c_rec.append(c)
            if cfg.target_cost is not None and c < cfg.target_cost:
                break
        cost, v = self.tree.best_solution()
        path = self.tree.path_to(v) if v >= 0 else None
        counters = dict(self.counters, vertices=self.tree.size, iterations=it)
        return PlanResult(np.asarray(it_rec, dtype=np.int64), np.asarray(t_rec), np.asarray(c_rec),
                          path, counters, cfg)


def plan(problem, config, tree=None, callback=None):
    """Run the configured RRT* variant on ``problem`` until its budget is spent."""
    return Planner(problem, config, tree=tree, callback=callback).run()


def with_budget(config, **kwargs):
    return replace(config, **kwargs)
