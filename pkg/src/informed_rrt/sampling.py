"""The L2 heuristic and samplers for the informed set of one or many goals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ProlateHyperspheroid, sample_phs

DEFAULT_RETRY_CAP = 10**6


class SamplingError(RuntimeError):
    """Raised when an informed set cannot be sampled (empty, or the retry cap was hit)."""


def f_hat(x, x_start, x_goal):
    """Focal-sum heuristic ||x - x_start|| + ||x_goal - x||; vectorised over rows of x."""
    x = np.asarray(x, dtype=float)
    return np.linalg.norm(x - x_start, axis=-1) + np.linalg.norm(x_goal - x, axis=-1)


def goal_set(goals):
    """Validate a list of goal states and return it as an (m, n) array."""
    g = np.atleast_2d(np.asarray(goals, dtype=float))
    if g.shape[0] == 0:
        raise ValueError("goal set is empty")
    if not np.all(np.isfinite(g)):
        raise ValueError("goal states must be finite")
    if len({tuple(row) for row in g}) != g.shape[0]:
        raise ValueError("goal set contains duplicates")
    return g


class InformedSampler:
    """Uniform sampler of the (multi-goal) L2 informed set intersected with a box domain.

    ``is_valid`` is an optional extra membership test (e.g. obstacle-free) applied
    to every returned sample; domain bounds are always enforced.
    """

    def __init__(self, x_start, goals, lower, upper, is_valid=None, retry_cap=DEFAULT_RETRY_CAP):
        self.x_start = np.asarray(x_start, dtype=float)
        self.goals = goal_set(goals)
        if self.goals.shape[1] != self.x_start.shape[0]:
            raise ValueError("goal and start dimensions differ")
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.domain_measure = float(np.prod(self.upper - self.lower))
        self.is_valid = is_valid
        self.retry_cap = retry_cap
        self._base = [ProlateHyperspheroid(self.x_start, g, math.inf) for g in self.goals]
        self.c_mins = np.array([p.c_min for p in self._base])
        self._cost = None
        self._phs = []
        self._measures = np.zeros(len(self._base))

    @property
    def dimension(self):
        return self.x_start.shape[0]

    @property
    def n_goals(self):
        return self.goals.shape[0]

    def set_cost(self, c):
        """Refresh per-goal spheroids for cost ``c``; goals with c <= c_min get measure 0."""
        c = float(c)
        if c == self._cost:
            return
        self._cost = c
        self._phs = []
        for j, base in enumerate(self._base):
            if math.isinf(c):
                self._phs.append(base)
                self._measures[j] = math.inf
            elif c > base.c_min:
                phs = base.with_cost(c)
                self._phs.append(None if phs.degenerate else phs)
                self._measures[j] = 0.0 if phs.degenerate else phs.measure
            else:
                self._phs.append(None)
                self._measures[j] = 0.0

    def measures(self, c):
        self.set_cost(c)
        return self._measures.copy()

    def membership_count(self, x, c):
        """Number of per-goal informed sets containing x (strict f_hat < c)."""
        return int(np.count_nonzero(self._fhat_all(np.asarray(x, dtype=float)) < c))

    def _fhat_all(self, x):
        return np.linalg.norm(x - self.x_start) + np.linalg.norm(self.goals - x, axis=1)

    def heuristic(self, x):
        """Multi-goal heuristic: min over goals of the focal sum."""
        return float(self._fhat_all(x).min())

    def in_domain(self, x):
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def _acceptable(self, x):
        if not self.in_domain(x):
            return False
        return self.is_valid is None or bool(self.is_valid(x))

    def sample_domain(self, rng):
        return rng.uniform(self.lower, self.upper)


def random_goal(sampler, c, rng):
    """Pick a goal index with probability proportional to its spheroid measure."""
    m = sampler.measures(c)
    if math.isinf(c):
        return int(rng.integers(sampler.n_goals))
    positive = np.flatnonzero(m > 0.0)
    if positive.size == 0:
        raise SamplingError(f"no goal has a non-empty informed set at cost {c}")
    if positive.size == 1:
        return int(positive[0])
    cum = np.cumsum(m[positive])
    p = rng.random() * cum[-1]
    k = int(np.searchsorted(cum, p, side="left"))
    return int(positive[min(k, positive.size - 1)])


def keep_sample(x, sampler, c, rng):
    """Accept x with probability 1/a, a = number of per-goal informed sets containing x."""
    a = sampler.membership_count(x, c)
    if a == 0:
        raise ValueError("sample lies in none of the per-goal informed sets")
    return a == 1 or rng.random() <= 1.0 / a


def sample_informed(sampler, c, rng):
    """Uniform sample of domain ∩ (union of per-goal spheroids for cost c).

    Samples the spheroids directly while their average measure is below the domain
    measure, otherwise samples the domain and rejects. ``c = inf`` gives a plain
    domain sample.
    """
    if math.isinf(c):
        while True:
            x = sampler.sample_domain(rng)
            if sampler.is_valid is None or sampler.is_valid(x):
                return x
    sampler.set_cost(c)
    m = sampler._measures
    if not np.any(m > 0.0):
        raise SamplingError(f"informed set is empty at cost {c}")
    direct = m.mean() < sampler.domain_measure
    if direct and sampler.n_goals == 1:
        # one goal: no goal choice or multiplicity correction, same random stream
        phs = sampler._phs[0]
        for _ in range(sampler.retry_cap):
            x = sample_phs(phs, rng)
            if sampler._acceptable(x) and phs.focal_sum(x) < c:
                return x
        raise SamplingError(f"no informed sample after {sampler.retry_cap} attempts at cost {c}")
    for _ in range(sampler.retry_cap):
        if direct:
            j = random_goal(sampler, c, rng)
            x = sample_phs(sampler._phs[j], rng)
        else:
            x = sampler.sample_domain(rng)
        if not sampler._acceptable(x):
            continue
        if sampler.membership_count(x, c) == 0:
            continue
        if keep_sample(x, sampler, c, rng):
            return x
    raise SamplingError(f"no informed sample after {sampler.retry_cap} attempts at cost {c}")


def sample_with_goal_bias(sample, goals, bias, rng):
    """Return an exact goal with probability ``bias``, otherwise ``sample()``."""
    if bias > 0.0 and rng.random() < bias:
        return np.array(goals[int(rng.integers(len(goals)))], dtype=float), True
    return sample(), False


@dataclass
class PrecisionRecall:
    precision: float
    precision_se: float
    recall: float
    recall_se: float
    samples: int


def informed_set_precision_recall(in_informed, in_omniscient, lower, upper, rng, budget=100_000):
    """Monte Carlo precision and recall of an informed set against the omniscient set.

    Both membership functions take an (m, n) array and return a boolean array.
    Uniform samples over the box [lower, upper] must cover both sets. Ratios with
    a zero denominator come back as ``nan``.
    """
    if budget < 1000:
        raise ValueError("budget must be at least 1000 samples")
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x = rng.uniform(lower, upper, size=(budget, lower.shape[0]))
    inf_mask = np.asarray(in_informed(x), dtype=bool)
    omni_mask = np.asarray(in_omniscient(x), dtype=bool)
    both = np.count_nonzero(inf_mask & omni_mask)
    n_inf = np.count_nonzero(inf_mask)
    n_omni = np.count_nonzero(omni_mask)

    def ratio(k, total):
        if total == 0:
            return math.nan, math.nan
        p = k / total
        return p, math.sqrt(p * (1.0 - p) / total)

    prec, prec_se = ratio(both, n_inf)
    rec, rec_se = ratio(both, n_omni)
    return PrecisionRecall(prec, prec_se, rec, rec_se, budget)
