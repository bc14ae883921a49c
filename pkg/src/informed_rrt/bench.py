"""Benchmark sweeps over planner variants, CSV output and median confidence intervals."""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .analysis import rejection_bound
from .geometry import ProlateHyperspheroid, make_rng, sample_phs, sample_tight_rectangle
from .planner import VARIANTS, PlannerConfig, plan
from .worlds import grid_world, random_toy_world, toy_world

log = logging.getLogger(__name__)

ETA = {2: 0.3, 4: 0.5, 8: 0.9}
DESK_BUDGET = {2: 3.0, 4: 10.0, 8: 30.0}
FULL_BUDGET = {2: 3.0, 4: 30.0, 8: 150.0}
WIDTH_TOLERANCE = {2: 1.01, 4: 1.05, 8: 1.15}
KINDS = ("toy-tolerance", "map-width", "grid", "converge", "sample-bench")
RAW_HEADER = ["trial", "iteration", "wall_ms", "cost"]
AGG_HEADER = ["bucket_ms", "median_cost", "ci_lo", "ci_hi", "pct_solved"]


def _ci_ranks(count, level):
    """0-based order-statistic ranks (lo, hi) of a distribution-free CI on the median."""
    alpha = 1.0 - level
    # largest j with P(B <= j - 1) <= alpha / 2, B ~ Binomial(count, 1/2)
    j = int(stats.binom.ppf(alpha / 2.0, count, 0.5))
    while j > 0 and stats.binom.cdf(j - 1, count, 0.5) > alpha / 2.0:
        j -= 1
    while stats.binom.cdf(j, count, 0.5) <= alpha / 2.0:
        j += 1
    j = max(j, 1)
    return j - 1, count - j


def median_ci(values, level=0.99):
    """Sample median (lower middle for even counts) and an order-statistic CI.

    ``inf`` entries (unsolved trials) sort last.
    """
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("need at least one value")
    lo, hi = _ci_ranks(v.size, level)
    return float(v[(v.size - 1) // 2]), float(v[lo]), float(v[hi])


def median_ci_columns(table, level=0.99):
    """Column-wise median_ci of a (trials, buckets) array."""
    s = np.sort(table, axis=0)
    count = s.shape[0]
    lo, hi = _ci_ranks(count, level)
    return s[(count - 1) // 2], s[lo], s[hi]


@dataclass
class BenchConfig:
    """Settings for one sweep; ``None`` fields fall back to the per-dimension defaults."""

    kind: str = "toy-tolerance"
    dims: list = field(default_factory=lambda: [2])
    variants: list = field(default_factory=lambda: list(VARIANTS))
    trials: int | None = None
    seed: int = 0
    out_dir: str = "bench-out"
    budgets: dict | None = None
    eta: dict | None = None
    iterations: int | None = None
    full_scale: bool = False
    map_width: float = 2.0
    widths: list = field(default_factory=lambda: [2.0, 4.0, 8.0, 16.0])
    tolerances: list = field(default_factory=lambda: [1.01, 1.02, 1.05, 1.1, 1.15])
    obstacle_width: float | None = None
    time_bucket_ms: float = 1.0
    samples_per_dim: int = 10000
    sample_time_cap: float = 10.0
    converge_mode: str = "infinite"
    converge_iterations: int = 200
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.trials is None:
            self.trials = 100 if self.full_scale else 30
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        unknown = set(self.variants) - set(VARIANTS)
        if unknown:
            raise ValueError(f"unknown variants {sorted(unknown)}")
        self.dims = [int(n) for n in self.dims]
        base = FULL_BUDGET if self.full_scale else DESK_BUDGET
        budgets = {int(k): float(v) for k, v in (self.budgets or {}).items()}
        eta = {int(k): float(v) for k, v in (self.eta or {}).items()}
        for n in self.dims:
            budgets.setdefault(n, base.get(n, 3.0 * n))
            eta.setdefault(n, ETA.get(n, 0.1 * n + 0.1))
            if budgets[n] <= 0 or eta[n] <= 0:
                raise ValueError("budgets and eta must be positive")
        self.budgets = budgets
        self.eta = eta

    @classmethod
    def from_file(cls, path, **overrides):
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_dict(self):
        d = asdict(self)
        d["budgets"] = {str(k): v for k, v in self.budgets.items()}
        d["eta"] = {str(k): v for k, v in self.eta.items()}
        return d


def _fmt(x):
    return "inf" if math.isinf(x) else repr(float(x))


def write_raw(path, trials):
    """trials: list of (trial index, PlanResult)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RAW_HEADER)
        for k, res in trials:
            for it, t, c in zip(res.iterations.tolist(), res.wall_time.tolist(), res.cost.tolist()):
                w.writerow([k, it, f"{1000.0 * t:.3f}", _fmt(c)])


def read_raw(path):
    """Return {trial: (wall_ms array, cost array)}."""
    out = {}
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        out.setdefault(int(r["trial"]), ([], []))
        out[int(r["trial"])][0].append(float(r["wall_ms"]))
        out[int(r["trial"])][1].append(float(r["cost"]))
    return {k: (np.asarray(t), np.asarray(c)) for k, (t, c) in out.items()}


def cost_at_times(wall_ms, cost, buckets):
    """Best cost recorded at or before each bucket time (inf before the first record)."""
    idx = np.searchsorted(wall_ms, buckets, side="right") - 1
    out = np.full(buckets.shape, math.inf)
    ok = idx >= 0
    out[ok] = cost[idx[ok]]
    return out


def aggregate(trial_curves, budget_ms, bucket_ms=1.0, level=0.99):
    """Rows of (bucket_ms, median, ci_lo, ci_hi, pct_solved) on a regular time grid."""
    buckets = np.arange(bucket_ms, budget_ms + 0.5 * bucket_ms, bucket_ms)
    table = np.vstack([cost_at_times(t, c, buckets) for t, c in trial_curves])
    med, lo, hi = median_ci_columns(table, level)
    solved = 100.0 * np.isfinite(table).mean(axis=0)
    return buckets, med, lo, hi, solved


def write_aggregate(path, rows):
    buckets, med, lo, hi, solved = rows
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGG_HEADER)
        for row in zip(buckets.tolist(), med.tolist(), lo.tolist(), hi.tolist(), solved.tolist()):
            w.writerow([f"{row[0]:g}", _fmt(row[1]), _fmt(row[2]), _fmt(row[3]), f"{row[4]:g}"])


def _instance(cfg, n, trial, width=None):
    wrng = make_rng([cfg.seed, trial, n, 7])
    if cfg.kind == "grid":
        return grid_world(n)
    l = cfg.map_width if width is None else width
    if cfg.kind == "map-width":
        w = 0.4 if cfg.obstacle_width is None else cfg.obstacle_width
        return toy_world(n, l, w)
    if cfg.obstacle_width is not None:
        return toy_world(n, l, cfg.obstacle_width)
    return random_toy_world(n, l, wrng)


def _trial(job):
    cfg, n, variant, k, width, target_ratio = job
    try:
        problem = _instance(cfg, n, k, width)
        target = None if target_ratio is None or problem.c_opt is None else target_ratio * problem.c_opt
        pc = PlannerConfig.for_variant(
            variant, eta=cfg.eta[n], max_time=None if cfg.iterations else cfg.budgets[n],
            max_iterations=cfg.iterations, target_cost=target, seed=cfg.seed + k)
        return k, problem, plan(problem, pc), None
    except Exception as exc:  # noqa: BLE001 - a failed trial must not stop the sweep
        return k, None, None, repr(exc)


def _run_group(cfg, n, variant, out, tag, width=None, target_ratio=None):
    """Run all trials of one group, writing raw rows as each trial completes."""
    jobs = [(cfg, n, variant, k, width, target_ratio) for k in range(cfg.trials)]
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    done = pool.map(_trial, jobs) if pool else map(_trial, jobs)
    results = []
    try:
        with open(out / f"raw_{tag}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(RAW_HEADER)
            for k, problem, res, err in done:
                if err is not None:
                    log.error("trial %d of %s failed: %s", k, tag, err)
                    continue
                for it, t, c in zip(res.iterations.tolist(), res.wall_time.tolist(), res.cost.tolist()):
                    w.writerow([k, it, f"{1000.0 * t:.3f}", _fmt(c)])
                fh.flush()
                results.append((k, problem, res))
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    if results:
        budget_ms = 1000.0 * cfg.budgets[n]
        if cfg.iterations:
            budget_ms = max(1000.0 * float(r.wall_time[-1]) for _, _, r in results if r.wall_time.size)
        rows = aggregate([(1000.0 * r.wall_time, r.cost) for _, _, r in results], budget_ms, cfg.time_bucket_ms)
        write_aggregate(out / f"agg_{tag}.csv", rows)
    return results


def _time_table(results, ratio):
    times = [r.time_to(ratio * p.c_opt) for _, p, r in results]
    if not times:
        return 0.0, math.inf, math.inf, math.inf
    med, lo, hi = median_ci(times)
    solved = 100.0 * np.isfinite(times).mean()
    return solved, med, lo, hi


def run_benchmark(cfg):
    """Run the sweep described by ``cfg``; returns {group tag: list of (trial, problem, result)}."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    if cfg.kind == "sample-bench":
        sample_bench(cfg.dims, cfg.samples_per_dim, time_cap=cfg.sample_time_cap, seed=cfg.seed,
                     path=out / "sample_bench.csv")
        return {}
    if cfg.kind == "converge":
        from .analysis import convergence_experiment

        for n in cfg.dims:
            rep = convergence_experiment(n, cfg.converge_mode, cfg.trials, cfg.converge_iterations, cfg.seed)
            rep.to_csv(out / f"converge_n{n}_{cfg.converge_mode}.csv")
        return {}
    groups = {}
    for n in cfg.dims:
        if cfg.kind == "toy-tolerance":
            rows = []
            for v in cfg.variants:
                tag = f"toy_n{n}_{v}"
                res = _run_group(cfg, n, v, out, tag, target_ratio=min(cfg.tolerances))
                groups[tag] = res
                for g in cfg.tolerances:
                    rows.append([v, g, *_time_table(res, g)])
            _write_table(out / f"tolerance_n{n}.csv", ["variant", "tolerance"], rows)
        elif cfg.kind == "map-width":
            rows = []
            ratio = WIDTH_TOLERANCE.get(n, 1.15)
            for v in cfg.variants:
                for l in cfg.widths:
                    tag = f"width_n{n}_l{l:g}_{v}"
                    res = _run_group(cfg, n, v, out, tag, width=l, target_ratio=ratio)
                    groups[tag] = res
                    rows.append([v, l, *_time_table(res, ratio)])
            _write_table(out / f"widths_n{n}.csv", ["variant", "width"], rows)
        else:
            for v in cfg.variants:
                tag = f"grid_n{n}_{v}"
                groups[tag] = _run_group(cfg, n, v, out, tag)
    return groups


def _write_table(path, keys, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys + ["pct_solved", "median_time_s", "ci_lo", "ci_hi"])
        for r in rows:
            w.writerow(list(r[: len(keys)]) + [f"{r[-4]:g}", _fmt(r[-3]), _fmt(r[-2]), _fmt(r[-1])])


def rejection_acceptance(n, attempts, rng, c_min=1.0, c=1.2):
    """Fraction of tight-box samples that land inside the spheroid."""
    phs = ProlateHyperspheroid(np.zeros(n), np.eye(n)[0] * c_min, c)
    hits = 0
    left = attempts
    while left:
        m = min(left, 200_000)
        hits += int(np.count_nonzero(phs.contains(sample_tight_rectangle(phs, rng, m))))
        left -= m
    return hits / attempts


def sample_bench(dims, samples_per_dim, c_min=1.0, c=1.2, time_cap=10.0, seed=0, path=None, batch=100_000):
    """Per-sample cost of direct spheroid sampling vs tight-box rejection sampling.

    Both methods run vectorised in batches. Rejection stops early once it has
    used ``time_cap`` seconds at a dimension. Returns a list of row dicts.
    """
    rng = make_rng(seed)
    rows = []
    for n in dims:
        if n < 2:
            raise ValueError("dimensions must be >= 2")
        a = np.zeros(n)
        b = a.copy()
        b[0] = c_min
        phs = ProlateHyperspheroid(a, b, c)
        t0 = time.perf_counter()
        done = 0
        while done < samples_per_dim:
            m = min(batch, samples_per_dim - done)
            sample_phs(phs, rng, m)
            done += m
        dt = time.perf_counter() - t0
        rows.append({"dimension": n, "method": "direct", "samples": done, "attempts": done,
                     "seconds": dt, "per_sample_s": dt / done, "acceptance": 1.0, "expected_acceptance": 1.0,
                     "complete": True})
        t0 = time.perf_counter()
        got = attempts = 0
        while got < samples_per_dim and time.perf_counter() - t0 < time_cap:
            x = sample_tight_rectangle(phs, rng, batch)
            got += int(np.count_nonzero(phs.contains(x)))
            attempts += batch
        dt = time.perf_counter() - t0
        rows.append({"dimension": n, "method": "rejection", "samples": got, "attempts": attempts,
                     "seconds": dt, "per_sample_s": dt / got if got else math.inf,
                     "acceptance": got / attempts if attempts else math.nan,
                     "expected_acceptance": rejection_bound(n), "complete": got >= samples_per_dim})
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return rows
