"""Command-line front end: ``informed-rrt {plan,bench,rates,converge,sample-bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import analysis
from .bench import KINDS, BenchConfig, run_benchmark, sample_bench
from .planner import VARIANTS, PlannerConfig, plan
from .worlds import ProblemInstance, grid_world, toy_world


def _int_list(text):
    return [int(v) for v in text.split(",") if v]


def _problem(args):
    if args.problem:
        return ProblemInstance.load(args.problem)
    if args.world == "grid":
        return grid_world(args.dim)
    return toy_world(args.dim, args.width, args.obstacle)


def cmd_plan(args):
    problem = _problem(args)
    cfg = PlannerConfig.for_variant(args.variant, eta=args.eta, max_time=args.time,
                                    max_iterations=args.iterations, seed=args.seed,
                                    rewire_mode=args.rewire, goal_bias=args.goal_bias)
    res = plan(problem, cfg)
    out = {"variant": args.variant, "cost": res.best_cost if res.solved else None,
           "c_opt": problem.c_opt, "iterations": res.counters["iterations"],
           "wall_time_s": float(res.wall_time[-1]) if res.wall_time.size else 0.0,
           "vertices": res.counters["vertices"],
           "path": None if res.path is None else res.path.tolist()}
    print(json.dumps(out, indent=None if args.compact else 2))
    return 0


def cmd_bench(args):
    overrides = {"kind": args.kind, "dims": _int_list(args.dims) if args.dims else None,
                 "variants": args.variants.split(",") if args.variants else None,
                 "trials": args.trials, "seed": args.seed, "out_dir": args.out,
                 "full_scale": True if args.full_scale else None, "workers": args.workers,
                 "iterations": args.iterations}
    if args.budget is not None:
        overrides["budgets"] = {str(n): args.budget for n in (overrides["dims"] or [2])}
    if args.config:
        cfg = BenchConfig.from_file(args.config, **overrides)
    else:
        cfg = BenchConfig(**{k: v for k, v in overrides.items() if v is not None})
    run_benchmark(cfg)
    print(f"results written to {cfg.out_dir}")
    return 0


def cmd_rates(args):
    print(f"{'n':>3} {'rejection_bound':>16} {'rrtstar':>8} {'reject':>10} {'informed':>9}")
    for n in _int_list(args.dims):
        r = analysis.rate_bounds(n)
        print(f"{n:>3} {analysis.rejection_bound(n):>16.6g} {r['rrtstar']:>8.4f} "
              f"{r['reject']:>10.6f} {r['informed']:>9.6f}")
    if args.cost is not None:
        print()
        print(f"{'n':>3} {'E[next cost] lower bound':>25}  (c={args.cost}, c_min={args.c_min})")
        for n in _int_list(args.dims):
            print(f"{n:>3} {analysis.expected_next_cost_lower(n, args.cost, args.c_min):>25.6f}")
    return 0


def cmd_converge(args):
    rep = analysis.convergence_experiment(args.dim, args.mode, args.trials, args.iterations, args.seed,
                                          workers=args.workers)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    rep.to_csv(path)
    print(f"fitted rate {rep.fitted_rate:.4f} (best-case bound {rep.theoretical_rate:.4f}); "
          f"{rep.improving_iterations} improving iterations; CSV at {path}")
    return 0


def cmd_sample_bench(args):
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sample_bench(_int_list(args.dims), args.samples, c_min=args.c_min, c=args.cost,
                        time_cap=args.cap, seed=args.seed, path=path)
    for r in rows:
        per = r["per_sample_s"]
        per_txt = "n/a" if math.isinf(per) else f"{per:.3g}"
        print(f"n={r['dimension']:>2} {r['method']:<9} per-sample {per_txt:>9} s  "
              f"acceptance {r['acceptance']:.3g} (expected {r['expected_acceptance']:.3g})")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="informed-rrt", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="single planner run; prints path and cost as JSON")
    sp.add_argument("--problem", help="problem instance JSON file")
    sp.add_argument("--world", choices=["toy", "grid"], default="toy")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--width", type=float, default=2.0, help="toy map width")
    sp.add_argument("--obstacle", type=float, default=0.4, help="toy obstacle width")
    sp.add_argument("--variant", choices=sorted(VARIANTS), default="informed")
    sp.add_argument("--eta", type=float, default=0.3)
    sp.add_argument("--rewire", choices=["radius", "knearest", "all"], default="radius")
    sp.add_argument("--goal-bias", type=float, default=0.05)
    sp.add_argument("--time", type=float, default=None, help="time budget in seconds")
    sp.add_argument("--iterations", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--compact", action="store_true", help="single-line JSON")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("bench", help="experiment sweeps writing raw and aggregate CSV")
    sp.add_argument("--config", help="JSON settings file; flags override it")
    sp.add_argument("--kind", choices=KINDS)
    sp.add_argument("--dims", help="comma-separated dimensions")
    sp.add_argument("--variants", help="comma-separated variant names")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=float, help="time budget (s) for every dimension")
    sp.add_argument("--iterations", type=int, help="iteration budget instead of time")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--full-scale", action="store_true", help="100 trials and the long budgets")
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("rates", help="print rejection bounds and convergence-rate tables")
    sp.add_argument("--dims", default="2,3,4,6,8,12,16")
    sp.add_argument("--cost", type=float, help="also print the expected next cost at this cost")
    sp.add_argument("--c-min", type=float, default=1.0)
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("converge", help="convergence-rate experiment from a common initial solution")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--mode", choices=analysis.CONVERGENCE_MODES, default="infinite")
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--iterations", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", default="converge.csv")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("sample-bench", help="direct vs rejection spheroid sampling time")
    sp.add_argument("--dims", default="2,4,6,8,10,12,14,16")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--c-min", type=float, default=1.0)
    sp.add_argument("--cost", type=float, default=1.2)
    sp.add_argument("--cap", type=float, default=10.0, help="rejection wall-time cap per dimension (s)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="sample_bench.csv")
    sp.set_defaults(func=cmd_sample_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "plan" and args.time is None and args.iterations is None:
        args.time = 1.0
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except analysis.InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
