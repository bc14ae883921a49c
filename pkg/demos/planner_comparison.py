"""Run every planner variant on one toy world and report time to near-optimal.

    python3 demos/planner_comparison.py [--dim 2] [--width 4] [--budget 2]
"""
import argparse

from informed_rrt import VARIANTS, PlannerConfig, plan, toy_world

parser = argparse.ArgumentParser()
parser.add_argument("--dim", type=int, default=2)
parser.add_argument("--width", type=float, default=4.0)
parser.add_argument("--budget", type=float, default=2.0)
parser.add_argument("--seed", type=int, default=1)
args = parser.parse_args()

problem = toy_world(args.dim, args.width, 0.4)
target = 1.02 * problem.c_opt
print(f"toy world n={args.dim} width={args.width:g}, optimum {problem.c_opt:.4f}, target {target:.4f}")
for name in VARIANTS:
    cfg = PlannerConfig.for_variant(name, eta=0.3, max_time=args.budget, seed=args.seed)
    res = plan(problem, cfg)
    first = res.time_to(float("inf"))
    print(f"{name:>14}: best {res.best_cost:.4f}  first solution {first:.3f} s  "
          f"target {res.time_to(target):.3f} s  vertices {res.counters['vertices']}")
