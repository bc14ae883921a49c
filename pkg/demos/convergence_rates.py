"""Compare measured cost decay against the one-step bound with every vertex rewired.

    python3 demos/convergence_rates.py [--dim 4] [--trials 200]
"""
import argparse

from informed_rrt import convergence_experiment, rate_bounds

parser = argparse.ArgumentParser()
parser.add_argument("--dim", type=int, default=4)
parser.add_argument("--trials", type=int, default=200)
parser.add_argument("--iterations", type=int, default=100)
args = parser.parse_args()

rep = convergence_experiment(args.dim, "infinite", trials=args.trials, iterations=args.iterations, seed=0)
print("iteration  mean error   bound error")
for i in (0, 1, 2, 5, 10, 20, 40):
    if i <= args.iterations:
        print(f"{i:>9}  {rep.mean_error[i]:.3e}  {rep.predicted_error[i]:.3e}")
bounds = rate_bounds(args.dim)
print(f"fitted rate {rep.fitted_rate:.3f}; informed bound {bounds['informed']:.3f}, "
      f"rejection bound {bounds['reject']:.3f}, RRT* {bounds['rrtstar']:.3f}")
