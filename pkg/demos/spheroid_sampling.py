"""Direct spheroid sampling versus rejection from the bounding box.

Draws the same number of accepted points both ways and prints how many box
draws rejection needed, alongside the closed-form acceptance rate.

    python3 demos/spheroid_sampling.py
"""
import time

import numpy as np

from informed_rrt import ProlateHyperspheroid, make_rng, rejection_bound, sample_phs
from informed_rrt.geometry import sample_tight_rectangle

rng = make_rng(0)
wanted = 20_000
print(f"{'n':>3} {'direct s':>10} {'rejection s':>12} {'box draws':>11} {'acceptance':>11} {'closed form':>12}")
for n in (2, 4, 6, 8):
    phs = ProlateHyperspheroid(np.zeros(n), np.eye(n)[0], 1.2)

    t0 = time.perf_counter()
    sample_phs(phs, rng, wanted)
    direct = time.perf_counter() - t0

    t0 = time.perf_counter()
    kept, draws = 0, 0
    while kept < wanted:
        box = sample_tight_rectangle(phs, rng, 50_000)
        draws += len(box)
        kept += int(phs.contains(box).sum())
    rejection = time.perf_counter() - t0
    print(f"{n:>3} {direct:>10.4f} {rejection:>12.4f} {draws:>11} {kept / draws:>11.4f} {rejection_bound(n):>12.4f}")
