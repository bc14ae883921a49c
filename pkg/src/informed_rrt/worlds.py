"""Box domains with axis-aligned box obstacles, collision queries and the benchmark worlds."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .sampling import goal_set


@dataclass(frozen=True)
class Lattice:
    """An implicit, unbounded regular pattern of axis-aligned cubes.

    Cube centres sit at ``offset + k * period`` on every axis; ``width`` is the
    cube edge length. Stored implicitly because the cube count grows as
    (l / period)^n.
    """

    period: float
    width: float
    offset: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.width < self.period):
            raise ValueError("lattice cube width must lie in (0, period)")

    def inside(self, pts):
        """Strict interior test for an (m, n) array of points."""
        u = np.mod(pts - self.offset, self.period)
        d = np.minimum(u, self.period - u)
        return np.all(d < 0.5 * self.width, axis=-1)


@dataclass(frozen=True)
class World:
    """Hyperrectangular domain with box obstacles; obstacle boundaries count as free."""

    lower: np.ndarray
    upper: np.ndarray
    box_lower: np.ndarray = None
    box_upper: np.ndarray = None
    lattice: Lattice | None = None
    measure: float = field(init=False)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 1:
            raise ValueError("domain bounds must be 1-d vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
            raise ValueError("domain bounds must be finite with lower < upper")
        n = lo.size
        blo = np.zeros((0, n)) if self.box_lower is None else np.atleast_2d(np.asarray(self.box_lower, dtype=float))
        bhi = np.zeros((0, n)) if self.box_upper is None else np.atleast_2d(np.asarray(self.box_upper, dtype=float))
        if blo.shape != bhi.shape or blo.shape[1] != n:
            raise ValueError("obstacle corner arrays must both be (m, n)")
        if np.any(blo >= bhi):
            raise ValueError("obstacle boxes need lower < upper on every axis")
        if np.any(blo < lo) or np.any(bhi > hi):
            raise ValueError("obstacles must lie within the domain")
        for name, val in (("lower", lo), ("upper", hi), ("box_lower", blo), ("box_upper", bhi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "measure", float(np.prod(hi - lo)))

    @property
    def dimension(self):
        return self.lower.size

    @property
    def n_boxes(self):
        return self.box_lower.shape[0]

    def in_domain(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=-1)

    def points_free(self, pts):
        """Vectorised point_free over an (m, n) array."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        free = self.in_domain(pts)
        if self.n_boxes:
            inside = np.any(
                np.all((pts[:, None, :] > self.box_lower) & (pts[:, None, :] < self.box_upper), axis=2),
                axis=1,
            )
            free &= ~inside
        if self.lattice is not None:
            free &= ~self.lattice.inside(pts)
        return free

    def point_free(self, x):
        return bool(self.points_free(x)[0])

    def segment_free(self, a, b, spacing):
        """Check evenly spaced points (at most ``spacing`` apart, both ends included)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if not (np.all(b >= self.lower) and np.all(b <= self.upper)
                and np.all(a >= self.lower) and np.all(a <= self.upper)):
            return False
        if self.lattice is None:
            if not self.n_boxes:
                return True
            seg_lo = np.minimum(a, b)
            seg_hi = np.maximum(a, b)
            hit = np.all((seg_lo < self.box_upper) & (seg_hi > self.box_lower), axis=1)
            if not hit.any():
                return True
            blo = self.box_lower[hit]
            bhi = self.box_upper[hit]
        length = math.sqrt(float((b - a) @ (b - a)))
        k = max(1, math.ceil(length / spacing))
        t = np.linspace(0.0, 1.0, k + 1)[:, None]
        pts = a + t * (b - a)
        if self.lattice is not None:
            if self.lattice.inside(pts).any():
                return False
            return bool(self.points_free(pts).all()) if self.n_boxes else True
        inside = np.all((pts[:, None, :] > blo) & (pts[:, None, :] < bhi), axis=2)
        return not inside.any()

    def to_dict(self):
        d = {
            "dimension": self.dimension,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "obstacles": [{"lower": lo.tolist(), "upper": hi.tolist()}
                          for lo, hi in zip(self.box_lower, self.box_upper)],
        }
        if self.lattice is not None:
            d["lattice"] = {"period": self.lattice.period, "width": self.lattice.width,
                            "offset": self.lattice.offset}
        return d

    @classmethod
    def from_dict(cls, d):
        n = int(d["dimension"])
        obs = d.get("obstacles", [])
        blo = np.array([o["lower"] for o in obs], dtype=float).reshape(-1, n)
        bhi = np.array([o["upper"] for o in obs], dtype=float).reshape(-1, n)
        lat = Lattice(**d["lattice"]) if d.get("lattice") else None
        world = cls(np.array(d["lower"]), np.array(d["upper"]), blo, bhi, lat)
        if world.dimension != n:
            raise ValueError("dimension does not match bounds")
        return world


def point_free(world, x):
    return world.point_free(x)


def segment_free(world, a, b, spacing):
    return world.segment_free(a, b, spacing)


@dataclass(frozen=True)
class ProblemInstance:
    world: World
    x_start: np.ndarray
    goals: np.ndarray
    c_opt: float | None = None
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        start = np.asarray(self.x_start, dtype=float)
        goals = goal_set(self.goals)
        if start.shape != (self.world.dimension,) or goals.shape[1] != self.world.dimension:
            raise ValueError("start/goal dimension does not match the world")
        if not self.world.point_free(start):
            raise ValueError("start state is in collision")
        if not self.world.points_free(goals).all():
            raise ValueError("a goal state is in collision")
        c_min = float(np.min(np.linalg.norm(goals - start, axis=1)))
        if self.c_opt is not None and self.c_opt < c_min - 1e-12:
            raise ValueError("known optimum is below the start-goal distance")
        object.__setattr__(self, "x_start", start)
        object.__setattr__(self, "goals", goals)

    @property
    def dimension(self):
        return self.world.dimension

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "world": self.world.to_dict(),
            "start": self.x_start.tolist(),
            "goals": self.goals.tolist(),
            "c_opt": self.c_opt,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(World.from_dict(d["world"]), np.array(d["start"], dtype=float),
                   np.array(d["goals"], dtype=float), d.get("c_opt"), d.get("name", ""),
                   d.get("params", {}))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def toy_optimum(n, w):
    """Shortest start-goal path length around the centred cube of width w (any n >= 2).

    The path bends over one edge of the cube in a single coordinate plane.
    """
    if not (0.0 <= w < 1.0):
        raise ValueError("obstacle width must be in [0, 1)")
    return 2.0 * math.hypot(0.5 - 0.5 * w, 0.5 * w) + w


def toy_world(n, l, w):
    """Cube domain of width l, start/goal at -/+0.5 on the first axis, centred cube obstacle."""
    if n < 2:
        raise ValueError("toy world needs n >= 2")
    if l <= 1.0:
        raise ValueError("map width must exceed the start-goal distance of 1")
    if not (0.0 <= w < 1.0):
        raise ValueError("obstacle width must be in [0, 1); w >= 1 blocks start or goal")
    half = 0.5 * l
    lower = np.full(n, -half)
    upper = np.full(n, half)
    if w > 0.0:
        blo = np.full((1, n), -0.5 * w)
        bhi = np.full((1, n), 0.5 * w)
    else:
        blo = bhi = None
    start = np.zeros(n)
    start[0] = -0.5
    goal = np.zeros(n)
    goal[0] = 0.5
    return ProblemInstance(World(lower, upper, blo, bhi), start, goal[None, :], toy_optimum(n, w),
                           name="toy", params={"n": n, "l": l, "w": w})


def random_toy_world(n, l, rng, w_range=(0.25, 0.5)):
    """Toy world with the obstacle width drawn uniformly from ``w_range``."""
    return toy_world(n, l, float(rng.uniform(*w_range)))


GRID_WIDTH = 4.0
GRID_PERIOD = 0.2
GRID_CUBE = 0.1


def grid_world(n):
    """Width-4 cube domain filled with a regular cube lattice, 5 columns between start and goal.

    Lattice period 0.2, cube width 0.1, cubes centred on multiples of 0.2 in every
    axis; start and goal (1 apart) sit in gap centres on the first axis.
    """
    if n < 2:
        raise ValueError("grid world needs n >= 2")
    half = 0.5 * GRID_WIDTH
    start = np.zeros(n)
    start[0] = -0.5
    goal = np.zeros(n)
    goal[0] = 0.5
    world = World(np.full(n, -half), np.full(n, half), lattice=Lattice(GRID_PERIOD, GRID_CUBE))
    return ProblemInstance(world, start, goal[None, :], None, name="grid",
                           params={"n": n, "l": GRID_WIDTH, "period": GRID_PERIOD, "cube": GRID_CUBE})


def obstacle_free_world(n, half_width=1.0):
    return World(np.full(n, -half_width), np.full(n, half_width))
