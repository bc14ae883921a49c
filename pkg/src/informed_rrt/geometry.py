"""Measures, rotations and direct uniform sampling of balls and prolate hyperspheroids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Below this gap (relative to c_min) a spheroid is treated as a zero-measure segment.
DEGENERATE_RTOL = 1e-12


def make_rng(seed=None):
    """Return the generator used everywhere in the package (PCG64 via numpy)."""
    return np.random.default_rng(seed)


def unit_ball_measure(n):
    """Lebesgue measure of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    # lgamma keeps large n finite
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def phs_measure(c_min, c, n):
    """Lebesgue measure of the prolate hyperspheroid with focal distance c_min and
    transverse diameter c.

    Returns ``inf`` for an infinite transverse diameter.
    """
    if math.isinf(c):
        return math.inf
    if c < c_min:
        raise ValueError(f"transverse diameter {c} is below the focal distance {c_min}")
    if c == c_min:
        return 0.0
    conj_sq = max(c * c - c_min * c_min, 0.0)
    return c * conj_sq ** (0.5 * (n - 1)) * unit_ball_measure(n) / 2.0**n


def sample_unit_ball(n, rng, size=None):
    """Uniform samples from the open unit n-ball.

    A Gaussian direction scaled by u^(1/n); exact at every dimension and never
    rejects. With ``size`` given, returns an array of shape (size, n).
    """
    if size is None:
        d = rng.standard_normal(n)
        norm = math.sqrt(float(d @ d))
        while norm == 0.0:
            d = rng.standard_normal(n)
            norm = math.sqrt(float(d @ d))
        return d * (rng.random() ** (1.0 / n) / norm)
    d = rng.standard_normal((size, n))
    norms = np.linalg.norm(d, axis=1)
    radii = rng.random(size) ** (1.0 / n)
    return d * (radii / norms)[:, None]


def rotation_to_world(a1):
    """Rotation C (ellipse frame to world frame) with C @ e1 == a1 and det(C) == +1.

    Solved as the Wahba problem on M = a1 e1^T: C = U diag(1, ..., 1, det U det V) V^T.
    """
    a1 = np.asarray(a1, dtype=float)
    norm = np.linalg.norm(a1)
    if norm == 0.0:
        raise ValueError("transverse axis has zero length (coincident foci)")
    n = a1.shape[0]
    M = np.zeros((n, n))
    M[:, 0] = a1 / norm
    U, _, Vt = np.linalg.svd(M)
    lam = np.ones(n)
    lam[-1] = np.linalg.det(U) * np.linalg.det(Vt)
    return (U * lam) @ Vt


@dataclass(frozen=True)
class ProlateHyperspheroid:
    """The L2 informed set of a start/goal pair for a solution cost ``c``.

    ``rotation`` and ``centre`` only depend on the foci; use :meth:`with_cost` to
    get the spheroid for another cost without recomputing them.
    """

    focus_a: np.ndarray
    focus_b: np.ndarray
    c: float
    c_min: float = field(init=False)
    rotation: np.ndarray = field(init=False, repr=False)
    centre: np.ndarray = field(init=False, repr=False)
    radii: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        fa = np.asarray(self.focus_a, dtype=float)
        fb = np.asarray(self.focus_b, dtype=float)
        if fa.shape != fb.shape or fa.ndim != 1:
            raise ValueError("foci must be 1-d vectors of equal length")
        object.__setattr__(self, "focus_a", fa)
        object.__setattr__(self, "focus_b", fb)
        c_min = float(np.linalg.norm(fb - fa))
        object.__setattr__(self, "c_min", c_min)
        if c_min > 0.0:
            rot = rotation_to_world((fb - fa) / c_min)
        else:
            rot = np.eye(fa.shape[0])
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "centre", 0.5 * (fa + fb))
        self._set_radii()

    def _set_radii(self):
        c = float(self.c)
        if c < self.c_min:
            raise ValueError(f"transverse diameter {c} is below the focal distance {self.c_min}")
        n = self.dimension
        radii = np.empty(n)
        radii[0] = 0.5 * c
        radii[1:] = 0.5 * math.sqrt(max(c * c - self.c_min**2, 0.0)) if math.isfinite(c) else math.inf
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "radii", radii)

    @property
    def dimension(self):
        return self.focus_a.shape[0]

    @property
    def measure(self):
        return phs_measure(self.c_min, self.c, self.dimension)

    @property
    def degenerate(self):
        return not (self.c - self.c_min > DEGENERATE_RTOL * self.c_min) or not math.isfinite(self.c)

    def with_cost(self, c):
        """Same foci, new transverse diameter; shares the cached rotation and centre."""
        new = object.__new__(ProlateHyperspheroid)
        for name in ("focus_a", "focus_b", "c_min", "rotation", "centre"):
            object.__setattr__(new, name, getattr(self, name))
        object.__setattr__(new, "c", float(c))
        new._set_radii()
        return new

    def focal_sum(self, x):
        """Sum of distances to both foci; works on a point or an (m, n) array."""
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.focus_a, axis=-1) + np.linalg.norm(x - self.focus_b, axis=-1)

    def contains(self, x):
        return self.focal_sum(x) < self.c

    def to_world(self, x_ball):
        """Map unit-ball points (n,) or (m, n) into the spheroid."""
        return (np.asarray(x_ball) * self.radii) @ self.rotation.T + self.centre


def sample_phs(phs, rng, size=None):
    """Uniform samples from the interior of ``phs`` (scale, rotate, translate a ball sample)."""
    if phs.degenerate:
        raise ValueError(f"cannot sample a degenerate spheroid (c={phs.c}, c_min={phs.c_min})")
    if size is None:
        return phs.rotation @ (phs.radii * sample_unit_ball(phs.dimension, rng)) + phs.centre
    return phs.to_world(sample_unit_ball(phs.dimension, rng, size))


def tight_rectangle_measure(c_min, c, n):
    """Measure of the smallest box containing the spheroid: c * (c^2 - c_min^2)^((n-1)/2)."""
    return c * max(c * c - c_min * c_min, 0.0) ** (0.5 * (n - 1))


def sample_tight_rectangle(phs, rng, size):
    """Uniform samples from the spheroid-aligned box bounding ``phs``, in world coordinates."""
    local = rng.uniform(-1.0, 1.0, size=(size, phs.dimension)) * phs.radii
    return local @ phs.rotation.T + phs.centre
