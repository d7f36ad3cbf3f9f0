"""Point samples of Julia sets by random backward iteration, and the exact
real interval cover for c < -2."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .quadratic import Parameter, as_parameter, fixed_points


@dataclass
class PointCloud:
    points: np.ndarray
    param: Parameter
    seed: int
    burn_in: int
    method: str = "inverse-iteration"

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.points.real, self.points.imag])


def sample_inverse(param, count: int, seed: int = 0, burn_in: int = 100) -> PointCloud:
    """Backward orbit z <- +-sqrt(z - c) with one fair random sign per step,
    started at the repelling fixed point.

    Points are returned in chain order, so the image of point k is point
    k - 1 and the image of point 0 is the last discarded burn-in point.
    """
    if burn_in < 50:
        raise ValueError("burn_in must be at least 50")
    param = as_parameter(param)
    c = complex(param.c)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=burn_in + count).tolist()
    z = complex(fixed_points(param).p)
    out = np.empty(burn_in + count, dtype=complex)
    sqrt = cmath.sqrt
    for k, b in enumerate(bits):
        z = sqrt(z - c)
        if b:
            z = -z
        out[k] = z
    out = out[burn_in:].copy()
    return PointCloud(points=out, param=param, seed=int(seed), burn_in=int(burn_in))


def strip_extent(cloud: PointCloud) -> float:
    if len(cloud.points) == 0:
        raise ValueError("empty cloud")
    return float(np.abs(cloud.points.imag).max())


def ellipse_excess(cloud: PointCloud) -> float:
    """max (|z - c| + |z + c|) - 4 over the cloud; at most 0 for real
    c in [-2, 1/4]."""
    c = complex(cloud.param.c)
    z = cloud.points
    return float((np.abs(z - c) + np.abs(z + c)).max() - 4.0)


def invariance_residual(cloud: PointCloud) -> tuple[float, float]:
    """(bulk, seam): the largest distance from z^2 + c to the cloud over
    all points but the first, and the same distance for the first point,
    whose image was dropped with the burn-in."""
    c = complex(cloud.param.c)
    tree = cKDTree(cloud.xy)
    img = cloud.points ** 2 + c
    d, _ = tree.query(np.column_stack([img.real, img.imag]))
    bulk = float(d[1:].max()) if len(d) > 1 else 0.0
    return bulk, float(d[0])


@dataclass
class IntervalCover:
    depth: int
    components: np.ndarray
    c: float

    @property
    def total_length(self) -> float:
        return float((self.components[:, 1] - self.components[:, 0]).sum())

    def gaps(self) -> np.ndarray:
        return self.components[1:, 0] - self.components[:-1, 1]


def interval_cover(param, n: int) -> IntervalCover:
    """The 2^n components of f^{-n}([-p, p]) for real c < -2, sorted left to
    right, by composing the two monotone inverse branches on endpoints."""
    param = as_parameter(param)
    if not (param.is_real and param.c.real < -2):
        raise ValueError("interval cover needs real c < -2")
    if not 0 <= n <= 40:
        raise ValueError("depth must be in [0, 40]")
    c = param.c.real
    p = 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * c))
    comps = np.array([[-p, p]])
    for _ in range(n):
        a = np.sqrt(comps - c)
        comps = np.concatenate([-a[::-1, ::-1], a])
    return IntervalCover(depth=n, components=comps, c=c)
