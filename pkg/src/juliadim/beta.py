"""Jones beta numbers of planar point clouds.

beta(x, r) is the half-width of the thinnest slab containing the points of
B(x, r), divided by r. The thinnest slab is found by rotating calipers on
the convex hull: one side of an optimal slab always contains a hull edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import minimize_scalar
from scipy.spatial import ConvexHull, QhullError, cKDTree

ADMISSIBLE_COUNT = 50


def _as_xy(points) -> np.ndarray:
    p = np.asarray(points)
    if np.iscomplexobj(p) or p.ndim == 1:
        p = np.asarray(p, dtype=complex)
        return np.column_stack([p.real, p.imag])
    return np.asarray(p, dtype=float)


def hull_vertices(xy: np.ndarray) -> np.ndarray | None:
    """Counter-clockwise hull vertices, or None for degenerate sets."""
    if len(xy) < 3:
        return None
    try:
        h = ConvexHull(xy)
    except QhullError:
        return None
    return xy[h.vertices]


@njit(cache=True)
def _calipers(P):
    """Minimal width and diameter of a convex polygon given CCW."""
    n = P.shape[0]
    best_w = np.inf
    best_d = 0.0
    j = 1
    for i in range(n):
        i2 = (i + 1) % n
        ex = P[i2, 0] - P[i, 0]
        ey = P[i2, 1] - P[i, 1]
        L = math.hypot(ex, ey)
        if L == 0.0:
            continue
        # Advance the antipodal pointer while the distance to edge i grows.
        while True:
            j2 = (j + 1) % n
            a = ex * (P[j, 1] - P[i, 1]) - ey * (P[j, 0] - P[i, 0])
            b = ex * (P[j2, 1] - P[i, 1]) - ey * (P[j2, 0] - P[i, 0])
            if b > a:
                j = j2
            else:
                break
        w = (ex * (P[j, 1] - P[i, 1]) - ey * (P[j, 0] - P[i, 0])) / L
        if w < best_w:
            best_w = w
        for k in (i, i2):
            d = math.hypot(P[j, 0] - P[k, 0], P[j, 1] - P[k, 1])
            if d > best_d:
                best_d = d
    return best_w, best_d


def min_width(points) -> float:
    """Width of the thinnest slab containing the points (0 if collinear)."""
    hv = hull_vertices(_as_xy(points))
    if hv is None:
        return 0.0
    return float(_calipers(np.ascontiguousarray(hv))[0])


def diameter(points) -> float:
    xy = _as_xy(points)
    hv = hull_vertices(xy)
    if hv is None:
        if len(xy) < 2:
            return 0.0
        # Collinear: the extreme points along the principal direction.
        d = xy - xy.mean(axis=0)
        u = np.linalg.svd(d, full_matrices=False)[2][0]
        s = d @ u
        return float(s.max() - s.min())
    return float(_calipers(np.ascontiguousarray(hv))[1])


def width_bruteforce(points, n_dirs: int = 10_000, refine: int = 5) -> float:
    """Minimal slab width over a uniform grid of directions, refined near the
    best grid directions by a bounded scalar search. Uses every point, not
    the hull."""
    xy = _as_xy(points)
    if len(xy) < 3:
        return 0.0
    width = lambda th: float(np.ptp(xy @ np.array([math.cos(th), math.sin(th)])))
    th = np.pi * np.arange(n_dirs) / n_dirs
    proj = xy @ np.stack([np.cos(th), np.sin(th)])
    w = proj.max(axis=0) - proj.min(axis=0)
    step = math.pi / n_dirs
    best = float(w.min())
    for k in np.argsort(w)[:refine]:
        res = minimize_scalar(width, bounds=(th[k] - step, th[k] + step), method="bounded",
                              options={"xatol": 1e-13})
        best = min(best, float(res.fun))
    return best


@dataclass
class BetaValue:
    beta: float
    count: int
    empty: bool = False


class BallIndex:
    """KD-tree over a cloud for repeated ball queries."""

    def __init__(self, points):
        self.xy = _as_xy(points)
        self.tree = cKDTree(self.xy)

    def ball(self, x: complex, r: float) -> np.ndarray:
        idx = self.tree.query_ball_point([x.real, x.imag], r)
        return self.xy[idx]


def _index(cloud) -> BallIndex:
    if isinstance(cloud, BallIndex):
        return cloud
    pts = getattr(cloud, "points", cloud)
    return BallIndex(pts)


def beta_at(cloud, x, r: float) -> BetaValue:
    """beta(x, r) of the cloud; an empty ball gives 0 with the empty flag."""
    if not r > 0:
        raise ValueError("radius must be positive")
    sub = _index(cloud).ball(complex(x), r)
    if len(sub) == 0:
        return BetaValue(0.0, 0, empty=True)
    return BetaValue(min_width(sub) / (2.0 * r), len(sub))


@dataclass
class BetaProfile:
    base: complex
    scales: np.ndarray
    betas: np.ndarray
    counts: np.ndarray
    diam: float

    @property
    def n(self) -> np.ndarray:
        return np.arange(len(self.scales))


def beta_profile(cloud, x, N: int, floor: int = ADMISSIBLE_COUNT, diam: float | None = None) -> BetaProfile:
    """beta(x, 2^-n diam) for n = 0..N, stopping at the first scale whose
    ball holds fewer than `floor` points."""
    if N < 1:
        raise ValueError("N must be at least 1")
    idx = _index(cloud)
    if diam is None:
        diam = diameter(idx.xy)
    scales, betas, counts = [], [], []
    for n in range(N + 1):
        r = diam * 2.0 ** -n
        b = beta_at(idx, x, r)
        if b.count < floor:
            break
        scales.append(r)
        betas.append(b.beta)
        counts.append(b.count)
    return BetaProfile(base=complex(x), scales=np.array(scales), betas=np.array(betas),
                       counts=np.array(counts, dtype=int), diam=float(diam))


def scaling_violations(profile: BetaProfile, slack: float = 1.05) -> list[int]:
    """Scales n where beta(x, r_n) > slack (r_{n-1}/r_n) beta(x, r_{n-1})."""
    b, r = profile.betas, profile.scales
    bad = b[1:] > slack * (r[:-1] / r[1:]) * b[:-1]
    return [int(i) + 1 for i in np.nonzero(bad)[0]]


def top_scale_beta(cloud) -> BetaValue:
    """beta at the scale of the whole set: the ball of radius diam/2 about
    the midpoint of a diametral pair."""
    xy = _as_xy(getattr(cloud, "points", cloud))
    hv = hull_vertices(xy)
    pts = hv if hv is not None else xy
    d = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1)) if len(pts) <= 4000 else None
    if d is None:
        raise ValueError("hull too large for the diametral pair search")
    i, j = np.unravel_index(np.argmax(d), d.shape)
    mid = 0.5 * (pts[i] + pts[j])
    r = 0.5 * d[i, j] * (1.0 + 1e-12)
    return beta_at(cloud, complex(mid[0], mid[1]), r)


def mean_wiggliness(profile: BetaProfile, r: float) -> float:
    """(log 2) sum beta^2(x, r_n) over admissible scales r_n >= r, divided by
    log(1/r), the dyadic form of the normalised integral of beta^2 dt/t."""
    use = profile.scales >= r
    if not use.any():
        raise ValueError("no admissible scales above r")
    return math.log(2.0) * float(np.sum(profile.betas[use] ** 2)) / math.log(1.0 / r)


def good_scale_density(profile: BetaProfile, threshold: float) -> float:
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    if len(profile.betas) == 0:
        return math.nan
    return float(np.mean(profile.betas <= threshold))


@dataclass
class FlatnessFamily:
    thresholds: np.ndarray
    densities: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.densities = np.asarray(self.densities, dtype=float)
        t, d = self.thresholds, self.densities
        if len(t) != len(d) or len(t) == 0:
            raise ValueError("thresholds and densities must have the same nonzero length")
        if np.any(np.diff(t) <= 0) or t[-1] != 1.0:
            raise ValueError("thresholds must increase strictly and end at 1")
        if np.any(d < 0) or np.any(d > 1):
            raise ValueError("densities must lie in [0, 1]")


def almost_flat_bound(family: FlatnessFamily, C_prime: float) -> float:
    """1 + C' sum d_i beta_i^2."""
    return 1.0 + C_prime * float(np.sum(family.densities * family.thresholds ** 2))


def tip_ladder(epsilon: float, C4: float = 0.5, top_density: float = 1.0) -> FlatnessFamily:
    """Threshold ladder beta_j = C4 2^{j-1} sqrt(eps) for j < n, beta_n = 1,
    with d_1 = 1, d_j = 2^-j |log eps|^{3/2} (capped at 1) and
    d_n = top_density sqrt(eps) |log eps|^{3/2}."""
    if not 0 < C4 < 1:
        raise ValueError("C4 must lie in (0, 1)")
    s = math.sqrt(epsilon)
    L = abs(math.log(epsilon)) ** 1.5
    m = int(math.floor(math.log2(1.0 / s))) + 1
    betas = [C4 * 2.0 ** (j - 1) * s for j in range(1, m + 1)]
    dens = [1.0] + [min(1.0, 2.0 ** -j * L) for j in range(2, m + 1)]
    betas.append(1.0)
    dens.append(min(1.0, top_density * s * L))
    return FlatnessFamily(np.array(betas), np.array(dens), meta={"epsilon": epsilon, "C4": C4})
