"""Birkhoff statistics of typical orbits for real tip parameters: ball
masses of the invariant measure at the critical value, return-depth
densities and the integrals O(eps), I(eps) entering the upper bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .fitting import FitResult, fit_loglog
from .quadratic import as_parameter, critical_orbit, ce_margin, fixed_points

TRANSIENT = 1000
MIN_VISITS = 100
OMEGA_DEFAULT = 0.75 * math.log(2.0)


@njit(cache=True)
def _iterate(c, x0, n, transient, p, restarts):
    out = np.empty(n)
    x = x0
    used = 0
    bad = 0
    k = -transient
    while k < n:
        y = x * x + c
        if y == x or abs(y) > p:
            # Rounding has landed on a fixed point or left [-p, p]; take the
            # next fresh start instead of a frozen or escaping orbit.
            if used < restarts.shape[0]:
                y = restarts[used]
                used += 1
            else:
                bad = 1
                break
        x = y
        if k >= 0:
            out[k] = x
        k += 1
    return out, used, bad


@dataclass
class Orbit:
    points: np.ndarray
    c: float
    x0: float
    seed: int
    restarts: int = 0

    def __len__(self) -> int:
        return len(self.points)


def typical_orbit(param, N: int, x0: float | None = None, seed: int = 0, transient: int = TRANSIENT) -> Orbit:
    """N forward iterates after a transient, from x0 or a seeded uniform
    point of [c, f(c)]."""
    param = as_parameter(param)
    c = param.c.real
    if not (param.is_real and -2.0 <= c <= 0.25):
        raise ValueError("typical orbits need real c in [-2, 1/4]")
    rng = np.random.default_rng(seed)
    lo, hi = c, c * c + c
    if x0 is None:
        x0 = float(rng.uniform(lo, hi))
    fresh = rng.uniform(lo, hi, size=64)
    p = fixed_points(param).p.real
    pts, used, bad = _iterate(c, float(x0), int(N), int(transient), p * (1 + 1e-12), fresh)
    if bad:
        raise ArithmeticError("orbit left [-p, p] repeatedly")
    return Orbit(points=pts, c=c, x0=float(x0), seed=int(seed), restarts=int(used))


def lyapunov(orbit: Orbit) -> float:
    return float(np.mean(np.log(2.0 * np.abs(orbit.points))))


def chebyshev_bin_masses(edges: np.ndarray) -> np.ndarray:
    """Exact masses of 1/(pi sqrt(4 - x^2)) on [-2, 2] between the edges."""
    F = np.arcsin(np.clip(edges / 2.0, -1.0, 1.0)) / math.pi
    return np.diff(F)


def histogram_l1(orbit: Orbit, bins: int = 100) -> float:
    """L1 distance between the empirical bin masses on [-2, 2] and the
    invariant density of the Chebyshev map."""
    edges = np.linspace(-2.0, 2.0, bins + 1)
    counts, _ = np.histogram(orbit.points, bins=edges)
    return float(np.abs(counts / counts.sum() - chebyshev_bin_masses(edges)).sum())


@dataclass
class SigmaEstimate:
    radii: np.ndarray
    mass: np.ndarray
    visits: np.ndarray
    orbit_length: int
    x0: float
    center: float

    @property
    def confident(self) -> np.ndarray:
        return self.visits >= MIN_VISITS

    def at(self, r: np.ndarray) -> np.ndarray:
        """Mass interpolated linearly in log-log between grid radii."""
        lr, lm = np.log(self.radii), np.log(np.maximum(self.mass, 1e-300))
        return np.exp(np.interp(np.log(r), lr, lm))


def sigma_ball(orbit: Orbit, radii, center: float | None = None) -> SigmaEstimate:
    """Visit frequencies of the orbit to B(c, r) for increasing radii."""
    radii = np.sort(np.asarray(radii, dtype=float))
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    c = orbit.c if center is None else center
    d = np.sort(np.abs(orbit.points - c))
    visits = np.searchsorted(d, radii, side="left")
    return SigmaEstimate(radii=radii, mass=visits / len(d), visits=visits, orbit_length=len(d),
                         x0=orbit.x0, center=c)


def sigma_exponent(sig: SigmaEstimate, r_min: float, r_max: float) -> FitResult:
    """Log-log slope of the ball mass over confident radii in [r_min, r_max]."""
    use = sig.confident & (sig.radii >= r_min) & (sig.radii <= r_max) & (sig.mass > 0)
    return fit_loglog(sig.radii[use], sig.mass[use])


@dataclass
class DepthRow:
    p: int
    radius: float
    density: float
    sigma: float
    visits: int

    @property
    def confident(self) -> bool:
        return self.visits >= MIN_VISITS

    @property
    def bound(self) -> float:
        return self.p * self.sigma


def return_depth_density(orbit: Orbit, p_grid, epsilon: float, omega: float = OMEGA_DEFAULT,
                         R_prime: float = 1.0, Omega1: float = 1.0) -> list[DepthRow]:
    """Empirical density of E_p: the times lying in a window of length p
    that starts at a visit to B(c, r_p), with r_p = Omega1 eps e^{-(p - p0) omega} R'.

    Only p >= p0 = |log eps| / omega are meaningful; smaller p are rejected.
    """
    if not 0 < omega <= math.log(2.0):
        raise ValueError("omega must lie in (0, log 2]")
    p0 = abs(math.log(epsilon)) / omega
    d = np.abs(orbit.points - orbit.c)
    N = len(d)
    rows = []
    for p in p_grid:
        p = int(p)
        if p < p0:
            raise ValueError(f"p = {p} below p0 = {p0:.3f}")
        r = Omega1 * epsilon * math.exp(-(p - p0) * omega) * R_prime
        v = (d < r).astype(np.int64)
        cs = np.concatenate([[0], np.cumsum(v)])
        j = np.arange(N)
        covered = cs[j + 1] - cs[np.maximum(j + 1 - p, 0)] > 0
        rows.append(DepthRow(p=p, radius=r, density=float(covered.mean()), sigma=float(v.mean()),
                             visits=int(v.sum())))
    return rows


@dataclass
class IntegralValue:
    value: float
    lower_bound_only: bool
    detail: dict = field(default_factory=dict)


def O_integral(sig: SigmaEstimate, epsilon: float) -> IntegralValue:
    """int_0^eps log(1/r) sigma(r) dr / r over confident radii, trapezoidal in
    log r. Truncation at the confidence floor makes it a lower bound."""
    use = sig.confident & (sig.radii <= epsilon)
    if not use.any():
        if np.all(sig.mass[sig.radii <= epsilon] == 0):
            return IntegralValue(0.0, False)
        raise ValueError("no confident radii below epsilon")
    r = sig.radii[use]
    m = sig.mass[use]
    if r[-1] < epsilon:
        r = np.append(r, epsilon)
        m = np.append(m, sig.at(np.array([epsilon]))[0])
    u = np.log(r)
    f = -u * m
    val = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(u)))
    truncated = bool((~sig.confident & (sig.radii < r[0]) & (sig.mass > 0)).any())
    return IntegralValue(val, truncated, {"r_min": float(r[0])})


def I_integral(sig: SigmaEstimate, epsilon: float, R_prime: float) -> IntegralValue:
    """Stieltjes sum of log(1/r)/r against the increments of sigma on
    [eps, R'], with the dyadic-annulus bound
    |log eps| sum_j (sigma(2^{j+1} eps) - sigma(2^j eps)) / (2^j eps)
    alongside."""
    use = (sig.radii >= epsilon) & (sig.radii <= R_prime)
    r = sig.radii[use]
    m = sig.mass[use]
    if len(r) < 2:
        raise ValueError("grid does not span [eps, R']")
    rm = np.sqrt(r[1:] * r[:-1])
    val = float(np.sum(np.log(1.0 / rm) / rm * np.diff(m)))
    J = int(math.floor(math.log2(R_prime / epsilon)))
    edges = epsilon * 2.0 ** np.arange(J + 1)
    edges = np.append(edges, R_prime) if edges[-1] < R_prime else edges
    me = sig.at(edges)
    dyadic = abs(math.log(epsilon)) * float(np.sum(np.diff(me) / edges[:-1]))
    low = not bool(sig.confident[use].all())
    return IntegralValue(val, low, {"dyadic": dyadic})


@dataclass
class UpperBoundReport:
    epsilon: float
    beta_norm: float
    I_val: float
    O_val: float
    bound_formula: float
    bound_hausTop: float
    bound_mis: float
    constants: dict
    measured_dim: float | None = None
    consistent: bool | None = None


def upper_bound_report(epsilon: float, I_val: float, O_val: float, beta_norm: float, C: float = 1.0,
                       kappa: float = 1.0, Z: float = 1.0, measured_dim: float | None = None) -> UpperBoundReport:
    """Evaluate 1 + C (beta^2 I + O), 1 + kappa |log eps|^{3/2} sqrt(eps) and
    1 + Z sqrt(eps) |log eps| with the given constants. The comparison with
    a measured dimension is reported, not enforced."""
    L = abs(math.log(epsilon))
    s = math.sqrt(epsilon)
    formula = 1.0 + C * (beta_norm ** 2 * I_val + O_val)
    rep = UpperBoundReport(
        epsilon=epsilon, beta_norm=beta_norm, I_val=I_val, O_val=O_val, bound_formula=formula,
        bound_hausTop=1.0 + kappa * L ** 1.5 * s, bound_mis=1.0 + Z * s * L,
        constants={"C": C, "kappa": kappa, "Z": Z}, measured_dim=measured_dim,
    )
    if measured_dim is not None:
        rep.consistent = bool(formula >= measured_dim)
    return rep


def ce_passing(epsilons, depth: int = 10_000, threshold: float = 0.3) -> list[tuple[float, float]]:
    """(eps, margin) for tip parameters c = -2 + eps with ce_margin above the
    threshold, the empirical stand-in for typical parameters."""
    out = []
    for e in epsilons:
        m = ce_margin(critical_orbit(-2.0 + float(e), depth))
        if m > threshold:
            out.append((float(e), m))
    return out
