"""Parameter bookkeeping and elementary dynamics of f_c(z) = z**2 + c."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Upper end of the real parameter window treated as "near the tip".
C0_DEFAULT = -1.75
ESCAPE_RADIUS = 1e8
# Above this modulus the orbit is tracked by log|z| only.
_OVERFLOW = 1e150


@dataclass(frozen=True)
class Parameter:
    c: complex
    c0: float = C0_DEFAULT

    def __post_init__(self):
        z = complex(self.c)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"parameter must be finite, got {self.c!r}")
        if not self.c0 < -0.75:
            raise ValueError("c0 must lie below -3/4")
        object.__setattr__(self, "c", z)

    @property
    def is_real(self) -> bool:
        return self.c.imag == 0.0

    @property
    def epsilon(self) -> float:
        """Signed distance c + 2 for real c, |c + 2| otherwise."""
        if self.is_real:
            return self.c.real + 2.0
        return abs(self.c + 2.0)

    @property
    def regime(self) -> str:
        x = self.c.real
        if self.is_real and x < -2.0:
            return "exterior"
        if self.is_real and -2.0 < x <= self.c0:
            return "tip"
        if abs(self.c) < 0.25:
            return "small"
        return "other"


def as_parameter(c) -> Parameter:
    return c if isinstance(c, Parameter) else Parameter(c)


@dataclass(frozen=True)
class FixedPair:
    p: complex
    q: complex

    @property
    def U(self) -> tuple[float, float]:
        """The symmetric interval (q, -q) for real parameters."""
        return (self.q.real, -self.q.real)


def fixed_points(param) -> FixedPair:
    """Both fixed points, p = (1 + sqrt(1 - 4c))/2 and q = (1 - sqrt(1 - 4c))/2.

    For real c < 1/4 the branch is real and p is the larger one.
    """
    c = as_parameter(param).c
    if c.imag == 0.0 and c.real <= 0.25:
        s = math.sqrt(1.0 - 4.0 * c.real)
    else:
        s = cmath.sqrt(1.0 - 4.0 * c)
    return FixedPair(p=complex((1.0 + s) / 2.0), q=complex((1.0 - s) / 2.0))


@dataclass
class CriticalOrbit:
    """Critical orbit f^k(c) for k = 0..N together with the partial sums
    S_n = sum_{k<n} log|2 f^k(c)| (S_0 = 0).

    Past the overflow guard the points are stored as inf and only
    log|f^k(c)| is tracked.
    """

    param: Parameter
    points: np.ndarray
    log_abs: np.ndarray
    log_deriv: np.ndarray
    escaped: bool

    @property
    def depth(self) -> int:
        return len(self.points) - 1


def critical_orbit(param, N: int) -> CriticalOrbit:
    param = as_parameter(param)
    if N < 0:
        raise ValueError("N must be nonnegative")
    c = param.c
    real = param.is_real
    pts = np.empty(N + 1, dtype=float if real else complex)
    log_abs = np.empty(N + 1)
    S = np.zeros(N + 1)
    z = c.real if real else c
    la = math.log(abs(z)) if z != 0 else -math.inf
    in_log_space = False
    escaped = False
    # Real parameters in [-2, 1/4] have bounded critical orbits.
    in_mandel_interval = real and -2.0 <= c.real <= 0.25
    for k in range(N + 1):
        pts[k] = math.inf if in_log_space else z
        log_abs[k] = la
        if k == N:
            break
        S[k + 1] = S[k] + math.log(2.0) + la if la > -math.inf else -math.inf
        if in_log_space:
            la = 2.0 * la
            continue
        z = z * z + c.real if real else z * z + c
        az = abs(z)
        if az > 2.0 and in_mandel_interval:
            escaped = True
        if az > _OVERFLOW:
            in_log_space = True
        la = math.log(az) if az > 0 else -math.inf
    # A vanishing factor makes every later sum -inf.
    bad = np.isneginf(S)
    if bad.any():
        S[np.argmax(bad):] = -math.inf
    return CriticalOrbit(param=param, points=pts, log_abs=log_abs, log_deriv=S, escaped=escaped)


def ce_margin(orbit: CriticalOrbit, omega_prime: float = 1.0) -> float:
    """min over n >= 1 of (S_n - log omega_prime)/n.

    Positive margin omega means |(f^n)'(c)| >= omega_prime e^{n omega} along
    the computed depth.
    """
    if orbit.depth < 10:
        raise ValueError("need at least 10 orbit steps")
    if omega_prime <= 0:
        raise ValueError("omega_prime must be positive")
    S = orbit.log_deriv[1:]
    if np.isneginf(S).any():
        return -math.inf
    n = np.arange(1, len(S) + 1)
    return float(np.min((S - math.log(omega_prime)) / n))


@dataclass(frozen=True)
class GreenValue:
    value: float
    steps: int
    bounded: bool  # orbit never left the disk of radius max(2, |c|)


def green_value(param, escape_radius: float = ESCAPE_RADIUS, max_iter: int = 10_000) -> GreenValue:
    """G_c(c) = lim 2^{-n} log|f^n(c)|, read off once |f^n(c)| > escape_radius."""
    c = as_parameter(param).c
    z = c
    R = max(2.0, abs(c))
    for n in range(max_iter + 1):
        az = abs(z)
        if az > escape_radius:
            # Correction term log|1 + c/z^2| is below 1e-16 at this radius.
            return GreenValue(math.ldexp(math.log(az), -n), n, False)
        if n == max_iter:
            break
        z = z * z + c
    return GreenValue(0.0, max_iter, abs(z) <= R)


def green_function(param, tol: float = 1e-12) -> float:
    """Green function of the Mandelbrot complement at c (zero on M)."""
    del tol  # the escape radius already gives ~1e-16 relative error
    return green_value(param).value


@dataclass(frozen=True)
class TechnicalSequences:
    n: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray


@lru_cache(maxsize=64)
def _sum_bounds(omega: float, depth: int) -> tuple[float, float]:
    n = np.arange(1, depth + 1, dtype=float)
    inv_gamma = np.exp(-n * omega / 4.0) * (1.0 - math.exp(-omega / 4.0)) / 64.0
    delta = 1.0 / (8.0 * n * n)
    return float(inv_gamma.sum()), float(delta.sum())


def check_sum_bounds(omega: float, depth: int = 10**6) -> tuple[float, float]:
    """Return (sum 1/gamma_n, sum delta_n) and verify they are below 1/64 and 1/2."""
    s_gamma, s_delta = _sum_bounds(float(omega), int(depth))
    if not (s_gamma < 1.0 / 64.0 and s_delta < 0.5):
        raise ArithmeticError(f"sum bounds violated: {s_gamma}, {s_delta}")
    return s_gamma, s_delta


def technical_sequences(n, omega: float, omega_prime: float = 1.0) -> TechnicalSequences:
    """delta_n = 1/(8n^2), gamma_n = 64 e^{n omega/4}/(1 - e^{-omega/4}),
    alpha_n = (1 - e^{-omega}) sqrt(delta_n omega') e^{n omega/4}/16.
    """
    if omega <= 0 or omega_prime <= 0:
        raise ValueError("omega and omega_prime must be positive")
    n = np.atleast_1d(np.asarray(n, dtype=float))
    if np.any(n < 1):
        raise ValueError("indices start at 1")
    check_sum_bounds(omega)
    grow = np.exp(n * omega / 4.0)
    delta = 1.0 / (8.0 * n * n)
    gamma = 64.0 * grow / (1.0 - math.exp(-omega / 4.0))
    alpha = (1.0 - math.exp(-omega)) * np.sqrt(delta * omega_prime) * grow / 16.0
    return TechnicalSequences(n=n, delta=delta, gamma=gamma, alpha=alpha)
