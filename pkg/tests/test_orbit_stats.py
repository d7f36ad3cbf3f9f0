import math

import numpy as np
import pytest
from scipy.integrate import quad

from juliadim.orbit_stats import (MIN_VISITS, I_integral, O_integral, SigmaEstimate, ce_passing, histogram_l1,
                                  lyapunov, return_depth_density, sigma_ball, sigma_exponent, typical_orbit,
                                  upper_bound_report)


def power_sigma(A, a, radii):
    """A synthetic ball-mass table sigma(r) = A r^a, all radii confident."""
    radii = np.asarray(radii, dtype=float)
    mass = np.minimum(A * radii ** a, 1.0)
    return SigmaEstimate(radii=radii, mass=mass, visits=np.full(len(radii), 10 * MIN_VISITS),
                         orbit_length=10 ** 9, x0=0.0, center=0.0)


@pytest.fixture(scope="module")
def tip_orbit():
    return typical_orbit(-2.0 + 1e-3, 200_000, seed=3)


def test_orbit_stays_in_core(tip_orbit):
    c = tip_orbit.c
    assert len(tip_orbit) == 200_000
    assert tip_orbit.points.min() >= c - 1e-12
    assert tip_orbit.points.max() <= c * c + c + 1e-12


def test_orbit_is_deterministic():
    a = typical_orbit(-1.99, 5000, seed=7)
    b = typical_orbit(-1.99, 5000, seed=7)
    assert np.array_equal(a.points, b.points) and a.x0 == b.x0
    assert not np.array_equal(a.points, typical_orbit(-1.99, 5000, seed=8).points)
    with pytest.raises(ValueError):
        typical_orbit(-2.5, 10)


def test_chebyshev_lyapunov_and_histogram():
    orb = typical_orbit(-2.0, 1_000_000, seed=1)
    assert lyapunov(orb) == pytest.approx(math.log(2.0), abs=5e-3)
    assert histogram_l1(orb) < 0.02


def test_sigma_ball_basics(tip_orbit):
    c = tip_orbit.c
    diam = c * c + c - c
    sig = sigma_ball(tip_orbit, [1e-4, 1e-3, 1e-2, 0.1, 1.0, diam * 1.001])
    assert np.all(np.diff(sig.mass) >= 0)
    assert sig.mass[-1] == 1.0
    assert sig.confident[-1]
    with pytest.raises(ValueError):
        sigma_ball(tip_orbit, [0.0, 1.0])


def test_sigma_exponent_at_chebyshev():
    # The invariant density at -2 behaves like (x + 2)^{-1/2}.
    orb = typical_orbit(-2.0, 1_000_000, seed=2)
    fit = sigma_exponent(sigma_ball(orb, np.logspace(-5, -1, 20)), 1e-5, 1e-1)
    assert fit.slope == pytest.approx(0.5, abs=0.02)


def test_O_integral_zero_and_power_law():
    radii = np.logspace(-14, 0, 600)
    zero = SigmaEstimate(radii, np.zeros_like(radii), np.zeros(len(radii), dtype=int), 10, 0.0, 0.0)
    assert O_integral(zero, 1e-2).value == 0.0
    eps = 1e-2
    for A, a in ((1.0, 0.5), (0.3, 1.0)):
        expect, _ = quad(lambda r: math.log(1 / r) * A * r ** a / r, 0, eps, limit=200)
        got = O_integral(power_sigma(A, a, radii), eps)
        assert got.value == pytest.approx(expect, rel=0.01)
        assert not got.lower_bound_only


def test_I_integral_constant_and_sqrt():
    radii = np.logspace(-6, 0, 400)
    const = SigmaEstimate(radii, np.full(len(radii), 0.4), np.full(len(radii), 10 ** 6), 10 ** 7, 0.0, 0.0)
    assert I_integral(const, 1e-3, 0.1).value == 0.0
    eps, R = 1e-4, 0.1
    sig = power_sigma(1.0, 0.5, radii)
    expect, _ = quad(lambda r: math.log(1 / r) / r * 0.5 * r ** -0.5, eps, R, limit=200)
    got = I_integral(sig, eps, R)
    assert got.value == pytest.approx(expect, rel=0.01)
    # dyadic annuli over-count the inner radius of each shell
    assert got.detail["dyadic"] >= 0.5 * got.value
    with pytest.raises(ValueError):
        I_integral(power_sigma(1.0, 0.5, [1e-3, 1e-2, 1e-1]), 0.02, 0.05)


def test_return_depth_density_union_bound(tip_orbit):
    eps = 1e-3
    p0 = math.ceil(abs(math.log(eps)) / (0.75 * math.log(2)))
    rows = return_depth_density(tip_orbit, [p0, p0 + 2, p0 + 5], eps, R_prime=4.0)
    for row in rows:
        assert 0 <= row.density <= row.bound + 1e-12
    assert rows[0].radius > rows[-1].radius
    with pytest.raises(ValueError):
        return_depth_density(tip_orbit, [1], eps)


def test_upper_bound_report_curves():
    eps = 1e-4
    L = abs(math.log(eps))
    rep = upper_bound_report(eps, I_val=10.0, O_val=0.02, beta_norm=0.0, measured_dim=1.01)
    assert rep.bound_formula == pytest.approx(1.02)
    assert rep.bound_hausTop == pytest.approx(1 + L ** 1.5 * 0.01)
    assert rep.bound_mis == pytest.approx(1 + 0.01 * L)
    assert rep.bound_mis < rep.bound_hausTop
    assert rep.consistent is True
    tiny = upper_bound_report(1e-12, 0.0, 0.0, 1.0)
    assert tiny.bound_hausTop == pytest.approx(1.0, abs=1e-3)
    assert tiny.consistent is None
    assert upper_bound_report(eps, 1.0, 0.0, 0.5, C=2.0).bound_formula == pytest.approx(1.5)


def test_ce_passing_filters_by_margin():
    eps = [1e-3, 2e-3, 5e-3, 1e-2]
    out = ce_passing(eps, depth=2000, threshold=0.3)
    assert all(e in eps and m > 0.3 for e, m in out)
    assert ce_passing(eps, depth=2000, threshold=10.0) == []
