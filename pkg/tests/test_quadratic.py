import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from juliadim.quadratic import (Parameter, ce_margin, check_sum_bounds, critical_orbit, fixed_points,
                                green_function, green_value, technical_sequences)


@pytest.mark.parametrize("c, p, q", [(-2.0, 2.0, -1.0), (0.0, 1.0, 0.0), (-0.75, 1.5, -0.5)])
def test_fixed_points_examples(c, p, q):
    fp = fixed_points(c)
    assert fp.p == pytest.approx(p, abs=1e-15)
    assert fp.q == pytest.approx(q, abs=1e-15)


def test_fixed_point_residuals_random():
    rng = np.random.default_rng(0)
    for c in rng.uniform(-2.5, 0.25, 10_000):
        fp = fixed_points(c)
        assert abs(fp.p * fp.p + c - fp.p) <= 1e-12
        assert abs(fp.q * fp.q + c - fp.q) <= 1e-12


@given(st.floats(-1.999, -1e-6))
def test_fixed_point_order(c):
    fp = fixed_points(c)
    assert 0 < -fp.q.real < fp.p.real


def test_parameter_regimes():
    assert Parameter(-2.1).regime == "exterior"
    assert Parameter(-1.9).regime == "tip"
    assert Parameter(-1.7).regime == "other"
    assert Parameter(0.1j).regime == "small"
    assert Parameter(-1.99).epsilon == -1.99 + 2.0
    assert Parameter(-1.7, c0=-1.6).regime == "tip"
    with pytest.raises(ValueError):
        Parameter(float("nan"))


def test_critical_orbit_chebyshev():
    orb = critical_orbit(-2.0, 3)
    assert orb.points.tolist() == [-2.0, 2.0, 2.0, 2.0]
    assert np.allclose(orb.log_deriv, np.arange(4) * math.log(4.0))


def test_critical_orbit_superattracting():
    orb = critical_orbit(0.0, 5)
    assert np.all(orb.points == 0)
    assert orb.log_deriv[0] == 0 and np.all(np.isneginf(orb.log_deriv[1:]))
    orb = critical_orbit(-1.0, 2)
    assert orb.points.tolist() == [-1.0, 0.0, -1.0]
    assert np.isneginf(orb.log_deriv[2])


def test_log_space_matches_direct_product():
    rng = np.random.default_rng(3)
    for c in rng.uniform(-2.0, -1.4, 50):
        orb = critical_orbit(c, 30)
        factors = np.abs(2.0 * orb.points[:-1])
        if factors.min() < 1e-6:
            continue
        prod = np.cumprod(factors)
        assert np.allclose(np.exp(orb.log_deriv[1:]), prod, rtol=1e-9)


def test_ce_margin_examples():
    assert ce_margin(critical_orbit(-2.0, 100)) == pytest.approx(math.log(4.0), abs=1e-12)
    assert ce_margin(critical_orbit(-1.0, 100)) == -math.inf
    m = ce_margin(critical_orbit(-1.999, 10_000))
    assert 0 < m < math.log(4.0)
    with pytest.raises(ValueError):
        ce_margin(critical_orbit(-2.0, 5))


def test_green_examples():
    assert green_function(-2.0) == 0.0
    assert green_value(-2.0).bounded
    g6 = green_function(-6.0)
    assert abs(g6 - math.log(6.0)) <= 0.1 * math.log(6.0)
    # Brute iteration in log space as an independent check.
    z, n = -6.0, 0
    while abs(z) < 1e30:
        z, n = z * z - 6.0, n + 1
    assert g6 == pytest.approx(math.log(abs(z)) / 2 ** n, rel=1e-12)
    assert green_function(-2.1) > 0


def test_green_zero_on_real_mandelbrot_and_increasing_outside():
    for c in np.linspace(-2.0, 0.25, 23):
        assert green_function(c) == 0.0
    cs = np.linspace(-2.001, -3.0, 40)
    g = np.array([green_function(c) for c in cs])
    assert np.all(g > 0) and np.all(np.diff(g) > 0)


def test_technical_sequences():
    ts = technical_sequences([1, 2], omega=1.0)
    assert ts.delta.tolist() == [1 / 8, 1 / 32]
    ts = technical_sequences(4, omega=math.log(2.0))
    assert ts.gamma[0] == pytest.approx(128.0 / (1.0 - 2.0 ** -0.25), rel=1e-13)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 5.0))
def test_sum_bounds(omega):
    s_gamma, s_delta = check_sum_bounds(omega)
    assert s_gamma < 1 / 64 and s_delta < 0.5
