import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from juliadim.pressure import (BracketError, DimensionEstimate, LinearSystem, SqrtSystem, _periodic_root, dimension,
                               dimension_exterior, dimension_quasicircle, dimension_transfer, harmonic_lower_bound,
                               moran_oracle, periodic_cycle_points, pressure, qsum, transfer_eigenvalue)

LOG2 = math.log(2.0)
PHI = (1 + math.sqrt(5)) / 2


def test_linear_halves_qsum_and_pressure():
    sys_ = LinearSystem([0.5, 0.5])
    for n in (1, 3, 6):
        assert qsum(sys_, n, 1.0).log_value == pytest.approx(0.0, abs=1e-12)
    assert pressure(sys_, 0.0).value == pytest.approx(LOG2, abs=1e-12)
    assert pressure(sys_, 2.0).value == pytest.approx(-LOG2, abs=1e-12)


def test_linear_thirds():
    sys_ = LinearSystem([1 / 3, 1 / 3])
    s = LOG2 / math.log(3)
    assert pressure(sys_, s).value == pytest.approx(0.0, abs=1e-12)
    assert dimension(sys_).value == pytest.approx(s, abs=1e-9)


@pytest.mark.parametrize("ratios,expected", [
    ([0.5, 0.5], 1.0),
    ([0.25, 0.25], 0.5),
    ([1 / 3, 1 / 3], LOG2 / math.log(3)),
    ([0.5, 0.25], math.log2(PHI)),
])
def test_dimension_closed_forms(ratios, expected):
    assert dimension(LinearSystem(ratios)).value == pytest.approx(expected, abs=1e-9)
    assert moran_oracle(ratios) == pytest.approx(expected, abs=1e-12)
    assert dimension_transfer(LinearSystem(ratios)).value == pytest.approx(expected, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 0.45), min_size=2, max_size=4))
def test_qsum_root_matches_moran(ratios):
    assert dimension(LinearSystem(ratios), tol=1e-11).value == pytest.approx(moran_oracle(ratios), abs=1e-9)


def test_periodic_points_agree_with_transfer_on_linear_system():
    # On an affine system every word of length n has exactly one periodic
    # point, with derivative the product of the inverse ratios.
    r = np.array([0.3, 0.5])
    n = 8
    logd = np.array([-np.log(r[list(w)]).sum() for w in itertools.product(range(2), repeat=n)])
    s = _periodic_root(logd, 1e-13)
    assert s == pytest.approx(dimension_transfer(LinearSystem(r)).value, abs=1e-9)
    assert s == pytest.approx(moran_oracle(r), abs=1e-12)


def test_transfer_eigenvalue_and_conformal_weights():
    res = transfer_eigenvalue(LinearSystem([0.5, 0.5]), 1.0)
    assert res.eigenvalue == pytest.approx(1.0, abs=1e-12)
    assert np.all(res.nu >= 0) and res.nu.sum() == pytest.approx(1.0)
    assert res.nu == pytest.approx([0.5, 0.5], abs=1e-10)
    # ratios r_i at the Moran exponent: nu_i = r_i^s
    r = [0.5, 0.25]
    s = moran_oracle(r)
    res = transfer_eigenvalue(LinearSystem(r), s)
    assert res.eigenvalue == pytest.approx(1.0, abs=1e-10)
    assert res.nu == pytest.approx(np.array(r) ** s, abs=1e-9)
    with pytest.raises(ValueError):
        transfer_eigenvalue(LinearSystem(r), s, mesh=8)


def test_pressure_strictly_decreasing():
    sq = SqrtSystem(-3.0)
    vals = [pressure(sq, t, 4, 8).value for t in np.linspace(0, 2, 11)]
    assert np.all(np.diff(vals) < 0)


def test_pressure_bracket_and_refinement():
    coarse, fine = SqrtSystem(-2.5, nsub=8), SqrtSystem(-2.5, nsub=32)
    pc, pf = pressure(coarse, 0.7), pressure(fine, 0.7)
    assert pc.lower <= pc.value <= pc.upper
    assert pf.lower <= pf.value <= pf.upper
    assert pf.upper - pf.lower <= 0.5 * (pc.upper - pc.lower)


def test_bracket_error_when_no_sign_change():
    with pytest.raises(BracketError):
        dimension(LinearSystem([0.25, 0.25]), t_range=(0.6, 2.0))


@pytest.mark.parametrize("c", [-2.5, -3.0, -6.0])
def test_exterior_two_routes(c):
    est = dimension_exterior(c)
    other = dimension_transfer(SqrtSystem(c))
    assert est.value == pytest.approx(other.value, abs=1e-8)
    assert est.bracket[0] <= other.value <= est.bracket[1]
    assert est.value > harmonic_lower_bound(c)


def test_exterior_far_and_near():
    assert dimension_exterior(-6.0).value - harmonic_lower_bound(-6.0) > 0.1
    d = [dimension_exterior(-2.0 - e).value for e in (1e-1, 1e-2, 1e-3)]
    assert d[0] < d[1] < d[2] < 1.0
    with pytest.raises(ValueError):
        dimension_exterior(-1.5)


def test_quasicircle_at_zero():
    # The unit circle: 2^n - 1 periodic points, each with |(f^n)'| = 2^n.
    n = 14
    est = dimension_quasicircle(0.0, n=n)
    assert est.value == pytest.approx(math.log2(2 ** n - 1) / n, abs=1e-11)
    assert abs(est.value - 1.0) < 1e-5


def test_quasicircle_small_parameters():
    plus, minus = dimension_quasicircle(0.05).value, dimension_quasicircle(-0.05).value
    assert plus > 1 and minus > 1
    assert abs(plus - minus) < 1e-3
    cyc = periodic_cycle_points(0.1 + 0.05j, 6)
    assert cyc.shape == (63, 6)
    assert np.allclose(cyc[:, 0] ** 2 + 0.1 + 0.05j, cyc[:, 1], atol=1e-10)
    with pytest.raises(ValueError):
        dimension_quasicircle(0.3)


def test_dimension_estimate_validation():
    with pytest.raises(ValueError):
        DimensionEstimate(0.5, "guess", (0.4, 0.6), 1)
    with pytest.raises(ValueError):
        DimensionEstimate(0.7, "moran-oracle", (0.4, 0.6), 1)
    d = DimensionEstimate(0.5, "moran-oracle", (0.4, 0.6), 3).to_dict()
    assert d["width"] == pytest.approx(0.2)


def test_unit_pressure_tie_reports_one():
    est = dimension(LinearSystem([0.5, 0.5]))
    assert est.value == 1.0
    assert abs(est.extra["P(1)"]) <= 1e-12
