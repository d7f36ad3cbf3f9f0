import math

import numpy as np
import pytest

from juliadim.sampler import (ellipse_excess, interval_cover, invariance_residual, sample_inverse,
                              strip_extent)


def test_circle_and_segment():
    cl = sample_inverse(0.0, 5000, seed=4)
    assert np.max(np.abs(np.abs(cl.points) - 1.0)) <= 1e-9
    assert strip_extent(cl) == pytest.approx(1.0, abs=1e-6)
    cl = sample_inverse(-2.0, 5000, seed=4)
    assert np.max(np.abs(cl.points.imag)) <= 1e-9
    assert np.max(np.abs(cl.points.real)) <= 2.0 + 1e-9
    assert strip_extent(cl) <= 1e-9


def test_tip_strip_and_ellipse():
    cl = sample_inverse(-1.99, 100_000, seed=0)
    s = strip_extent(cl)
    assert 0.05 <= s <= math.sqrt(4.0 - 1.99 ** 2) + 1e-9
    assert s <= 0.2 + 1e-9
    for c in np.linspace(-2.0, 0.0, 9):
        assert ellipse_excess(sample_inverse(c, 20_000, seed=1)) <= 1e-9


def test_invariance_residual():
    cl = sample_inverse(-1.99, 100_000, seed=3)
    bulk, seam = invariance_residual(cl)
    assert bulk <= 1e-6


def test_determinism_and_burn_in():
    a = sample_inverse(-1.9, 1000, seed=9)
    b = sample_inverse(-1.9, 1000, seed=9)
    assert a.points.tobytes() == b.points.tobytes()
    assert sample_inverse(-1.9, 1000, seed=10).points.tobytes() != a.points.tobytes()
    with pytest.raises(ValueError):
        sample_inverse(-1.9, 10, burn_in=20)


def test_interval_cover_examples():
    c = -2.5
    p = (1.0 + math.sqrt(11.0)) / 2.0
    cov0 = interval_cover(c, 0)
    assert cov0.components.tolist() == [[-p, p]]
    cov1 = interval_cover(c, 1)
    a, b = math.sqrt(-p - c), math.sqrt(p - c)
    assert np.allclose(cov1.components, [[-b, -a], [a, b]], atol=1e-15)
    # Forward images of the endpoints land on [-p, p].
    assert np.allclose(np.sort(cov1.components ** 2 + c, axis=1), [[-p, p], [-p, p]], atol=1e-12)
    with pytest.raises(ValueError):
        interval_cover(-2.0, 3)


@pytest.mark.parametrize("c", [-2.01, -2.5, -4.0])
def test_interval_cover_structure(c):
    prev = interval_cover(c, 7)
    cov = interval_cover(c, 8)
    assert len(cov.components) == 2 ** 8
    assert np.all(cov.gaps() > 0)
    img = np.sort(cov.components ** 2 + c, axis=1)
    prev_set = {tuple(np.round(r, 9)) for r in prev.components}
    assert all(tuple(np.round(r, 9)) in prev_set for r in img)
    assert np.max(np.min(np.abs(img[:, None, :] - prev.components[None, :, :]).sum(axis=2), axis=1)) <= 1e-10
    assert cov.total_length < prev.total_length


def test_interval_length_ratio_near_tip():
    # Ratios of successive total lengths approach 1 - C sqrt(eps).
    ratios = {}
    for eps in (1e-2, 1e-3, 1e-4):
        L = [interval_cover(-2.0 - eps, n).total_length for n in (19, 20)]
        ratios[eps] = 1.0 - L[1] / L[0]
    e = np.array(list(ratios))
    d = np.array(list(ratios.values()))
    slope = np.polyfit(np.log(e), np.log(d), 1)[0]
    assert abs(slope - 0.5) <= 0.1
