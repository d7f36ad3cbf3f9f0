import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import brentq

from juliadim.inducing import (CENTRAL, LONG, assemble_repeller, branch_tail_histogram, check_inventory,
                               derivative_bounds, first_return_map, make_V, pullback_construction,
                               regularly_returning, repeller_histogram, to_inventory)
from juliadim.pressure import power_iteration, repeller_dimension, transfer_matrix
from juliadim.words import pull


@pytest.fixture(scope="module")
def stages():
    out = {}
    for eps in (1e-2, 1e-3, 1e-4):
        box = first_return_map(-2.0 + eps)
        V = make_V(box)
        im = pullback_construction(box, V)
        out[eps] = (box, V, im)
    return out


@pytest.fixture(scope="module")
def rep2(stages):
    box, V, im = stages[1e-2]
    return assemble_repeller(box, im)


@pytest.fixture(scope="module")
def rep3(stages):
    box, V, im = stages[1e-3]
    return assemble_repeller(box, im)


def forward(x, c, n):
    with mpmath.workdps(50):
        z = mpmath.mpf(x)
        for _ in range(n):
            z = z * z + c
        return float(z)


def test_range_is_the_beta_fixed_point_interval(stages):
    for eps, (box, V, _) in stages.items():
        q, mq = box.range
        assert q == pytest.approx(-1.0 + eps / 3, abs=eps ** 2)
        assert mq == -q
        assert q < V[0] < 0 < V[1] < mq


def test_first_return_property(stages):
    box, _, _ = stages[1e-3]
    c = box.c
    U = box.range
    for b in box.branches:
        if b.kind != LONG:
            continue
        x = 0.5 * (b.domain[0] + b.domain[1])
        z = mpmath.mpf(x)
        for k in range(1, b.iterate + 1):
            z = z * z + c
            inside = U[0] < float(z) < U[1]
            assert inside == (k == b.iterate), (b.itinerary, k)
    kinds = [b.kind for b in box.branches]
    assert kinds.count(CENTRAL) == 1
    assert abs(box.untracked) < 1e-12


def test_return_time_two_domains_exist(stages):
    box, V, _ = stages[1e-4]
    q, mq = box.range
    twos = [b for b in box.branches if b.kind == LONG and b.iterate == 2]
    assert any(abs(b.domain[0] - q) < 1e-12 for b in twos)
    assert any(abs(b.domain[1] - mq) < 1e-12 for b in twos)


def test_V_is_regularly_returning(stages):
    for eps, (box, V, _) in stages.items():
        assert regularly_returning(box.c, V, box.range, steps=1000)
        assert not regularly_returning(box.c, (-0.9 * abs(box.range[0]), 0.9 * abs(box.range[0])), box.range)


def test_critical_return_time_grows_like_log(stages):
    m = [stages[e][0].diagnostics["return_time"] for e in (1e-2, 1e-3, 1e-4)]
    assert m[0] < m[1] < m[2]
    for eps, mi in zip((1e-2, 1e-3, 1e-4), m):
        assert abs(mi - abs(math.log(eps)) / math.log(4)) <= 3


def test_filling_contracts(stages):
    for eps in (1e-3, 1e-4):
        fill = stages[eps][2].filling
        assert fill.stop_reason == "left-long-domains"
        for j, length in fill.contraction:
            assert length < 3.0 ** (1 - j)


def test_induced_branches_map_onto_V(stages):
    box, V, im = stages[1e-2]
    c = box.c
    for b in im.long_branches(1)[:40]:
        ends = sorted(forward(x, c, b.iterate) for x in b.domain)
        assert ends == pytest.approx(list(V), abs=1e-6)


def test_derivative_bracket_contains_midpoint_derivative(stages):
    box, V, im = stages[1e-3]
    for b in im.long_branches(1)[:50]:
        lo, hi = derivative_bounds(b, box.c)
        x, logs = pull(b.word, np.array([0.5 * (V[0] + V[1])]), box.c, steps=True)
        mid = math.exp(logs.sum())
        assert lo <= mid * (1 + 1e-12) and mid <= hi * (1 + 1e-12)


def test_repeller_structure(rep2):
    d = rep2.diagnostics
    assert d["min_inf_deriv"] >= 2
    assert d["target_met"]
    assert rep2.K == 1
    assert rep2.has_complex_branch
    assert rep2.W.im_range[0] > 0
    assert rep2.complex_branch_diam / math.sqrt(rep2.epsilon) < 1.0
    assert rep2.real_coverage() >= d["coverage_target"]


def test_complex_branch_shrinks_with_eps(rep2, rep3):
    assert rep3.complex_branch_diam < rep2.complex_branch_diam
    assert rep3.diagnostics["W_over_sqrt_eps"] < 1.0


def test_tail_histogram():
    one = branch_tail_histogram(np.array([2.3]))
    assert one.counts.tolist() == [1] and one.slope == 0.0
    h = branch_tail_histogram(np.array([0.5, 1.2, 1.7, 2.1, 2.2, 2.9]))
    assert h.bins.tolist() == [0, 1, 2] and h.counts.tolist() == [1, 2, 3]
    assert h.slope == pytest.approx(np.polyfit([0, 1, 2], np.log([1, 2, 3]), 1)[0])


def test_repeller_tail_slope_below_one(rep3):
    assert repeller_histogram(rep3).slope < 1.0


def test_inventory_round_trip(rep2):
    inv = to_inventory(rep2)
    assert len(inv["branches"]) == rep2.n_real
    results = check_inventory(inv)
    assert all(r.passed for r in results), [r for r in results if not r.passed]
    inv["branches"][0]["domain"][0] += 1e-6
    bad = {r.name: r.passed for r in check_inventory(inv)}
    assert not bad["domains"]


class ExplicitBranches:
    """The real branches of a repeller as a plain list of inverse maps on V."""

    def __init__(self, rep):
        self.c = rep.c
        self.words = list(rep.real_words())
        self.range = rep.V

    def inverse(self, x):
        ys, lds = [], []
        for w in self.words:
            y, logs = pull(w, x, self.c, steps=True)
            ys.append(y)
            lds.append(-logs.sum(axis=-1))
        return np.array(ys), np.array(lds)


def test_real_dimension_two_routes(rep2):
    system = ExplicitBranches(rep2)
    cache = {}

    def log_lambda(t):
        if t not in cache:
            cache[t] = math.log(power_iteration(transfer_matrix(system, t, 24)[0])[0])
        return cache[t]

    explicit = brentq(log_lambda, 0.5, 1.2, xtol=1e-9)
    factored = repeller_dimension(rep2, False)
    assert factored.value == pytest.approx(explicit, abs=1e-6)


def test_complex_branch_raises_dimension(rep2):
    real = repeller_dimension(rep2, False).value
    full = repeller_dimension(rep2, True).value
    assert 0.5 < real < full < 1.0 + 1e-9


def test_exterior_parameter_rejected():
    with pytest.raises(ValueError):
        first_return_map(-2.5)
