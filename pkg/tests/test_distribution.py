import numpy as np
import pytest
from mpmath import mp, mpf

from cantorlab.distribution import (density_cover, empirical_cdf_probe, extremal_interval,
                                    greedy_subsequence, log_distribution, log_distribution_sweep,
                                    theta_densities)
from cantorlab.errors import OutOfInterval, ScopeError
from cantorlab.extrema import infimum_thm, supremum_thm


def test_greedy_square_to_one(square):
    g = greedy_subsequence(square, 1.0, 24)
    assert len(g.indices) == 24
    assert float(g.distance) < 1e-3
    r = [float(v) for v in g.ratios]
    assert all(a >= b - 1e-15 for a, b in zip(r[g.k2:], r[g.k2 + 1:]))
    assert all(v >= 1.0 for v in r)


def test_greedy_near_infimum(ternary):
    g = greedy_subsequence(ternary, 1 + 1e-4, 24)
    assert 1 + 1e-4 <= float(g.ratios[-1]) <= 1 + 1e-4 + 1e-3


def test_greedy_stalls_at_left_limit(square):
    # below lambda(2-) = 2/2^alpha every step appends m, so the ratios settle there
    lo = float(infimum_thm(square).value)
    g = greedy_subsequence(square, lo + 1e-4, 24)
    stall = 2 / 2 ** float(square.alpha)
    assert all(n % 3 == 2 for n in g.indices[1:])
    assert abs(float(g.ratios[-1]) - stall) < 1e-9
    rep = density_cover(square, 100, 1e-3, 3 ** 16)
    assert rep.covered
    assert {g for g, m in zip(rep.grid, rep.methods) if m == "scan"} <= {g for g in rep.grid if g < stall}


def test_greedy_indices_follow_digit_appending(ternary):
    g = greedy_subsequence(ternary, 1.5, 12)
    for a, b in zip(g.indices, g.indices[1:]):
        assert b // 2 == a


def test_greedy_out_of_interval(square, ternary):
    with pytest.raises(OutOfInterval):
        greedy_subsequence(square, float(supremum_thm(square).value) + 0.1, 5)
    with pytest.raises(OutOfInterval):
        greedy_subsequence(ternary, 0.9, 5)
    with pytest.raises(ValueError):
        greedy_subsequence(ternary, 1.5, 0)


def test_greedy_respects_limit(ternary):
    g = greedy_subsequence(ternary, 1.5, 100, n_limit=10 ** 4)
    assert max(g.indices) <= 10 ** 4


@pytest.mark.parametrize("name", ["ternary", "square"])
def test_cover_small(name, request):
    sys = request.getfixturevalue(name)
    rep = density_cover(sys, 25, 1e-3, sys.src_base ** 14)
    assert rep.covered, rep.failures
    for (n, d), g in zip(rep.witnesses, rep.grid):
        assert n <= sys.src_base ** 14
        assert abs(abs(float(__import__("cantorlab").ratio(sys, n)) - g) - d) < 1e-12


def test_cover_trivial(ternary):
    rep = density_cover(ternary, 2, 0.5, 100)
    assert rep.covered and rep.grid == [1.5, 1.5]


def test_cover_reports_failures(ternary):
    rep = density_cover(ternary, 30, 1e-6, 8)
    assert not rep.covered and rep.failures


def test_extremal_interval_outside_scope(gu):
    lo, hi = extremal_interval(gu)
    assert hi == 2 and mpf(2) / 3 < lo < mpf(2) / 3 + mpf(1) / 100


def test_logdist_sweep(ternary):
    gam = np.linspace(0.9, 2.0, 20)
    res = log_distribution_sweep(ternary, gam, 10 ** 5)
    L = [r.L_value for r in res]
    assert all(a <= b for a, b in zip(L, L[1:]))
    assert res[0].L_value == 0 and res[0].error_estimate < 1e-9
    assert abs(res[-1].L_value - 1) <= res[-1].error_estimate
    assert all(0 <= r.L_value <= 1 for r in res)


def test_logdist_interior_error_small(square):
    r = log_distribution(square, 1.0, 10 ** 5)
    assert 0 < r.L_value < 1 and r.error_estimate < 5e-3


def test_logdist_resolution_floor(ternary):
    with pytest.raises(ValueError):
        log_distribution(ternary, 1.5, 10)


@pytest.mark.parametrize("name", ["ternary", "square"])
def test_theta(name, request):
    sys = request.getfixturevalue(name)
    t = theta_densities(sys, samples=500)
    with mp.workprec(128):
        assert abs(t.identity_lower - 1) < mpf(2) ** -120
        assert abs(t.identity_upper - 1) < mpf(2) ** -120
    assert t.within
    assert t.theta_lower <= t.theta_upper


def test_theta_ternary_values(ternary):
    t = theta_densities(ternary, samples=10)
    assert abs(float(t.theta_lower) - 2 ** -0.6309297535714574) < 1e-15
    assert t.theta_upper == 1


def test_theta_scope(gu):
    with pytest.raises(ScopeError):
        theta_densities(gu, samples=1)


def test_cdf_probe(ternary):
    rep = empirical_cdf_probe(ternary, 1.3, [6, 8])
    assert all(s > 0.01 for s in rep.spreads.values())
    assert len(rep.rows) == 2 * 8


def test_cdf_probe_edges(ternary):
    below = empirical_cdf_probe(ternary, 0.5, [6])
    assert all(r[3] == 0 for r in below.rows)
    near_top = empirical_cdf_probe(ternary, 1.999, [8])
    assert all(r[3] > 0.95 for r in near_top.rows)
    with pytest.raises(OutOfInterval):
        empirical_cdf_probe(ternary, 0.5, [6], strict=True)
