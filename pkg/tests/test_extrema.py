import pytest
from hypothesis import given, settings
from mpmath import mp, mpf

from cantorlab import QuadraticFamily, make_system, quadratic_system
from cantorlab.core import ratio_array
from cantorlab.errors import ScanTooLarge, ScopeError
from cantorlab.extrema import (brute_force_extrema, ell0, ell0_report, empirical_thresholds,
                               infimum_thm, max_slope, quadratic_extrema, quadratic_inf_closed_form,
                               quadratic_sup_closed_form, supremum_thm, theorem_extrema)
from cantorlab.hp import PowerRatio

from strategies import scope_maps


def _alpha(sys, prec=256):
    with mp.workprec(prec):
        return mp.log(sys.radix) / mp.log(sys.src_base)


def _pow_ratio(num, base, a, prec=256):
    with mp.workprec(prec):
        return mpf(num) / mp.exp(a * mp.log(base))


def _ell0_oracle(sys):
    # plain loop at 256 bits, independent of the certified comparison
    rhs = max_slope(sys)
    a = _alpha(sys)
    ell = 1
    with mp.workprec(256):
        while a * mpf(sys.q) ** ell / mpf(sys.src_base) ** (ell + 1) < mpf(rhs.numerator) / rhs.denominator:
            ell += 1
    return ell


def test_ell0_examples(ternary, square):
    assert ell0(ternary) == 3 == _ell0_oracle(ternary)
    assert ell0(square) == 4 == _ell0_oracle(square)
    assert max_slope(square) == 3


def test_ell0_one_when_slope_small():
    # m=1, p=15: alpha = 4 and 4 * 16/4 >= 15
    sys = make_system([0, 15])
    assert max_slope(sys) == 15
    assert ell0(sys) == 1


@given(scope_maps(max_m=3, max_p=9))
def test_ell0_boundary(sys):
    L = ell0(sys)
    assert L == _ell0_oracle(sys)


def test_scope_errors(gu):
    for fn in (ell0, supremum_thm, infimum_thm, empirical_thresholds):
        with pytest.raises(ScopeError):
            fn(gu) if fn is not empirical_thresholds else fn(gu, 100)


def test_scan_cap(square):
    with pytest.raises(ScanTooLarge):
        infimum_thm(square, scan_cap=10)
    assert infimum_thm(square, scan_cap=10, allow_large=True).witness == 4


def test_ternary_extrema(ternary):
    s, i = supremum_thm(ternary), infimum_thm(ternary)
    assert s.value == 2 and s.witness == 1
    # (C_n+1)/(n+1)^alpha = 1 exactly at n = 1, 3, 7; ties go to the smallest n
    assert i.value == 1 and i.witness == 1
    assert i.exact == PowerRatio(3, 2)


def test_square_extrema_against_oracle(square):
    a = _alpha(square)
    sup_o, inf_o = _pow_ratio(4, 2, a), _pow_ratio(7, 5, a)
    s, i = supremum_thm(square), infimum_thm(square)
    with mp.workprec(256):
        assert abs(s.value - sup_o) < mpf(2) ** -120
        assert abs(i.value - inf_o) < mpf(2) ** -120
    assert (s.witness, i.witness) == (2, 4)
    # the decimals 1.4489737 / 0.662468 quoted alongside these closed forms are slightly off
    assert abs(float(sup_o) - 1.4489687487) < 1e-10
    assert abs(float(inf_o) - 0.6624078826) < 1e-10


def test_negative_a_sup():
    sys = quadratic_system(-1, 6, 2)
    s = supremum_thm(sys)
    assert s.value == 5 and s.witness == 1
    assert infimum_thm(sys).value == 1


@pytest.mark.parametrize("a,b,m,witness", [(1, 0, 2, 2), (1, 1, 2, 1), (-1, 6, 2, 1), (2, -1, 2, 2)])
def test_sup_closed_form_cases(a, b, m, witness):
    fam = QuadraticFamily(a, b, m)
    r = quadratic_sup_closed_form(fam)
    assert r.witness == witness and r.exact == PowerRatio(fam.f(witness), witness)


def test_inf_closed_form_branches():
    r = quadratic_inf_closed_form(QuadraticFamily(-1, 6, 2))
    assert r.value == 1 and r.branch == "a<=0"
    r = quadratic_inf_closed_form(QuadraticFamily(1, 0, 2))
    assert r.witness == 4 and r.consistent and r.branch == "xi=1"
    r = quadratic_inf_closed_form(QuadraticFamily(1, 1, 2))
    assert r.branch == "T(m)<=0" and r.consistent
    assert r.exact == PowerRatio(3, 2)        # (a+b+1)/2^alpha


def test_closed_forms_match_general_algorithm_on_grid():
    checked = 0
    for m in range(1, 6):
        for a in range(-4, 5):
            for b in range(-4, 5):
                fam = QuadraticFamily(a, b, m)
                if not fam.is_valid():
                    continue
                sys = quadratic_system(a, b, m)
                t, q = theorem_extrema(sys), quadratic_extrema(fam)
                assert t.supremum == q.supremum, (a, b, m)
                assert t.infimum == q.infimum, (a, b, m)
                assert q.extras["inf_consistent"], (a, b, m)
                checked += 1
    assert checked > 100


@pytest.mark.parametrize("name", ["ternary", "square"])
def test_brute_force_agrees(name, request):
    sys = request.getfixturevalue(name)
    t = theorem_extrema(sys)
    b = brute_force_extrema(sys, sys.src_base ** 8)
    assert t.supremum == b.supremum and t.infimum == b.infimum
    assert b.extras["plain_infimum"] >= b.infimum
    assert b.extras["slack_constant"] >= 0


def test_brute_force_outside_scope(gu):
    b = brute_force_extrema(gu, 4 ** 8)
    assert b.supremum == 2 and b.sup_witness == 1 and b.ell0 is None
    lo = mpf(2) / 3
    assert lo < b.extras["plain_infimum"] < lo + mpf(1) / 100


def test_brute_force_needs_room(ternary):
    with pytest.raises(ValueError):
        brute_force_extrema(ternary, 1)


@pytest.mark.parametrize("name", ["ternary", "square"])
def test_extrema_bound_every_ratio(name, request):
    sys = request.getfixturevalue(name)
    t = theorem_extrema(sys)
    r = ratio_array(sys, sys.src_base ** 9)
    assert r.max() <= float(t.supremum) * (1 + 1e-12)
    assert r.min() >= float(t.infimum) * (1 - 1e-12)


@given(scope_maps(max_m=3, max_p=7))
@settings(max_examples=25)
def test_theorem_matches_scan_random(sys):
    try:
        t = theorem_extrema(sys, scan_cap=10 ** 6)
    except ScanTooLarge:
        return
    b = brute_force_extrema(sys, min(sys.src_base ** 8, 10 ** 5))
    assert t.supremum == b.supremum
    assert t.infimum <= b.infimum
    assert b.infimum <= b.extras["plain_infimum"]


def test_thresholds(ternary, square):
    t = empirical_thresholds(ternary, 3 ** 8)
    assert (t.k0, t.k1) == (0, 0)
    s1, s2 = empirical_thresholds(square, 3 ** 8), empirical_thresholds(square, 2 * 3 ** 8)
    assert (s1.k0, s1.k1) == (0, 1)
    assert (s2.k0, s2.k1) == (s1.k0, s1.k1)


def test_threshold_chain_holds_beyond_k1(square):
    t = empirical_thresholds(square, 3 ** 7)
    M, m = 3, 2
    r = ratio_array(square, M * 3 ** 7 + m)
    for n in range(M ** t.k1, 3 ** 7 + 1):
        chain = [r[M * n + e - 1] for e in range(m + 1)]
        assert all(x > y for x, y in zip(chain, chain[1:]))


def test_ell0_report(ternary, square):
    rep = ell0_report(square)
    assert rep.ell0 == 4 and rep.empirical_ell == 2 and rep.conjecture_holds
    assert ell0_report(ternary).empirical_ell == 1
