from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from cantorlab import (DigitWord, QuadraticFamily, cantor_table, cantor_value, delta_cantor,
                       from_digits, make_system, quadratic_system, ratio, to_digits)
from cantorlab.core import _digit_map_value, _recurrence_value, ratio_array
from cantorlab.errors import DigitOutOfRange, NonMonotoneMap, RangeError, StrategyMismatch, TrivialMap

from strategies import any_maps, scope_maps


# -- validation ---------------------------------------------------------------

def test_ternary_system(ternary):
    assert ternary.theorem_scope
    assert abs(float(ternary.alpha) - 1.5849625007211562) < 1e-15
    assert ternary.q == 3 and ternary.delta_f == (2,) and ternary.sum_f == 2


def test_gawron_ulas_outside_scope(gu):
    assert not gu.theorem_scope
    with mp.workprec(128):
        assert gu.alpha == 2


def test_square_system(square):
    assert square.theorem_scope
    with mp.workprec(200):
        assert abs(square.alpha_at(200) - mp.log(5) / mp.log(3)) < mpf(2) ** -190


@pytest.mark.parametrize("values,p,exc", [
    ([0, 2, 1], 3, NonMonotoneMap),
    ([0, 1], 1, TrivialMap),
    ([0, 1, 2], 2, TrivialMap),
    ([0, 5], 3, RangeError),
    ([0, 1, 2], 1, RangeError),
])
def test_validation_errors(values, p, exc):
    with pytest.raises(exc):
        make_system(values, p)


def test_identity_with_larger_p_is_allowed():
    s = make_system([0, 1], 3)
    assert not s.theorem_scope and s.strict


def test_scope_flags():
    assert not make_system([0, 1, 1, 3], 4).strict
    assert not make_system([1, 3], 3).theorem_scope
    assert make_system([0, 1, 3], 3).theorem_scope


@given(scope_maps())
def test_delta_f_sums_to_f_m(sys):
    assert sum(sys.delta_f) == sys.f[-1]
    assert sys.alpha > 1


def test_quadratic_family_validity():
    assert QuadraticFamily(1, 0, 2).is_valid()
    assert QuadraticFamily(-1, 6, 2).to_map().values == (0, 5, 8)
    assert not QuadraticFamily(-1, 1, 2).is_valid()
    with pytest.raises(RangeError):
        quadratic_system(0, 1, 3)      # identity


# -- digits -------------------------------------------------------------------

def test_digit_examples():
    assert to_digits(5, 2).digits == (1, 0, 1)
    assert from_digits(DigitWord(3, (2, 0, 2))) == 20
    z = to_digits(0, 7)
    assert z.digits == () and from_digits(z) == 0 and z.is_canonical


def test_digit_out_of_range():
    with pytest.raises(DigitOutOfRange):
        DigitWord(3, (1, 3))


@given(st.integers(0, 10 ** 6 - 1), st.integers(2, 11))
def test_round_trip(n, b):
    w = to_digits(n, b)
    assert from_digits(w) == n and w.is_canonical


def test_round_trip_exhaustive_small():
    for b in range(2, 12):
        for n in range(0, 5000):
            assert from_digits(to_digits(n, b)) == n


# -- values -------------------------------------------------------------------

def test_value_examples(ternary, square):
    assert cantor_value(ternary, 5) == 20
    assert cantor_value(ternary, 0) == cantor_value(square, 0) == 0
    assert cantor_value(square, 5) == 9
    # OEIS A005823 (index shifted so that C_0 = 0)
    assert [cantor_value(ternary, n) for n in range(8)] == [0, 2, 6, 8, 18, 20, 24, 26]


def test_strategies_agree_exhaustively(ternary, square, gu):
    for sys in (ternary, square, gu, make_system([0, 3, 4, 9])):
        table = cantor_table(sys, 10 ** 5 - 1)
        for n in range(0, 10 ** 5, 7):
            assert _digit_map_value(sys, n) == _recurrence_value(sys, n) == table[n]


@given(any_maps(), st.integers(0, 10 ** 12))
def test_strategies_agree_random(sys, n):
    assert _digit_map_value(sys, n) == _recurrence_value(sys, n)


def test_strategy_mismatch_is_raised(ternary, monkeypatch):
    import cantorlab.core as core
    monkeypatch.setattr(core, "_recurrence_value", lambda s, n: -1)
    with pytest.raises(StrategyMismatch):
        cantor_value(ternary, 3)


@given(any_maps(), st.integers(1, 10 ** 6), st.integers(0, 8))
def test_zero_padding(sys, n, k):
    P = sys.radix
    # each appended zero digit contributes f(0)
    pad = sys.f[0] * (P ** k - 1) // (P - 1)
    assert cantor_value(sys, n * sys.src_base ** k) == P ** k * cantor_value(sys, n) + pad


@given(scope_maps(), st.integers(1, 10 ** 6), st.integers(0, 8))
def test_zero_padding_scope(sys, n, k):
    assert cantor_value(sys, n * sys.src_base ** k) == sys.q ** k * cantor_value(sys, n)


@given(scope_maps(), st.integers(2, 10 ** 9))
def test_growth_bound(sys, n):
    if n < sys.m + 1:
        return
    assert Fraction(cantor_value(sys, n), n) >= Fraction(sys.f[-1] + sys.m + 1, 2 * sys.m + 1)


@pytest.mark.parametrize("name", ["ternary", "square"])
def test_appending_m_decreases_ratio(name, request):
    sys = request.getfixturevalue(name)
    M, m = sys.src_base, sys.m
    r = ratio_array(sys, M * 10 ** 4 + m)
    n = np.arange(m + 1, 10 ** 4 + 1)
    assert np.all(r[M * n + m - 1] <= r[n - 1] * (1 + 1e-12))


@given(scope_maps())
def test_appending_m_decreases_ratio_random_maps(sys):
    M, m = sys.src_base, sys.m
    r = ratio_array(sys, M * 400 + m)
    n = np.arange(m + 1, 401)
    assert np.all(r[M * n + m - 1] <= r[n - 1] * (1 + 1e-12))


def test_table_overflow_uses_python_ints():
    sys = make_system([0, 9], 9)
    t = cantor_table(sys, 2 ** 20)
    assert t.dtype == object
    assert t[2 ** 20] == 10 ** 20 * 9


# -- differences --------------------------------------------------------------

def test_delta_examples(ternary, square):
    assert delta_cantor(ternary, 2) == 4
    assert delta_cantor(ternary, 1) == 2 and delta_cantor(square, 1) == 1
    assert delta_cantor(square, 3) == 1


@given(any_maps(), st.integers(1, 3000))
def test_delta_sum(sys, n):
    assert sum(delta_cantor(sys, k) for k in range(1, n + 1)) == cantor_value(sys, n)


# -- ratios -------------------------------------------------------------------

def test_ratio_examples(ternary, square):
    assert ratio(ternary, 1) == 2
    with mp.workprec(200):
        o3 = 8 / mp.exp(mp.log(3) * mp.log(3) / mp.log(2))
        assert abs(ratio(ternary, 3, 128) - o3) < 4 * mpf(2) ** -128 * o3
        oracle = 4 / mp.exp(mp.log(2) * mp.log(5) / mp.log(3))
        assert abs(ratio(square, 2, 128) - oracle) < 4 * mpf(2) ** -128 * oracle
    assert abs(float(ratio(ternary, 3)) - 1.4024) < 1e-4
    assert abs(float(ratio(square, 2)) - 1.44897) < 1e-5


def test_ratio_precision_is_configurable(ternary):
    a, b = ratio(ternary, 3, 64), ratio(ternary, 3, 256)
    with mp.workprec(256):
        assert 0 < abs(a - b) < mpf(2) ** -60


def test_ratio_array_matches_ratio(square):
    arr = ratio_array(square, 500)
    for n in (1, 2, 17, 499):
        assert abs(arr[n - 1] - float(ratio(square, n))) < 1e-14
