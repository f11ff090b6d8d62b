import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from cantorlab.hp import (PowerRatio, PowerScale, exact_fraction, iroot, perfect_power, resolve_precision,
                          shortlist, ulp_bound)


def test_perfect_power():
    assert perfect_power(8) == (2, 3)
    assert perfect_power(36) == (6, 2)
    assert perfect_power(7) == (7, 1)
    assert iroot(10 ** 40 + 1, 4) == 10 ** 10


@given(st.integers(2, 50), st.integers(1, 6))
def test_perfect_power_property(g, k):
    base, e = perfect_power(g ** k)
    assert base ** e == g ** k and e >= k


def test_rational_alpha_detected():
    assert PowerScale(2, 4).alpha_fraction == 2
    assert PowerScale(4, 8).alpha_fraction == Fraction(3, 2)
    assert PowerScale(2, 3).alpha_fraction is None


def test_exact_ties_ternary():
    sc = PowerScale(2, 3)
    # 3/2^a = 9/4^a = 27/8^a = 1
    one = PowerRatio(1, 1)
    for r in (PowerRatio(3, 2), PowerRatio(9, 4), PowerRatio(27, 8)):
        assert sc.exact_equal(r, one) is True
        assert sc.compare(r, one) == 0
    assert sc.exact_equal(PowerRatio(8, 4), PowerRatio(3, 2)) is False


def test_compare_separates_close_values():
    sc = PowerScale(3, 5)
    a, b = PowerRatio(4, 2), PowerRatio(7, 5)
    assert sc.compare(a, b) == 1 and sc.compare(b, a) == -1


def test_select_ties_to_smallest_index():
    sc = PowerScale(2, 3)
    items = [(7, PowerRatio(27, 8)), (3, PowerRatio(9, 4)), (1, PowerRatio(3, 2)), (5, PowerRatio(21, 6))]
    idx, r = sc.select(items, "min")
    assert idx == 1 and r == PowerRatio(3, 2)
    with pytest.raises(ValueError):
        sc.select([], "min")


def test_identical_values_compare_equal_silently():
    sc = PowerScale(6, 7)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert sc.compare(PowerRatio(2, 6), PowerRatio(2, 6)) == 0
        assert sc.compare(PowerRatio(5, 1), PowerRatio(5, 1)) == 0


def test_inseparable_but_unequal_raises(monkeypatch):
    sc = PowerScale(2, 3)
    # force the intervals to overlap so only the exact test decides
    monkeypatch.setattr(sc, "interval", lambda r, bits: __import__("mpmath").iv.mpf([0, 10]))
    with pytest.raises(ArithmeticError):
        sc.compare(PowerRatio(8, 4), PowerRatio(3, 2))


def test_undecidable_overlap_warns(monkeypatch):
    sc = PowerScale(6, 7)
    monkeypatch.setattr(sc, "interval", lambda r, bits: __import__("mpmath").iv.mpf([0, 10]))
    with pytest.warns(RuntimeWarning):
        assert sc.compare(PowerRatio(2, 5), PowerRatio(3, 7)) == 0


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_sign_affine(c0, c1):
    sc = PowerScale(3, 5)
    with mp.workprec(200):
        v = c0 + c1 * sc.alpha(200)
    expect = (v > 0) - (v < 0)
    assert sc.sign_affine(c0, c1) == expect


def test_sign_affine_rational_alpha():
    sc = PowerScale(2, 4)
    assert sc.sign_affine(-2, 1) == 0
    assert sc.sign_affine(Fraction(-5, 2), 1) == -1


def test_alpha_precision_cached():
    sc = PowerScale(2, 3)
    with mp.workprec(300):
        ref = mp.log(3) / mp.log(2)
        assert abs(sc.alpha(256) - ref) < mpf(2) ** -250
    assert sc.alpha(128) is sc.alpha(128)


def test_value_and_interval_agree():
    sc = PowerScale(3, 5)
    r = PowerRatio(123, 45)
    v = sc.value(r, 128)
    iv_ = sc.interval(r, 128)
    assert iv_.a <= v <= iv_.b


def test_shortlist():
    v = np.array([1.0, 2.0, 1.0 + 1e-12, 3.0])
    assert list(shortlist(v, "min")) == [0, 2]
    assert list(shortlist(v, "max")) == [3]


def test_exact_fraction():
    assert exact_fraction(0.5) == Fraction(1, 2)
    assert exact_fraction("4/3") == Fraction(4, 3)
    assert exact_fraction(mpf(0.25)) == Fraction(1, 4)
    assert exact_fraction(mpf(12)) == 12
    with pytest.raises(TypeError):
        exact_fraction(object())


def test_precision_env(monkeypatch):
    monkeypatch.setenv("CANTORLAB_PRECISION", "200")
    assert resolve_precision(None) == 200
    assert resolve_precision(80) == 80
    monkeypatch.setenv("CANTORLAB_PRECISION", "junk")
    assert resolve_precision(None) == 128


def test_ulp_bound_positive():
    assert ulp_bound(0, 64) > 0
    assert ulp_bound(1, 64) < mpf(2) ** -60
