"""Precision handling and certified comparison of values num / base**alpha.

Everything here works on plain mpmath numbers. The working precision is
always an explicit bit count; nothing touches the global mpmath context
outside a ``workprec`` block.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

import numpy as np
from mpmath import iv, mp, mpf

DEFAULT_PRECISION = 128
GUARD_BITS = 32
ENV_PRECISION = "CANTORLAB_PRECISION"


def default_precision() -> int:
    raw = os.environ.get(ENV_PRECISION)
    if raw:
        try:
            bits = int(raw)
        except ValueError:
            return DEFAULT_PRECISION
        if bits >= 53:
            return bits
    return DEFAULT_PRECISION


def resolve_precision(prec: int | None) -> int:
    return default_precision() if prec is None else int(prec)


@dataclass(frozen=True)
class Estimate:
    """A value together with an absolute error bound."""

    value: Any
    error: Any

    def __float__(self):
        return float(self.value)


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def perfect_power(n: int) -> tuple[int, int]:
    """Write n = g**k with k maximal. Returns (g, k)."""
    if n < 2:
        return n, 1
    for k in range(n.bit_length(), 1, -1):
        g = iroot(n, k)
        if g > 1 and g ** k == n:
            return g, k
    return n, 1


def _log_in_base(x: Fraction, g: int) -> int | None:
    """Return j with x == g**j, or None."""
    if x <= 0:
        return None
    num, den = x.numerator, x.denominator
    if den == 1:
        j, v = 0, num
        while v % g == 0:
            v //= g
            j += 1
        return j if v == 1 else None
    if num == 1:
        j = _log_in_base(Fraction(den), g)
        return None if j is None else -j
    return None


@dataclass(frozen=True, order=True)
class PowerRatio:
    """The real number num / base**alpha for the alpha of a given scale."""

    num: int
    base: int


class PowerScale:
    """Exponent alpha = log(dst) / log(src) with cached high-precision values."""

    def __init__(self, src: int, dst: int):
        if src < 2 or dst < 2:
            raise ValueError("bases must be at least 2")
        self.src = src
        self.dst = dst
        self._alpha: dict[int, mpf] = {}
        g, k = perfect_power(src)
        h, l = perfect_power(dst)
        self._g, self._k = g, k
        self.alpha_fraction = Fraction(l, k) if g == h else None

    def __repr__(self):
        return f"PowerScale({self.src}, {self.dst})"

    def alpha(self, prec: int | None = None) -> mpf:
        prec = resolve_precision(prec)
        a = self._alpha.get(prec)
        if a is None:
            with mp.workprec(prec + GUARD_BITS):
                raw = mp.log(self.dst) / mp.log(self.src)
            with mp.workprec(prec):
                a = +raw
            self._alpha[prec] = a
        return a

    def alpha_interval(self, prec: int):
        old = iv.prec
        try:
            iv.prec = prec
            return iv.log(self.dst) / iv.log(self.src)
        finally:
            iv.prec = old

    def power(self, base: int, prec: int | None = None) -> mpf:
        """base ** alpha, correctly rounded up to the guard bits."""
        prec = resolve_precision(prec)
        with mp.workprec(prec + GUARD_BITS):
            a = mp.log(self.dst) / mp.log(self.src)
            v = mp.exp(a * mp.log(base))
        with mp.workprec(prec):
            return +v

    def value(self, r: PowerRatio, prec: int | None = None) -> mpf:
        prec = resolve_precision(prec)
        with mp.workprec(prec + GUARD_BITS):
            if r.base == 1:
                v = mpf(r.num)
            else:
                a = mp.log(self.dst) / mp.log(self.src)
                v = mpf(r.num) / mp.exp(a * mp.log(r.base))
        with mp.workprec(prec):
            return +v

    def interval(self, r: PowerRatio, prec: int):
        old = iv.prec
        try:
            iv.prec = prec
            if r.base == 1:
                return iv.mpf(r.num)
            a = iv.log(self.dst) / iv.log(self.src)
            return iv.mpf(r.num) / iv.exp(a * iv.log(r.base))
        finally:
            iv.prec = old

    def exact_equal(self, x: PowerRatio, y: PowerRatio) -> bool | None:
        """Decide x == y exactly when number theory allows it, else None."""
        if x.num == 0 or y.num == 0:
            return x.num == y.num
        lhs = Fraction(x.num, y.num)
        ratio = Fraction(x.base, y.base)
        if ratio == 1:
            return lhs == 1
        # num_x / num_y == (base_x / base_y) ** alpha
        j = _log_in_base(ratio, self._g)
        if j is not None:
            # ratio = g**j and src = g**k, so ratio**alpha = dst**(j/k)
            return lhs ** self._k == Fraction(self.dst) ** j
        if self.alpha_fraction is not None:
            u, v = self.alpha_fraction.numerator, self.alpha_fraction.denominator
            return lhs ** v == ratio ** u
        return None

    def compare(self, x: PowerRatio, y: PowerRatio, prec: int | None = None) -> int:
        """Sign of x - y, certified by interval arithmetic.

        Exact ties are detected algebraically. If the intervals still overlap
        at four times the working precision the values are reported equal
        with a warning.
        """
        if x == y:
            return 0
        eq = self.exact_equal(x, y)
        if eq:
            return 0
        prec = resolve_precision(prec)
        for bits in (prec, 2 * prec, 4 * prec):
            a = self.interval(x, bits)
            b = self.interval(y, bits)
            if a.b < b.a:
                return -1
            if a.a > b.b:
                return 1
        if eq is False:
            raise ArithmeticError(f"cannot separate {x} and {y} at {4 * prec} bits")
        warnings.warn(f"treating {x} and {y} as equal after {4 * prec} bits", RuntimeWarning)
        return 0

    def select(self, items: Iterable[tuple[int, PowerRatio]], mode: str = "min",
               prec: int | None = None) -> tuple[int, PowerRatio]:
        """Certified argmin/argmax. Ties go to the smallest index."""
        if mode not in ("min", "max"):
            raise ValueError(mode)
        best = None
        for idx, r in sorted(items, key=lambda t: t[0]):
            if best is None:
                best = (idx, r)
                continue
            c = self.compare(r, best[1], prec)
            if (mode == "min" and c < 0) or (mode == "max" and c > 0):
                best = (idx, r)
        if best is None:
            raise ValueError("empty candidate set")
        return best

    def sign_affine(self, c0, c1, prec: int | None = None) -> int:
        """Sign of c0 + c1*alpha for rationals c0, c1."""
        c0, c1 = Fraction(c0), Fraction(c1)
        if c1 == 0:
            return (c0 > 0) - (c0 < 0)
        if self.alpha_fraction is not None:
            v = c0 + c1 * self.alpha_fraction
            return (v > 0) - (v < 0)
        # alpha is irrational here, so c0 + c1*alpha is never zero
        prec = resolve_precision(prec)
        bits = prec
        while True:
            a = self.alpha_interval(bits)
            old = iv.prec
            try:
                iv.prec = bits
                v = iv.mpf(c0.numerator) / c0.denominator + iv.mpf(c1.numerator) / c1.denominator * a
            finally:
                iv.prec = old
            if v.a > 0:
                return 1
            if v.b < 0:
                return -1
            bits *= 2


def shortlist(values: np.ndarray, mode: str = "min", rel: float = 1e-9) -> np.ndarray:
    """Indices whose float value is within a relative slack of the extreme.

    Values are assumed positive. The certified step then picks among them.
    """
    values = np.asarray(values, dtype=float)
    if mode == "min":
        best = values.min()
        return np.nonzero(values <= best * (1 + rel))[0]
    best = values.max()
    return np.nonzero(values >= best * (1 - rel))[0]


def to_mpf(x, prec: int | None = None) -> mpf:
    prec = resolve_precision(prec)
    with mp.workprec(prec):
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return +mpf(x)


def exact_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, float, mpf or decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, str):
        return Fraction(x)
    if hasattr(x, "man_exp"):
        man, exp = x.man_exp
        man = int(man)
        return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def ulp_bound(value, prec: int) -> mpf:
    """A few units in the last place of value at the given precision."""
    with mp.workprec(prec):
        return 4 * abs(mpf(value)) * mpf(2) ** (-prec) + mpf(2) ** (-4 * prec)

