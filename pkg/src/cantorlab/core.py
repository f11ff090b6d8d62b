"""Digit-map systems and exact Cantor-integer evaluation.

A system maps the base-(m+1) digits of n through f and reads the result in
base p+1.  With f = 2x, m = 1, p = 2 this gives the integers whose ternary
expansion avoids the digit 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from mpmath import mpf

from .errors import DigitOutOfRange, NonMonotoneMap, RangeError, StrategyMismatch, TrivialMap
from .hp import PowerRatio, PowerScale, resolve_precision

VERIFY_CAP = 10 ** 5


@dataclass(frozen=True)
class DigitWord:
    """Digits most significant first. The empty word encodes 0."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be at least 2")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        for d in self.digits:
            if not 0 <= d < self.base:
                raise DigitOutOfRange(f"digit {d} not in [0, {self.base - 1}]")

    @property
    def is_canonical(self) -> bool:
        return not self.digits or self.digits[0] != 0

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        if not self.digits:
            return "0"
        if self.base <= 36:
            return "".join("0123456789abcdefghijklmnopqrstuvwxyz"[d] for d in self.digits)
        return ":".join(map(str, self.digits))


def to_digits(n: int, base: int) -> DigitWord:
    if base < 2:
        raise ValueError("base must be at least 2")
    if n < 0:
        raise ValueError("n must be non-negative")
    out = []
    while n:
        n, r = divmod(n, base)
        out.append(r)
    return DigitWord(base, tuple(reversed(out)))


def from_digits(w: DigitWord) -> int:
    total = 0
    for i, d in enumerate(reversed(w.digits)):
        if not 0 <= d < w.base:
            raise DigitOutOfRange(f"digit {d} not in [0, {w.base - 1}]")
        total += d * w.base ** i
    return total


@dataclass(frozen=True)
class BaseConversionMap:
    m: int
    p: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    @property
    def strict(self) -> bool:
        v = self.values
        return all(a < b for a, b in zip(v, v[1:]))

    @property
    def theorem_scope(self) -> bool:
        return self.strict and self.values[0] == 0 and self.values[-1] == self.p

    @property
    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.values))

    def __call__(self, d: int) -> int:
        return self.values[d]


@dataclass(frozen=True)
class QuadraticFamily:
    """f(x) = a x^2 + b x on {0..m}, with p = f(m)."""

    a: int
    b: int
    m: int

    @property
    def p(self) -> int:
        return self.a * self.m ** 2 + self.b * self.m

    def f(self, x: int) -> int:
        return self.a * x * x + self.b * x

    def is_valid(self) -> bool:
        # 2ax + b is affine in x, so positivity at both ends is enough
        if self.m < 1 or 2 * self.a + self.b <= 0 or 2 * self.a * self.m + self.b <= 0:
            return False
        vals = [self.f(x) for x in range(self.m + 1)]
        if any(v < 0 or v > self.p for v in vals):
            return False
        if any(a >= b for a, b in zip(vals, vals[1:])):
            return False
        return self.p > self.m

    def to_map(self) -> BaseConversionMap:
        return BaseConversionMap(self.m, self.p, tuple(self.f(x) for x in range(self.m + 1)))


@dataclass(frozen=True)
class CantorSystem:
    map: BaseConversionMap
    scale: PowerScale = field(compare=False, repr=False)
    verify_cap: int = field(default=VERIFY_CAP, compare=False)

    @property
    def m(self) -> int:
        return self.map.m

    @property
    def p(self) -> int:
        return self.map.p

    @property
    def f(self) -> tuple[int, ...]:
        return self.map.values

    @property
    def src_base(self) -> int:
        return self.map.m + 1

    @property
    def radix(self) -> int:
        return self.map.p + 1

    @property
    def q(self) -> int:
        return self.map.values[-1] + 1

    @property
    def alpha(self) -> mpf:
        return self.scale.alpha()

    def alpha_at(self, prec: int | None = None) -> mpf:
        return self.scale.alpha(prec)

    @property
    def delta_f(self) -> tuple[int, ...]:
        v = self.map.values
        return tuple(v[r] - v[r - 1] for r in range(1, len(v)))

    @property
    def sum_f(self) -> int:
        return sum(self.map.values[1:])

    @property
    def theorem_scope(self) -> bool:
        return self.map.theorem_scope

    @property
    def strict(self) -> bool:
        return self.map.strict

    @cached_property
    def _f_array(self) -> np.ndarray:
        return np.array(self.map.values, dtype=np.int64)

    def label(self) -> str:
        return f"table:{','.join(map(str, self.f))};p={self.p}"

    def __hash__(self):
        return hash(self.map)


def validate_system(fmap: BaseConversionMap, verify_cap: int = VERIFY_CAP) -> CantorSystem:
    m, p, v = fmap.m, fmap.p, fmap.values
    if len(v) != m + 1:
        raise RangeError(f"expected {m + 1} values, got {len(v)}")
    if any(a > b for a, b in zip(v, v[1:])):
        raise NonMonotoneMap(f"values decrease: {v}")
    if any(x < 0 or x > p for x in v):
        raise RangeError(f"values must lie in [0, {p}]")
    # checked before m < p, since an identity map has p = m
    if fmap.is_identity and v[-1] == p:
        raise TrivialMap("identity map with f(m) = p")
    if m < 1 or m >= p:
        raise RangeError(f"need 1 <= m < p, got m={m}, p={p}")
    return CantorSystem(fmap, PowerScale(m + 1, p + 1), verify_cap)


def make_system(values: Sequence[int], p: int | None = None, **kw) -> CantorSystem:
    values = tuple(int(v) for v in values)
    if p is None:
        p = values[-1]
    return validate_system(BaseConversionMap(len(values) - 1, p, values), **kw)


def quadratic_system(a: int, b: int, m: int) -> CantorSystem:
    fam = QuadraticFamily(a, b, m)
    if not fam.is_valid():
        raise RangeError(f"quadratic family ({a}, {b}, {m}) is not a valid digit map")
    return validate_system(fam.to_map())


def _digit_map_value(sys: CantorSystem, n: int) -> int:
    src = to_digits(n, sys.src_base)
    return from_digits(DigitWord(sys.radix, tuple(sys.f[d] for d in src.digits)))


def _recurrence_value(sys: CantorSystem, n: int) -> int:
    # C_{Mn'+r} = (p+1) C_{n'} + f(r), C_0 = 0
    M, P, f = sys.src_base, sys.radix, sys.f
    if n == 0:
        return 0
    n1, r = divmod(n, M)
    return P * _recurrence_value(sys, n1) + f[r]


def cantor_value(sys: CantorSystem, n: int, verify: bool | None = None) -> int:
    """C_n. Below the system's verify cap both evaluation routes must agree."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0
    a = _digit_map_value(sys, n)
    if verify is None:
        verify = n < sys.verify_cap
    if verify:
        b = _recurrence_value(sys, n)
        if a != b:
            raise StrategyMismatch(f"C_{n}: digit map {a} != recurrence {b}")
    return a


def delta_cantor(sys: CantorSystem, n: int, verify: bool | None = None) -> int:
    """C_n - C_{n-1} from the digit recurrence."""
    if n < 1:
        raise ValueError("n must be positive")
    M, P, f = sys.src_base, sys.radix, sys.f
    if n == 1:
        d = f[1]
    else:
        n1, r = divmod(n, M)
        if r == 0:
            d = P * delta_cantor(sys, n1, verify=False) + f[0] - f[-1]
        else:
            d = f[r] - f[r - 1]
    if verify is None:
        verify = n < sys.verify_cap
    if verify:
        e = cantor_value(sys, n) - cantor_value(sys, n - 1)
        if d != e:
            raise StrategyMismatch(f"delta C_{n}: recurrence {d} != difference {e}")
    return d


def ratio(sys: CantorSystem, n: int, prec: int | None = None) -> mpf:
    """C_n / n^alpha."""
    if n < 1:
        raise ValueError("n must be positive")
    return sys.scale.value(PowerRatio(cantor_value(sys, n), n), resolve_precision(prec))


def ratio_exact(sys: CantorSystem, n: int) -> PowerRatio:
    return PowerRatio(cantor_value(sys, n), n)


def inf_form_exact(sys: CantorSystem, n: int) -> PowerRatio:
    """(C_n + 1) / (n+1)^alpha."""
    return PowerRatio(cantor_value(sys, n) + 1, n + 1)


def cantor_table(sys: CantorSystem, N: int) -> np.ndarray:
    """C_0..C_N as int64, or as an object array of Python ints on overflow."""
    if N < 0:
        raise ValueError("N must be non-negative")
    M, P = sys.src_base, sys.radix
    ndig = len(to_digits(max(N, 1), M).digits)
    if P ** ndig < 2 ** 62:
        out = np.zeros(N + 1, dtype=np.int64)
        f = sys._f_array
    else:
        out = np.zeros(N + 1, dtype=object)
        f = np.array(sys.f, dtype=object)
    top = min(N, M - 1)
    out[1:top + 1] = f[1:top + 1]
    lo = M
    while lo <= N:
        hi = min(N, lo * M - 1)
        idx = np.arange(lo, hi + 1)
        out[lo:hi + 1] = P * out[idx // M] + f[idx % M]
        lo *= M
    return out


def ratio_array(sys: CantorSystem, N: int, table: np.ndarray | None = None) -> np.ndarray:
    """Float64 C_n / n^alpha for n = 1..N (index 0 holds n = 1)."""
    C = cantor_table(sys, N) if table is None else table
    n = np.arange(1, N + 1, dtype=float)
    return C[1:N + 1].astype(float) / n ** float(sys.alpha)


def inf_form_array(sys: CantorSystem, N: int, table: np.ndarray | None = None) -> np.ndarray:
    """Float64 (C_n + 1) / (n+1)^alpha for n = 1..N."""
    C = cantor_table(sys, N) if table is None else table
    n = np.arange(2, N + 2, dtype=float)
    return (C[1:N + 1].astype(float) + 1.0) / n ** float(sys.alpha)


def ternary_cantor() -> CantorSystem:
    return make_system([0, 2], 2)


def gawron_ulas() -> CantorSystem:
    return make_system([0, 2], 3)


def square_digits() -> CantorSystem:
    return quadratic_system(1, 0, 2)

