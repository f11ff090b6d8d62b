"""Hurwitz zeta by Euler-Maclaurin summation.

zeta(s, a) = sum_{n<N} (n+a)^-s + (N+a)^(1-s)/(s-1) + (N+a)^-s/2
             + sum_j B_2j/(2j)! (s)_(2j-1) (N+a)^(-s-2j+1) + remainder

The remainder is estimated by the first omitted correction term.  At 53 bits
or less the direct sum runs in numpy complex128.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpc, mpf

from .errors import PoleAtOne
from .hp import GUARD_BITS, Estimate, resolve_precision

MAX_TERMS = 48


@dataclass(frozen=True)
class ZetaParams:
    shift: int | None = None
    bernoulli_terms: int = 8
    target_abs_error: float | None = None


@lru_cache(maxsize=None)
def _bernoulli_ratios(prec: int, count: int) -> tuple:
    """B_2j / (2j)! for j = 1..count at the given precision."""
    with mp.workprec(prec):
        return tuple(mp.bernoulli(2 * j) / mp.factorial(2 * j) for j in range(1, count + 1))


@lru_cache(maxsize=None)
def _bernoulli_floats(count: int) -> tuple:
    return tuple(float(b) for b in _bernoulli_ratios(80, count))


def _default_shift(s) -> int:
    return max(10, math.ceil(2 * abs(complex(s).imag)), math.ceil(abs(complex(s)) / 2))


def _em_mp(s, a, N: int, terms: int, prec: int):
    with mp.workprec(prec):
        s = mpc(s)
        a = mpf(a)
        total = mp.fsum((n + a) ** (-s) for n in range(N))
        w = N + a
        total += w ** (1 - s) / (s - 1) + w ** (-s) / 2
        br = _bernoulli_ratios(prec, terms + 1)
        poch = s
        wpow = w ** (-s - 1)
        w2 = w * w
        omitted = mpf(0)
        for j in range(1, terms + 2):
            term = br[j - 1] * poch * wpow
            if j == terms + 1:
                omitted = abs(term)
                break
            total += term
            poch *= (s + 2 * j - 1) * (s + 2 * j)
            wpow /= w2
        return total, omitted


def _em_np(s: complex, a: float, N: int, terms: int):
    n = np.arange(N, dtype=float) + a
    total = complex(np.sum(np.exp(-s * np.log(n))))
    w = N + a
    lw = math.log(w)
    total += np.exp((1 - s) * lw) / (s - 1) + np.exp(-s * lw) / 2
    br = _bernoulli_floats(terms + 1)
    poch = s
    wpow = np.exp((-s - 1) * lw)
    omitted = 0.0
    for j in range(1, terms + 2):
        term = br[j - 1] * poch * wpow
        if j == terms + 1:
            omitted = abs(term)
            break
        total += term
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        wpow /= w * w
    return complex(total), float(omitted)


def hurwitz_zeta_estimate(s, a, prec: int | None = None, params: ZetaParams | None = None) -> Estimate:
    """zeta(s, a) with the first-omitted-term error estimate."""
    prec = resolve_precision(prec)
    params = params or ZetaParams()
    with mp.workprec(prec + GUARD_BITS):
        a_val = mpf(a.numerator) / a.denominator if isinstance(a, Fraction) else mpf(a)
    if a_val <= 0:
        raise ValueError("a must be positive")
    sc = complex(s)
    if abs(sc - 1) < 2.0 ** (-(min(prec, 53) - 10)):
        raise PoleAtOne("s = 1 is a pole")
    N = params.shift or _default_shift(sc)
    terms = params.bernoulli_terms
    fast = prec <= 53
    target = params.target_abs_error
    if target is None:
        target = 2.0 ** (-prec) * 16 if not fast else 1e-15
    while True:
        if fast:
            val, om = _em_np(sc, float(a_val), N, terms)
        else:
            val, om = _em_mp(s, a_val, N, terms, prec + GUARD_BITS)
        scale = max(1.0, abs(complex(val)))
        if om <= target * scale:
            break
        if terms < MAX_TERMS:
            terms += 8
        else:
            N *= 2
            terms = params.bernoulli_terms
    if fast:
        return Estimate(val, om)
    with mp.workprec(prec):
        return Estimate(+val, +om)


def hurwitz_zeta(s, a, prec: int | None = None, params: ZetaParams | None = None):
    return hurwitz_zeta_estimate(s, a, prec, params).value


def riemann_zeta(s, prec: int | None = None, params: ZetaParams | None = None):
    return hurwitz_zeta(s, 1, prec, params)
