"""Summatory function S(n) = sum_{1<=k<n} C_k and its log-periodic structure.

The Dirichlet series of the first differences has the closed form

    sum dC_n n^-s = (sum_r df(r) zeta(s, r/M) - f(m) zeta(s)) / (P (M^(s-alpha) - 1))

with M = m+1, P = p+1.  Its poles gamma_k = alpha + 2 pi i k / log M give the
Fourier coefficients of the fluctuation F.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from mpmath import mp, mpc, mpf

from .core import CantorSystem, cantor_table, cantor_value
from .errors import NearPole, ScopeError, StrategyMismatch
from .hp import GUARD_BITS, Estimate, resolve_precision
from .zeta import hurwitz_zeta, riemann_zeta

__all__ = [
    "hurwitz_zeta", "riemann_zeta", "zeta_numerator", "delta_dirichlet_series", "dirichlet_partial_sum",
    "s_exact", "periodic_invariant_B", "g_numerator", "g_statistic", "check_g_periodicity",
    "f_coefficient", "f_truncated", "f_tail_bound", "s_formula", "residual_report",
]


def _require_zero_start(sys: CantorSystem):
    if sys.f[0] != 0:
        raise ScopeError("the difference recurrences need f(0) = 0")


def _require_scope(sys: CantorSystem):
    if not sys.theorem_scope:
        raise ScopeError("needs a strictly increasing map with f(0)=0 and f(m)=p")


def _zeta_numerator(sys: CantorSystem, s, prec: int):
    M = sys.src_base
    if prec <= 53:
        total = sum(df * complex(hurwitz_zeta(s, r / M, prec)) for r, df in enumerate(sys.delta_f, 1))
        return total - sys.f[-1] * complex(riemann_zeta(s, prec))
    with mp.workprec(prec):
        total = mp.fsum(df * hurwitz_zeta(s, Fraction(r, M), prec) for r, df in enumerate(sys.delta_f, 1))
        return total - sys.f[-1] * riemann_zeta(s, prec)


def zeta_numerator(sys: CantorSystem, s, prec: int | None = None):
    """sum_r df(r) zeta(s, r/M) - f(m) zeta(s); regular at s = 1."""
    return _zeta_numerator(sys, s, resolve_precision(prec))


def delta_dirichlet_series(sys: CantorSystem, s, prec: int | None = None, margin: float = 0.1,
                           pole_tol: float = 1e-8):
    _require_zero_start(sys)
    prec = resolve_precision(prec)
    alpha = sys.alpha_at(prec)
    if mpc(s).real <= alpha + margin:
        raise ValueError(f"need Re s > alpha + {margin}")
    with mp.workprec(prec + GUARD_BITS):
        den = mp.power(sys.src_base, mpc(s) - sys.alpha_at(prec + GUARD_BITS)) - 1
        if abs(den) < pole_tol:
            raise NearPole(f"s = {s} is within {pole_tol} of a pole")
        v = mpc(_zeta_numerator(sys, s, prec + GUARD_BITS)) / (sys.radix * den)
    with mp.workprec(prec):
        return +v


def _tail_bound(sys: CantorSystem, sigma: float, T: int) -> float:
    """Bound for sum_{n>T} |dC_n| n^-sigma using |dC_n| <= f(m) P^v, v = v_M(n)."""
    M, P, fm = sys.src_base, sys.radix, sys.f[-1]
    r = P / M ** sigma
    total, j = 0.0, 0
    while M ** j <= T:
        X = T // M ** j
        total += fm * r ** j * X ** (1 - sigma) / (sigma - 1)
        j += 1
    zeta_bound = 1 + 1 / (sigma - 1)
    total += fm * zeta_bound * r ** j / (1 - r)
    return total


def dirichlet_partial_sum(sys: CantorSystem, s, T: int) -> Estimate:
    """sum_{n<=T} dC_n n^-s in double precision, with a rigorous tail bound in scope."""
    _require_zero_start(sys)
    C = cantor_table(sys, T)
    dC = np.diff(C.astype(float))
    n = np.arange(1, T + 1, dtype=float)
    sc = complex(s)
    val = complex(np.sum(dC * np.exp(-sc * np.log(n))))
    sigma = sc.real
    if not sys.theorem_scope or sigma <= float(sys.alpha):
        tail = math.inf
    else:
        tail = _tail_bound(sys, sigma, T)
    rnd = 8 * np.finfo(float).eps * float(np.sum(np.abs(dC) * n ** -sigma)) * (1 + abs(sc.imag) * math.log(T))
    return Estimate(val, tail + rnd)


# -- exact sums ---------------------------------------------------------------

def _s_direct(sys: CantorSystem, n: int) -> int:
    if n <= 1:
        return 0
    C = cantor_table(sys, n - 1)
    return sum(int(c) for c in C[1:].tolist())


def _s_recursive(sys: CantorSystem, n: int) -> int:
    M, P, f = sys.src_base, sys.radix, sys.f
    if n <= 1:
        return 0
    n1, r = divmod(n, M)
    if n1 == 0:
        return sum(f[1:r])
    # block j = 0 holds C_0 = 0 rather than f(0)
    out = M * P * _s_recursive(sys, n1) + n1 * sum(f) - f[0]
    if r:
        out += r * P * cantor_value(sys, n1, verify=False) + sum(f[:r])
    return out


def s_exact(sys: CantorSystem, n: int, verify: bool | None = None) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    v = _s_recursive(sys, n)
    if verify is None:
        verify = n < sys.verify_cap
    if verify:
        d = _s_direct(sys, n)
        if d != v:
            raise StrategyMismatch(f"S({n}): recurrence {v} != direct {d}")
    return v


def s_table(sys: CantorSystem, N: int) -> list[int]:
    """S(0..N) by accumulation, as Python ints."""
    C = cantor_table(sys, N).tolist()
    out, acc = [0] * (N + 1), 0
    for k in range(1, N + 1):
        out[k] = acc if k > 1 else 0
        acc += int(C[k])
    return out


def periodic_invariant_B(sys: CantorSystem) -> Fraction:
    _require_scope(sys)
    return Fraction(sys.sum_f, sys.src_base * sys.f[-1])


def g_numerator(sys: CantorSystem, n: int, S: int | None = None) -> int:
    """M f(m) (S(n) + B n), an integer."""
    _require_scope(sys)
    S = s_exact(sys, n) if S is None else S
    return sys.src_base * sys.f[-1] * S + sys.sum_f * n


def check_g_periodicity(sys: CantorSystem, n_max: int) -> list[int]:
    """n <= n_max where numer(Mn) != M q numer(n). Empty means the identity holds."""
    _require_scope(sys)
    M, q = sys.src_base, sys.q
    S = s_table(sys, M * n_max)
    bad = []
    for n in range(1, n_max + 1):
        if g_numerator(sys, M * n, S[M * n]) != M * q * g_numerator(sys, n, S[n]):
            bad.append(n)
    return bad


def g_statistic(sys: CantorSystem, n: int, prec: int | None = None, S: int | None = None) -> mpf:
    """(S(n) + B n) / n^(alpha+1)."""
    prec = resolve_precision(prec)
    num = g_numerator(sys, n, S)
    with mp.workprec(prec + GUARD_BITS):
        a = sys.alpha_at(prec + GUARD_BITS)
        v = mpf(num) / (sys.src_base * sys.f[-1]) / mp.exp((a + 1) * mp.log(n))
    with mp.workprec(prec):
        return +v


# -- the fluctuation F ----------------------------------------------------------

_CACHE: dict = {}
_LOCK = threading.Lock()


def f_coefficient(sys: CantorSystem, k: int, prec: int = 53):
    """k-th Fourier coefficient of F; cached per (system, k, precision)."""
    _require_scope(sys)
    key = (sys.map, k, prec)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    M = sys.src_base
    lnM = math.log(M)
    if prec <= 53:
        g = complex(float(sys.alpha), 2 * math.pi * k / lnM)
        v = complex(_zeta_numerator(sys, g, 53)) / (g * (g + 1) * sys.q * lnM)
    else:
        with mp.workprec(prec + GUARD_BITS):
            g = mpc(sys.alpha_at(prec + GUARD_BITS), 2 * mp.pi * k / mp.log(M))
            v = _zeta_numerator(sys, g, prec + GUARD_BITS) / (g * (g + 1) * sys.q * mp.log(M))
        with mp.workprec(prec):
            v = +v
    with _LOCK:
        _CACHE.setdefault(key, v)
    return v


def f_tail_bound(sys: CantorSystem, K: int) -> float:
    """Bound on sum_{|k|>K} |c_k| from |zeta(gamma_k, a)| <= zeta(alpha, a)."""
    if K < 1:
        return math.inf
    a = float(sys.alpha)
    M = sys.src_base
    lnM = math.log(M)
    Z = sum(df * complex(hurwitz_zeta(a, r / M, 53)).real for r, df in enumerate(sys.delta_f, 1))
    Z += sys.f[-1] * complex(riemann_zeta(a, 53)).real
    theta = 2 * math.pi / lnM
    return 2 * Z / (sys.q * lnM * theta ** 2 * K)


def _coef_vector(sys: CantorSystem, K: int, prec: int) -> tuple[np.ndarray, np.ndarray]:
    ks = np.arange(-K, K + 1)
    return ks, np.array([complex(f_coefficient(sys, int(k), prec)) for k in ks])


def f_truncated(sys: CantorSystem, u, K: int, prec: int = 53):
    """sum_{|k|<=K} c_k e^(2 pi i k u). The real part is F(u); the imaginary part is a check."""
    if K < 0:
        raise ValueError("K must be non-negative")
    uf = float(mpf(u) - mp.floor(mpf(u)))
    ks, c = _coef_vector(sys, K, prec)
    return complex(np.sum(c * np.exp(2j * math.pi * ks * uf)))


# -- the stated formula -------------------------------------------------------

@dataclass
class SummationDiagnostics:
    n: int
    S_exact: int
    formula_value: float
    K: int
    residual: float
    G_n: float
    terms: dict = field(default_factory=dict)


def _formula_terms(sys: CantorSystem, n: int, F: float) -> dict:
    m, fm, sf, M = sys.m, sys.f[-1], sys.sum_f, sys.src_base
    a = float(sys.alpha)
    return {
        "periodic": n ** (a + 1) * F,
        "quadratic": -n * n * fm / (fm - m),
        "linear": -n * sf / (fm * M),
        "constant": -(fm * M - sf) / (fm * M + m),
    }


def s_formula(sys: CantorSystem, n: int, K: int, prec: int = 53, S: int | None = None) -> SummationDiagnostics:
    """Evaluate the stated closed formula for S(n) term by term."""
    _require_scope(sys)
    if n < 2:
        raise ValueError("n must be at least 2")
    S = s_exact(sys, n) if S is None else S
    u = math.log(n) / math.log(sys.src_base)
    F = f_truncated(sys, u, K, prec).real
    terms = _formula_terms(sys, n, F)
    value = sum(terms.values())
    G = float(g_statistic(sys, n, 64, S))
    return SummationDiagnostics(n, S, value, K, value - S, G, dict(terms, F=F))


@dataclass
class ResidualReport:
    rows: list
    mean_G: float | None
    c0: float | None
    gap: float | None


def residual_report(sys: CantorSystem, n_range: Iterable[int], K_list: Sequence[int],
                    prec: int = 53) -> ResidualReport:
    """Rows (n, K, S_exact, formula, residual, G_n, F) and the mean-of-G check.

    The mean of G uses log-uniform weights log(1 + 1/n).
    """
    ns = sorted(set(int(n) for n in n_range))
    if not ns:
        return ResidualReport([], None, None, None)
    S = s_table(sys, ns[-1])
    rows = []
    Gs = []
    for n in ns:
        for K in K_list:
            d = s_formula(sys, n, K, prec, S[n])
            rows.append({"n": n, "K": K, "S_exact": d.S_exact, "formula": d.formula_value,
                         "residual": d.residual, "G_n": d.G_n, "F": d.terms["F"]})
        Gs.append(float(g_statistic(sys, n, 64, S[n])))
    w = np.log1p(1.0 / np.array(ns, dtype=float))
    mean_G = float(np.sum(w * np.array(Gs)) / np.sum(w))
    c0 = complex(f_coefficient(sys, 0, prec)).real
    return ResidualReport(rows, mean_G, c0, abs(mean_G - c0))
