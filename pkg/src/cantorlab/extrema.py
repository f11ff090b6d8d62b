"""Supremum and infimum of C_n / n^alpha.

The supremum is attained on a single digit. The infimum is the minimum of
(C_n + 1)/(n + 1)^alpha over a finite range fixed by ell0.  Both are
certified: floats only shortlist candidates, the final choice is made with
interval arithmetic and exact tie detection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .core import (
    CantorSystem,
    QuadraticFamily,
    cantor_table,
    inf_form_array,
    ratio_array,
    validate_system,
)
from .errors import NotFound, RangeError, ScanTooLarge, ScopeError
from .hp import GUARD_BITS, PowerRatio, resolve_precision, shortlist

SCAN_CAP = 10 ** 7


@dataclass(frozen=True)
class Extremum:
    value: mpf
    witness: int
    exact: PowerRatio


@dataclass
class ExtremaResult:
    method: str
    supremum: mpf
    sup_witness: int
    infimum: mpf
    inf_witness: int
    ell0: int | None = None
    extras: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "method": self.method,
            "sup": self.supremum,
            "sup_witness": self.sup_witness,
            "inf": self.infimum,
            "inf_witness": self.inf_witness,
            "ell0": self.ell0 if self.ell0 is not None else "",
        }


def _require_scope(sys: CantorSystem):
    if not sys.theorem_scope:
        raise ScopeError("needs a strictly increasing map with f(0)=0 and f(m)=p")


def _ell0_holds(sys: CantorSystem, ell: int, rhs: Fraction, prec: int) -> bool:
    # alpha * q^ell / M^(ell+1) >= rhs, with rhs and the power factor rational
    factor = Fraction(sys.q ** ell, sys.src_base ** (ell + 1))
    return sys.scale.sign_affine(-rhs, factor, prec) >= 0


def max_slope(sys: CantorSystem) -> Fraction:
    f, m = sys.f, sys.m
    return max(Fraction(f[m] - f[e], m - e) for e in range(m))


def ell0(sys: CantorSystem, prec: int | None = None, limit: int = 100_000) -> int:
    """Smallest ell >= 1 with alpha q^ell / M^(ell+1) >= max slope of f towards m."""
    _require_scope(sys)
    prec = resolve_precision(prec)
    rhs = max_slope(sys)
    for ell in range(1, limit + 1):
        if _ell0_holds(sys, ell, rhs, prec):
            return ell
    raise NotFound(f"no ell0 below {limit}")


def supremum_thm(sys: CantorSystem, prec: int | None = None) -> Extremum:
    _require_scope(sys)
    prec = resolve_precision(prec)
    items = [(e, PowerRatio(sys.f[e], e)) for e in range(1, sys.m + 1)]
    idx, r = sys.scale.select(items, "max", prec)
    return Extremum(sys.scale.value(r, prec), idx, r)


def _certified_scan(sys: CantorSystem, values: np.ndarray, exact, mode: str, prec: int,
                    offset: int = 1) -> Extremum:
    """values[i] is a float screen of exact(i + offset)."""
    cand = shortlist(values, mode)
    items = [(int(i) + offset, exact(int(i) + offset)) for i in cand]
    idx, r = sys.scale.select(items, mode, prec)
    return Extremum(sys.scale.value(r, prec), idx, r)


def infimum_thm(sys: CantorSystem, prec: int | None = None, scan_cap: int = SCAN_CAP,
                allow_large: bool = False) -> Extremum:
    _require_scope(sys)
    prec = resolve_precision(prec)
    L = ell0(sys, prec)
    top = sys.src_base ** L - 1
    if top + 1 > scan_cap and not allow_large:
        raise ScanTooLarge(f"(m+1)^ell0 = {top + 1} exceeds scan cap {scan_cap}")
    table = cantor_table(sys, top)
    vals = inf_form_array(sys, top, table)
    return _certified_scan(sys, vals, lambda n: PowerRatio(int(table[n]) + 1, n + 1), "min", prec)


def theorem_extrema(sys: CantorSystem, prec: int | None = None, **kw) -> ExtremaResult:
    s = supremum_thm(sys, prec)
    i = infimum_thm(sys, prec, **kw)
    return ExtremaResult("theorem", s.value, s.witness, i.value, i.witness, ell0(sys, prec),
                         {"sup_exact": s.exact, "inf_exact": i.exact})


# -- quadratic family -------------------------------------------------------

def _quad_system(fam: QuadraticFamily) -> CantorSystem:
    if not fam.is_valid():
        raise RangeError(f"invalid quadratic family {fam}")
    return validate_system(fam.to_map())


def _alpha_ge_two(sys: CantorSystem, prec: int) -> bool:
    return sys.scale.sign_affine(-2, 1, prec) >= 0


def _xi(sys: CantorSystem, fam: QuadraticFamily, prec: int) -> int:
    """floor(-b(alpha-1) / (a(alpha-2)))."""
    a, b = fam.a, fam.b
    af = sys.scale.alpha_fraction
    if af is not None:
        return math.floor(Fraction(-b) * (af - 1) / (a * (af - 2)))
    bits = prec
    while True:
        with mp.workprec(bits + GUARD_BITS):
            al = sys.scale.alpha(bits + GUARD_BITS)
            v = -b * (al - 1) / (a * (al - 2))
            fl = int(mp.floor(v))
            dist = min(abs(v - fl), abs(v - fl - 1))
        # alpha irrational: v is never an integer, so refining always settles it
        if dist > mpf(2) ** (-(bits // 2)):
            return fl
        bits *= 2


def quadratic_sup_closed_form(fam: QuadraticFamily, prec: int | None = None) -> Extremum:
    prec = resolve_precision(prec)
    sys = _quad_system(fam)
    a, b, m = fam.a, fam.b, fam.m
    scale = sys.scale

    def at(x: int) -> Extremum:
        r = PowerRatio(fam.f(x), x)
        return Extremum(scale.value(r, prec), x, r)

    if m == 1 or a <= 0 or (a == 1 and b == 1):
        return at(1)
    if (a == 2 and b == -1 and m == 2) or (a == 1 and b == 0):
        return at(m)
    # T(x) = (2 - alpha) a x - b (alpha - 1) = (2ax + b) - alpha (ax + b)
    def T_sign(x):
        return scale.sign_affine(2 * a * x + b, -(a * x + b), prec)

    if _alpha_ge_two(sys, prec):
        if b >= 0:
            return at(1)
        if T_sign(m) >= 0:
            return at(m)
        if T_sign(1) <= 0:
            return at(1)
    xi = _xi(sys, fam, prec)
    cands = [x for x in (xi, xi + 1) if 1 <= x <= m]
    if not cands:
        cands = [1, m]
    idx, r = scale.select([(x, PowerRatio(fam.f(x), x)) for x in cands], "max", prec)
    return Extremum(scale.value(r, prec), idx, r)


@dataclass(frozen=True)
class InfClosedForm:
    value: mpf
    witness: int
    exact: PowerRatio
    branch: str
    cross_check: mpf | None = None
    consistent: bool = True


def quadratic_inf_closed_form(fam: QuadraticFamily, prec: int | None = None) -> InfClosedForm:
    """min{1, min over e of (q f(1) + f(e) + 1)/(m + e + 2)^alpha} for a > 0, else 1.

    The second form of the same quantity, built on the sign changes of
    T(x) = (2ax + b)(x + m + 2) - alpha (q f(1) + f(x) + 1), is evaluated as a
    cross-check and recorded alongside.
    """
    prec = resolve_precision(prec)
    sys = _quad_system(fam)
    a, b, m = fam.a, fam.b, fam.m
    q = sys.q
    scale = sys.scale
    one = (m, PowerRatio(q, m + 1))  # (C_m + 1)/(m + 1)^alpha = 1 exactly
    if a <= 0:
        return InfClosedForm(scale.value(one[1], prec), m, one[1], "a<=0")
    # n = m + e + 1 has digits [1, e], so C_n + 1 = q f(1) + f(e) + 1
    items = [(1, PowerRatio(fam.f(1) + 1, 2)), one]
    items += [(m + e + 1, PowerRatio(q * fam.f(1) + fam.f(e) + 1, m + e + 2)) for e in range(m + 1)]
    idx, r = scale.select(items, "min", prec)
    value = scale.value(r, prec)

    def S(x):
        return PowerRatio(q * fam.f(1) + fam.f(x) + 1, x + m + 2)

    def T_sign(x):
        return scale.sign_affine((2 * a * x + b) * (x + m + 2), -(q * fam.f(1) + fam.f(x) + 1), prec)

    if T_sign(m) <= 0:
        alt = PowerRatio(a + b + 1, 2)
        branch = "T(m)<=0"
    else:
        xi = next((x for x in range(0, m) if T_sign(x) <= 0 < T_sign(x + 1)), None)
        if xi is None:
            alt, branch = S(0), "T(0)>0"
        else:
            _, alt = scale.select([(xi, S(xi)), (xi + 1, S(xi + 1))], "min", prec)
            branch = f"xi={xi}"
    # the alternative form omits the cap at 1
    capped = alt if scale.compare(alt, one[1], prec) < 0 else one[1]
    ok = scale.compare(capped, r, prec) == 0
    return InfClosedForm(value, idx, r, branch, scale.value(capped, prec), ok)


def quadratic_extrema(fam: QuadraticFamily, prec: int | None = None) -> ExtremaResult:
    s = quadratic_sup_closed_form(fam, prec)
    i = quadratic_inf_closed_form(fam, prec)
    return ExtremaResult("closed_form", s.value, s.witness, i.value, i.witness, None,
                         {"sup_exact": s.exact, "inf_exact": i.exact, "inf_branch": i.branch,
                          "inf_cross_check": i.cross_check, "inf_consistent": i.consistent})


# -- brute force ------------------------------------------------------------

def brute_force_extrema(sys: CantorSystem, N: int, prec: int | None = None) -> ExtremaResult:
    """Exhaustive scan over 1 <= n <= N.

    ``infimum`` is the minimum of (C_n + 1)/(n + 1)^alpha; the plain minimum of
    C_n / n^alpha is kept in ``extras`` with the slack constant
    (plain - inf) * N^(alpha - 1).
    """
    if N < sys.m + 1:
        raise ValueError("N must be at least m + 1")
    prec = resolve_precision(prec)
    table = cantor_table(sys, N + 1)
    sup = _certified_scan(sys, ratio_array(sys, N, table),
                          lambda n: PowerRatio(int(table[n]), n), "max", prec)
    inf = _certified_scan(sys, inf_form_array(sys, N, table),
                          lambda n: PowerRatio(int(table[n]) + 1, n + 1), "min", prec)
    plain = _certified_scan(sys, ratio_array(sys, N, table),
                            lambda n: PowerRatio(int(table[n]), n), "min", prec)
    L = ell0(sys, prec) if sys.theorem_scope else None
    with mp.workprec(prec):
        slack = (plain.value - inf.value) * mpf(N) ** (sys.alpha_at(prec) - 1)
    return ExtremaResult("brute_force", sup.value, sup.witness, inf.value, inf.witness, L,
                         {"sup_exact": sup.exact, "inf_exact": inf.exact,
                          "plain_infimum": plain.value, "plain_inf_witness": plain.witness,
                          "plain_inf_exact": plain.exact, "slack_constant": slack, "N": N})


# -- thresholds and diagnostics ---------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    k0: int
    k1: int
    verified_up_to: int


def _violations(sys: CantorSystem, N: int, prec: int) -> tuple[np.ndarray, np.ndarray]:
    M, m = sys.src_base, sys.m
    top = M * N + m
    table = cantor_table(sys, top)
    r = np.empty(top + 1)
    r[0] = np.nan
    r[1:] = ratio_array(sys, top, table)
    n = np.arange(1, N + 1)
    scale = sys.scale

    def cmp(i, j):
        # certified sign of ratio(i) - ratio(j)
        return scale.compare(PowerRatio(int(table[i]), i), PowerRatio(int(table[j]), j), prec)

    def settle(a_idx, b_idx, strict):
        # True where ratio(a) <= ratio(b) (or < when strict) fails
        a, b = r[a_idx], r[b_idx]
        tol = 1e-11 * np.maximum(a, b)
        bad = a > b + tol if not strict else a >= b - tol
        close = np.abs(a - b) <= tol
        for k in np.nonzero(close)[0]:
            c = cmp(int(a_idx[k]), int(b_idx[k]))
            bad[k] = c > 0 if not strict else c >= 0
        return bad

    v0 = np.zeros(N, dtype=bool)
    for e in range(1, m + 1):
        v0 |= settle(M * n + e, n, strict=False)
    v1 = np.zeros(N, dtype=bool)
    for e in range(1, m + 1):
        v1 |= settle(M * n + e, M * n + e - 1, strict=True)
    return v0, v1


def _threshold(bad: np.ndarray, M: int, N: int) -> int:
    idx = np.nonzero(bad)[0]
    if idx.size == 0:
        return 0
    last = int(idx[-1]) + 1
    k = 0
    while M ** k <= last:
        k += 1
    if M ** k > N:
        raise NotFound(f"no threshold verified below N={N}")
    return k


def empirical_thresholds(sys: CantorSystem, N: int, prec: int | None = None) -> Thresholds:
    """Scan-verified k0, k1 for the appended-digit monotonicity statements."""
    _require_scope(sys)
    prec = resolve_precision(prec)
    v0, v1 = _violations(sys, N, prec)
    M = sys.src_base
    return Thresholds(_threshold(v0, M, N), _threshold(v1, M, N), N)


@dataclass(frozen=True)
class Ell0Report:
    ell0: int
    empirical_ell: int
    infimum: mpf
    conjecture_holds: bool


def ell0_report(sys: CantorSystem, prec: int | None = None) -> Ell0Report:
    """Compare ell0 with the smallest ell whose scan already reaches the infimum."""
    prec = resolve_precision(prec)
    L = ell0(sys, prec)
    inf = infimum_thm(sys, prec)
    ell = 1
    while sys.src_base ** ell <= inf.witness:
        ell += 1
    return Ell0Report(L, ell, inf.value, ell <= 2)
