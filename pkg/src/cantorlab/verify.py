"""Cross-module invariant checks, run by ``cantorlab verify``."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from mpmath import mp

from .core import (CantorSystem, cantor_table, cantor_value, delta_cantor, from_digits,
                   gawron_ulas, square_digits, ternary_cantor, to_digits, DigitWord)
from .errors import CantorError
from .extrema import brute_force_extrema, theorem_extrema
from .limit import FractionalExpansion, fourier_coefficients, g_exact, lambda_value
from .distribution import log_distribution_sweep
from .mellin import (check_g_periodicity, delta_dirichlet_series, dirichlet_partial_sum,
                     hurwitz_zeta, riemann_zeta, s_exact)


@dataclass(frozen=True)
class CheckResult:
    name: str
    system: str
    passed: bool
    detail: str = ""


def _digits(sys: CantorSystem, n_max: int) -> str | None:
    for n in range(1, n_max):
        w = to_digits(n, sys.src_base)
        padded = DigitWord(w.base, (0,) * 3 + w.digits)
        if from_digits(w) != n or from_digits(padded) != n:
            return f"round trip fails at {n}"
        cantor_value(sys, n, verify=True)
    return None


def _deltas(sys: CantorSystem, n_max: int) -> str | None:
    C = cantor_table(sys, n_max)
    total = 0
    for n in range(1, n_max + 1):
        d = delta_cantor(sys, n, verify=False)
        if d != int(C[n]) - int(C[n - 1]):
            return f"delta mismatch at {n}"
        total += d
    if total != int(C[n_max]):
        return "differences do not sum to C_n"
    return None


def _extrema(sys: CantorSystem, prec: int) -> str | None:
    t = theorem_extrema(sys, prec)
    b = brute_force_extrema(sys, sys.src_base ** 8, prec)
    with mp.workprec(prec):
        tol = mp.mpf(2) ** (-prec + 8)
        if abs(t.supremum - b.supremum) > tol or abs(t.infimum - b.infimum) > tol:
            return f"theorem ({t.supremum}, {t.infimum}) vs scan ({b.supremum}, {b.infimum})"
    return None


def _lambda(sys: CantorSystem, prec: int) -> str | None:
    M = sys.src_base
    for seed in range(5):
        x = FractionalExpansion.random(M, seed)
        a, b = lambda_value(sys, x, prec=prec), lambda_value(sys, x.scaled(1), prec=prec)
        if abs(a.value - b.value) > a.error + b.error:
            return f"lambda(Mx) != lambda(x) for seed {seed}"
    if not sys.theorem_scope:
        return None
    rng = random.Random(1)
    for _ in range(20):
        x = Fraction(rng.randrange(1, 10 ** 6), rng.randrange(1, 10 ** 6))
        if x >= 1:
            continue
        g1, g2 = g_exact(sys, x / sys.q), g_exact(sys, x)
        if g1 is not None and g2 is not None and g1 * M != g2:
            return f"g(x/q) * M != g(x) at {x}"
    return None


def _fourier(sys: CantorSystem) -> str | None:
    co = fourier_coefficients(sys, 32, resolution=9)
    for n in range(1, 33):
        a, b = co[n], co[-n]
        if abs(a.value - b.value.conjugate()) > a.error_bound + b.error_bound:
            return f"c_-n != conj(c_n) at n={n}"
    return None


def _logdist(sys: CantorSystem) -> str | None:
    res = log_distribution_sweep(sys, np.linspace(0.5, 2.5, 9), 10 ** 4)
    for r0, r1 in zip(res, res[1:]):
        if r1.L_value + r1.error_estimate < r0.L_value - r0.error_estimate:
            return f"L decreases between {r0.gamma} and {r1.gamma}"
    return None


def _summation(sys: CantorSystem) -> str | None:
    for n in (1, 2, 7, 100, 1234, 5000):
        s_exact(sys, n, verify=True)
    bad = check_g_periodicity(sys, 3000)
    if bad:
        return f"G periodicity fails at n={bad[:5]}"
    s = float(sys.alpha) + 1
    v = complex(delta_dirichlet_series(sys, s, 53))
    e = dirichlet_partial_sum(sys, s, 2 * 10 ** 4)
    if abs(v - e.value) > e.error:
        return f"Dirichlet closed form {v} vs partial sum {e.value} (bound {e.error})"
    return None


def _zeta() -> str | None:
    with mp.workprec(80):
        if abs(complex(riemann_zeta(2, 64)) - float(mp.pi ** 2 / 6)) > 1e-12:
            return "zeta(2) wrong"
        if abs(complex(hurwitz_zeta(2, Fraction(1, 2), 64)) - float(mp.pi ** 2 / 2)) > 1e-12:
            return "zeta(2, 1/2) wrong"
    return None


def _run(name: str, label: str, fn: Callable[[], str | None]) -> CheckResult:
    try:
        msg = fn()
    except CantorError as exc:
        msg = f"{type(exc).__name__}: {exc}"
    return CheckResult(name, label, msg is None, msg or "ok")


def run_invariants(systems: list[CantorSystem] | None = None, prec: int = 128) -> list[CheckResult]:
    """All checks on the given systems (default: the two reference systems in scope
    plus one outside it, where only the scope-free checks apply)."""
    if systems is None:
        systems = [ternary_cantor(), square_digits(), gawron_ulas()]
    out = [_run("zeta_reference_values", "-", _zeta)]
    for sys in systems:
        lab = sys.label()
        n_small = min(3000, sys.src_base ** 7)
        out.append(_run("digits_and_strategies", lab, lambda: _digits(sys, n_small)))
        out.append(_run("difference_recurrence", lab, lambda: _deltas(sys, n_small)))
        out.append(_run("lambda_and_measure", lab, lambda: _lambda(sys, prec)))
        out.append(_run("fourier_symmetry", lab, lambda: _fourier(sys)))
        if sys.theorem_scope:
            out.append(_run("extrema_agreement", lab, lambda: _extrema(sys, prec)))
            out.append(_run("log_distribution_monotone", lab, lambda: _logdist(sys)))
            out.append(_run("summation_identities", lab, lambda: _summation(sys)))
    return out
