"""Where the ratios C_n / n^alpha accumulate, and how they are distributed."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from mpmath import mp, mpf

from .core import CantorSystem, cantor_table, ratio, ratio_array
from .errors import OutOfInterval
from .extrema import brute_force_extrema, empirical_thresholds, infimum_thm, supremum_thm
from .hp import GUARD_BITS, resolve_precision
from .limit import density_d

SAFETY = 1e-12


@lru_cache(maxsize=32)
def _extrema(sys: CantorSystem, prec: int) -> tuple[mpf, mpf]:
    if sys.theorem_scope:
        return infimum_thm(sys, prec).value, supremum_thm(sys, prec).value
    r = brute_force_extrema(sys, sys.src_base ** 10, prec)
    return r.extras["plain_infimum"], r.supremum


def extremal_interval(sys: CantorSystem, prec: int | None = None) -> tuple[mpf, mpf]:
    """(inf, sup) of the ratios; a scan over n <= M^10 outside theorem scope."""
    return _extrema(sys, resolve_precision(prec))


@lru_cache(maxsize=32)
def _k2(sys: CantorSystem) -> int:
    if not sys.theorem_scope:
        return 1
    t = empirical_thresholds(sys, sys.src_base ** 8)
    return max(t.k0, t.k1)


@dataclass(frozen=True)
class GreedyResult:
    gamma: mpf
    indices: tuple[int, ...]
    ratios: tuple[mpf, ...]
    k2: int

    @property
    def distance(self) -> mpf:
        return abs(self.ratios[-1] - self.gamma)


def greedy_subsequence(sys: CantorSystem, gamma, K: int, prec: int | None = None,
                       n_limit: int | None = None) -> GreedyResult:
    """The digit-appending sequence whose ratios decrease towards gamma.

    Stops after K terms, or earlier if the next index would exceed n_limit.
    """
    prec = resolve_precision(prec)
    if K < 1:
        raise ValueError("K must be positive")
    lo, hi = _extrema(sys, prec)
    with mp.workprec(prec):
        g = mpf(gamma)
    if not lo < g < hi:
        raise OutOfInterval(f"gamma={gamma} outside ({lo}, {hi})")
    M, m = sys.src_base, sys.m
    single = [(e, ratio(sys, e, prec)) for e in range(1, m + 1)]
    above = [r for _, r in single if r >= g]
    target = min(above)
    n = min(e for e, r in single if r == target)
    k2 = _k2(sys)
    idx, vals = [n], [target]
    while len(idx) < K:
        if len(idx) < k2:
            nxt = M * n
            rv = ratio(sys, nxt, prec)
        else:
            nxt, rv = None, None
            for e in range(m, -1, -1):
                r = ratio(sys, M * n + e, prec)
                if r >= g:
                    nxt, rv = M * n + e, r
                    break
        if n_limit is not None and nxt > n_limit:
            break
        n = nxt
        idx.append(n)
        vals.append(rv)
    return GreedyResult(g, tuple(idx), tuple(vals), k2)


@dataclass
class CoverReport:
    grid: list
    witnesses: list            # (n, distance)
    epsilon: float
    N_max: int
    methods: list = field(default_factory=list)

    @property
    def failures(self) -> list[int]:
        return [j for j, (_, d) in enumerate(self.witnesses) if d > self.epsilon]

    @property
    def covered(self) -> bool:
        return not self.failures


def density_cover(sys: CantorSystem, grid_size: int, epsilon: float, N_max: int,
                  prec: int | None = None, scan_limit: int = 2 ** 22) -> CoverReport:
    """Cover a uniform grid in [inf + eps, sup - eps] by ratios with n <= N_max.

    Each target is first attacked with the greedy sequence; if that misses,
    the closest ratio among n <= min(N_max, scan_limit) is used.
    """
    prec = resolve_precision(prec)
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    lo, hi = _extrema(sys, prec)
    a, b = float(lo) + epsilon, float(hi) - epsilon
    grid = [a + (b - a) * j / (grid_size - 1) for j in range(grid_size)]
    scan = None
    witnesses, methods = [], []
    for g in grid:
        best = None
        if float(lo) < g < float(hi):
            gr = greedy_subsequence(sys, g, 10 ** 6, prec, n_limit=N_max)
            dists = [abs(float(r) - g) for r in gr.ratios]
            j = int(np.argmin(dists))
            best = (gr.indices[j], dists[j], "greedy")
        if best is None or best[1] > epsilon:
            if scan is None:
                top = min(N_max, scan_limit)
                vals = ratio_array(sys, top)
                order = np.argsort(vals, kind="stable")
                scan = (vals[order], order + 1)
            sv, sn = scan
            pos = int(np.searchsorted(sv, g))
            cands = [i for i in (pos - 1, pos) if 0 <= i < len(sv)]
            i = min(cands, key=lambda i: abs(sv[i] - g))
            n = int(sn[i])
            d = abs(float(ratio(sys, n, prec)) - g)
            if best is None or d < best[1]:
                best = (n, d, "scan")
        witnesses.append((best[0], best[1]))
        methods.append(best[2])
    return CoverReport(grid, witnesses, epsilon, N_max, methods)


# -- logarithmic distribution -----------------------------------------------

@dataclass(frozen=True)
class LogDistResult:
    gamma: float
    L_value: float
    resolution: int
    error_estimate: float


class _Cells:
    """Cells [J, J+1] / M^k of [1, M) with bounds for lambda on each."""

    def __init__(self, sys: CantorSystem, resolution: int):
        M = sys.src_base
        k = 0
        while (M - 1) * M ** k < resolution:
            k += 1
        self.sys, self.k = sys, k
        J0, J1 = M ** k, M ** (k + 1)
        self.C = cantor_table(sys, J1)
        self.J = np.arange(J0, J1, dtype=np.int64)
        self.lnM = math.log(M)
        self.alpha = float(sys.alpha)
        self.dtop = sys.f[-1] / (sys.radix - 1)

    def bounds(self, J: np.ndarray, C: np.ndarray):
        # lambda on the cell lies between C_J/(J+1)^a and (C_J + Dtop)/J^a
        Jf = J.astype(float)
        Cf = C.astype(float)
        lo = Cf / (Jf + 1) ** self.alpha
        hi = (Cf + self.dtop) / Jf ** self.alpha
        return lo * (1 - SAFETY), hi * (1 + SAFETY)

    def measure(self, J: np.ndarray) -> float:
        return float(np.sum(np.log1p(1.0 / J.astype(float)))) / self.lnM

    def evaluate(self, gamma: float, extra_levels: int = 8) -> tuple[float, float]:
        sys = self.sys
        M, P, f = sys.src_base, sys.radix, np.array(sys.f, dtype=np.int64)
        J = self.J
        C = self.C[J]
        inside = 0.0
        for level in range(extra_levels + 1):
            lo, hi = self.bounds(J, C)
            inside += self.measure(J[hi <= gamma])
            unsure = (hi > gamma) & (lo <= gamma)
            J, C = J[unsure], C[unsure]
            if level == extra_levels or J.size == 0:
                break
            # children J*M + e carry C = P*C_J + f(e)
            J = (J[:, None] * M + np.arange(M)[None, :]).ravel()
            C = (C[:, None] * P + f[None, :]).ravel()
        unsure_measure = self.measure(J) if J.size else 0.0
        # float summation over all cells adds at most a few ulps per cell
        rounding = 4 * np.finfo(float).eps * (self.J.size + J.size)
        return inside + unsure_measure / 2, unsure_measure / 2 + rounding


def log_distribution_sweep(sys: CantorSystem, gammas: Sequence[float], resolution: int,
                           extra_levels: int = 8) -> list[LogDistResult]:
    if resolution < 100:
        raise ValueError("resolution must be at least 100")
    cells = _Cells(sys, resolution)
    out = []
    for g in gammas:
        L, err = cells.evaluate(float(g), extra_levels)
        out.append(LogDistResult(float(g), min(max(L, 0.0), 1.0), resolution, err))
    return out


def log_distribution(sys: CantorSystem, gamma, resolution: int, extra_levels: int = 8) -> LogDistResult:
    return log_distribution_sweep(sys, [gamma], resolution, extra_levels)[0]


# -- densities at 0 -----------------------------------------------------------

@dataclass(frozen=True)
class ThetaReport:
    theta_lower: mpf
    theta_upper: mpf
    sample_min: float
    sample_max: float
    samples: int
    tolerance: float
    identity_lower: mpf
    identity_upper: mpf

    @property
    def within(self) -> bool:
        return (self.sample_min >= float(self.theta_lower) - self.tolerance
                and self.sample_max <= float(self.theta_upper) + self.tolerance)


def theta_densities(sys: CantorSystem, samples: int = 10_000, seed: int = 0,
                    prec: int | None = None, tol: float = 1e-2, depth: int = 60) -> ThetaReport:
    """(sup^(-1/alpha), inf^(-1/alpha)) with a seeded sample of d(x q^-k)."""
    prec = resolve_precision(prec)
    hp = prec + GUARD_BITS
    inf, sup = infimum_thm(sys, hp), supremum_thm(sys, hp)
    with mp.workprec(hp):
        a = sys.alpha_at(hp)
        s_root = mp.exp(mp.log(sup.value) / a)
        i_root = mp.exp(mp.log(inf.value) / a)
        th_lo, th_hi = 1 / s_root, 1 / i_root
        id_lo, id_hi = th_lo * s_root, th_hi * i_root
    rng = random.Random(seed)
    vals = []
    for _ in range(samples):
        x = Fraction(rng.getrandbits(53) + 1, 2 ** 53)
        k = rng.randrange(0, 6)
        vals.append(float(density_d(sys, x / sys.q ** k, depth=depth, prec=64).value))
    with mp.workprec(prec):
        return ThetaReport(+th_lo, +th_hi, min(vals) if vals else float("nan"),
                           max(vals) if vals else float("nan"), samples, tol, +id_lo, +id_hi)


# -- cumulative counts ----------------------------------------------------------

@dataclass
class CdfReport:
    gamma: float
    phases: list
    rows: list            # (k, t, N, A_N/N)
    spreads: dict         # k -> max - min over phases


def empirical_cdf_probe(sys: CantorSystem, gamma, window_exponents: Sequence[int],
                        phases: int = 8, strict: bool = False) -> CdfReport:
    """A_N/N = #{n <= N: ratio(n) <= gamma}/N along N = floor(t M^k)."""
    if strict:
        lo, hi = _extrema(sys, resolve_precision(None))
        if not lo < mpf(gamma) < hi:
            raise OutOfInterval(f"gamma={gamma} outside ({lo}, {hi})")
    M = sys.src_base
    ts = [Fraction(1) + Fraction(j * (M - 1), phases) for j in range(phases)]
    ks = list(window_exponents)
    top = max(math.floor(t * M ** k) for t in ts for k in ks)
    below = np.cumsum(ratio_array(sys, top) <= float(gamma))
    rows, spreads = [], {}
    for k in ks:
        fr = []
        for t in ts:
            N = math.floor(t * M ** k)
            v = float(below[N - 1]) / N
            rows.append((k, float(t), N, v))
            fr.append(v)
        spreads[k] = max(fr) - min(fr)
    return CdfReport(float(gamma), [float(t) for t in ts], rows, spreads)

