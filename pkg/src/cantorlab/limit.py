"""The limit function lambda(x), its digit series D, and the measure function g.

lambda(x) = (C_floor(x) + D(frac x)) / x^alpha with D = sum f(e_r) (p+1)^-r over
the base-(m+1) fractional digits.  At (m+1)-rationals the finite expansion
is used, which picks the right-continuous value.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from mpmath import mp, mpf

from .core import CantorSystem, cantor_table, cantor_value
from .errors import DegenerateGrid, NotRational
from .hp import GUARD_BITS, Estimate, exact_fraction, resolve_precision, ulp_bound

MAX_PERIOD = 20_000


def _long_division(frac: Fraction, base: int) -> Iterator[int]:
    num, den = frac.numerator, frac.denominator
    while True:
        num *= base
        d, num = divmod(num, den)
        yield d


def _is_base_rational(den: int, base: int) -> bool:
    g = math.gcd(den, base)
    while g > 1:
        while den % g == 0:
            den //= g
        g = math.gcd(den, base)
    return den == 1


@dataclass(frozen=True)
class FractionalExpansion:
    """Base-(m+1) expansion of x >= 0.

    Either ``frac`` holds the exact fractional part (digits come from long
    division, which never ends in a tail of m's) or ``source`` yields the
    digits lazily, e.g. for a seeded pseudo-random point.
    """

    base: int
    integer_part: int
    frac: Fraction | None = None
    source: Callable[[], Iterator[int]] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.base < 2 or self.integer_part < 0:
            raise ValueError("need base >= 2 and a non-negative integer part")
        if (self.frac is None) == (self.source is None):
            raise ValueError("give exactly one of frac and source")
        if self.frac is not None and not 0 <= self.frac < 1:
            raise ValueError("fractional part must lie in [0, 1)")

    @classmethod
    def from_value(cls, x, base: int) -> "FractionalExpansion":
        x = exact_fraction(x)
        if x < 0:
            raise ValueError("x must be non-negative")
        ip = math.floor(x)
        return cls(base, ip, x - ip)

    @classmethod
    def from_digits(cls, base: int, integer_part: int, prefix: Sequence[int] = (),
                    period: Sequence[int] = ()) -> "FractionalExpansion":
        """Eventually periodic expansion. A period of all m's is folded into a carry."""
        for d in list(prefix) + list(period):
            if not 0 <= d < base:
                raise ValueError(f"digit {d} out of range")
        k = len(prefix)
        head = Fraction(sum(d * base ** (k - 1 - i) for i, d in enumerate(prefix)), base ** k)
        if period:
            L = len(period)
            rep = Fraction(sum(d * base ** (L - 1 - i) for i, d in enumerate(period)), base ** L - 1)
            head += rep / base ** k
        return cls.from_value(integer_part + head, base)

    @classmethod
    def random(cls, base: int, seed: int, integer_part: int = 1) -> "FractionalExpansion":
        def gen():
            rng = random.Random(seed)
            while True:
                yield rng.randrange(base)
        return cls(base, integer_part, source=gen)

    @property
    def rational_flag(self) -> bool:
        """True iff the expansion is finite."""
        return self.frac is not None and _is_base_rational(self.frac.denominator, self.base)

    @property
    def exact(self) -> Fraction | None:
        return None if self.frac is None else self.integer_part + self.frac

    def digits(self) -> Iterator[int]:
        if self.frac is not None:
            return _long_division(self.frac, self.base)
        return self.source()

    def prefix(self, R: int) -> list[int]:
        it = self.digits()
        return [next(it) for _ in range(R)]

    def finite_digits(self) -> list[int]:
        if not self.rational_flag:
            raise NotRational("expansion is infinite")
        out, f = [], self.frac
        while f:
            f *= self.base
            d = math.floor(f)
            out.append(d)
            f -= d
        return out

    def truncated(self, R: int) -> Fraction:
        digs = self.prefix(R)
        return self.integer_part + Fraction(sum(d * self.base ** (R - 1 - i) for i, d in enumerate(digs)),
                                            self.base ** R)

    def scaled(self, k: int) -> "FractionalExpansion":
        """x * base**k for k >= 0."""
        if self.frac is not None:
            return FractionalExpansion.from_value(self.exact * self.base ** k, self.base)
        head = self.prefix(k)
        ip = self.integer_part
        for d in head:
            ip = ip * self.base + d
        src = self.source

        def gen():
            it = src()
            for _ in range(k):
                next(it)
            yield from it
        return FractionalExpansion(self.base, ip, source=gen)


def _as_expansion(sys: CantorSystem, x) -> FractionalExpansion:
    if isinstance(x, FractionalExpansion):
        if x.base != sys.src_base:
            raise ValueError("expansion base does not match the system")
        return x
    return FractionalExpansion.from_value(x, sys.src_base)


def default_depth(sys: CantorSystem, prec: int | None = None) -> int:
    prec = resolve_precision(prec)
    # digits of x itself limit the accuracy, and M <= p+1
    return math.ceil(prec * math.log(2) / math.log(sys.src_base)) + 2


def _to_mpf(fr: Fraction) -> mpf:
    return mpf(fr.numerator) / fr.denominator


def _pow_alpha(sys: CantorSystem, x: Fraction, prec: int, inverse: bool = False) -> mpf:
    """x^alpha (or x^(1/alpha)) at prec + guard bits."""
    with mp.workprec(prec + GUARD_BITS):
        a = sys.alpha_at(prec + GUARD_BITS)
        e = 1 / a if inverse else a
        return mp.exp(e * mp.log(_to_mpf(x)))


def d_series(sys: CantorSystem, digits: Iterable[int]) -> Fraction:
    P, f = sys.radix, sys.f
    num, k = 0, 0
    for d in digits:
        num = num * P + f[d]
        k += 1
    return Fraction(num, P ** k)


def d_exact(sys: CantorSystem, x, max_period: int = MAX_PERIOD) -> Fraction | None:
    """D(frac x) as an exact rational when the expansion is eventually periodic.

    Returns None for lazily generated digits or periods longer than max_period.
    """
    x = _as_expansion(sys, x)
    if x.frac is None:
        return None
    q, M = sys.radix, sys.src_base
    num, den = x.frac.numerator, x.frac.denominator
    seen: dict[int, int] = {}
    digs: list[int] = []
    while num and num not in seen:
        if len(digs) > max_period:
            return None
        seen[num] = len(digs)
        d, num = divmod(num * M, den)
        digs.append(d)
    if not num:
        return d_series(sys, digs)
    j = seen[num]
    head = d_series(sys, digs[:j])
    per = digs[j:]
    rep = d_series(sys, per) / (1 - Fraction(1, q ** len(per)))
    return head + rep / q ** j


def d_value(sys: CantorSystem, x, depth: int | None = None, prec: int | None = None) -> Estimate:
    """Truncated digit series with its tail bound (zero for finite expansions)."""
    prec = resolve_precision(prec)
    x = _as_expansion(sys, x)
    R = default_depth(sys, prec) if depth is None else depth
    if x.rational_flag:
        digs = x.finite_digits()
        tail = 0 if len(digs) <= R else Fraction(sys.f[-1], sys.radix - 1) / sys.radix ** R
        total = d_series(sys, digs[:R])
    else:
        total = d_series(sys, x.prefix(R))
        tail = Fraction(sys.f[-1], sys.radix - 1) / sys.radix ** R
    with mp.workprec(prec):
        v = _to_mpf(total)
        return Estimate(v, _to_mpf(Fraction(tail)) + ulp_bound(v, prec))


def lambda_value(sys: CantorSystem, x, depth: int | None = None, prec: int | None = None) -> Estimate:
    prec = resolve_precision(prec)
    x = _as_expansion(sys, x)
    C = cantor_value(sys, x.integer_part)
    dx = d_exact(sys, x)
    if dx is not None:
        xv = x.exact
        if xv <= 0:
            raise ValueError("x must be positive")
        with mp.workprec(prec + GUARD_BITS):
            v = _to_mpf(C + dx) / _pow_alpha(sys, xv, prec)
        with mp.workprec(prec):
            v = +v
            return Estimate(v, ulp_bound(v, prec))
    R = default_depth(sys, prec) if depth is None else depth
    d = d_value(sys, x, R, prec + GUARD_BITS)
    xr = x.exact if x.frac is not None else x.truncated(R)
    if xr <= 0:
        raise ValueError("x must be positive")
    h = Fraction(0) if x.frac is not None else Fraction(1, sys.src_base ** R)
    with mp.workprec(prec + GUARD_BITS):
        a = sys.alpha_at(prec + GUARD_BITS)
        xa = _pow_alpha(sys, xr, prec)
        v = (C + d.value) / xa
        err = d.error / xa
        if h:
            err += (C + d.value + d.error) * a * _to_mpf(h) / (xa * _to_mpf(xr))
    with mp.workprec(prec):
        v = +v
        return Estimate(v, +err + ulp_bound(v, prec))


# -- the measure ------------------------------------------------------------

@dataclass(frozen=True)
class IfsSystem:
    """Maps S_i(x) = (x + f(i)) / (p + 1), each with weight 1/(m+1)."""

    shifts: tuple[int, ...]
    radix: int

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(1, len(self.shifts)) for _ in self.shifts)

    def apply(self, i: int, x):
        return (x + self.shifts[i]) / Fraction(self.radix) if isinstance(x, (int, Fraction)) \
            else (x + self.shifts[i]) / self.radix

    def endpoints_ok(self) -> bool:
        return self.apply(0, Fraction(0)) == 0 and self.apply(len(self.shifts) - 1, Fraction(1)) == 1


def ifs_system(sys: CantorSystem) -> IfsSystem:
    return IfsSystem(sys.f, sys.radix)


def g_exact(sys: CantorSystem, t, max_steps: int = MAX_PERIOD) -> Fraction | None:
    """mu([0, t]) exactly, or None if the descent does not settle in max_steps."""
    val, _, exact = _g_descent(sys, exact_fraction(t), max_steps)
    return val if exact else None


def _g_descent(sys: CantorSystem, t: Fraction, steps: int) -> tuple[Fraction, Fraction, bool]:
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    f, P, M = sys.f, sys.radix, sys.src_base
    y, acc, w = t, Fraction(0), Fraction(1)
    seen: dict[Fraction, tuple[Fraction, Fraction]] = {}
    for _ in range(steps):
        if y in seen:
            acc0, w0 = seen[y]
            return acc0 + (acc - acc0) / (1 - w / w0), Fraction(0), True
        seen[y] = (acc, w)
        z = y * P
        i = max(k for k in range(len(f)) if f[k] <= z)
        if z >= f[i] + 1:
            # right end of child i, or inside the gap after it
            return acc + w * Fraction(i + 1, M), Fraction(0), True
        if z < f[0]:
            return acc, Fraction(0), True
        acc += w * Fraction(i, M)
        w /= M
        y = z - f[i]
    return acc, w, False


def cantor_function_g(sys: CantorSystem, t, depth: int | None = None,
                      prec: int | None = None) -> Estimate:
    prec = resolve_precision(prec)
    R = default_depth(sys, prec) if depth is None else depth
    val, err, _ = _g_descent(sys, exact_fraction(t), R)
    with mp.workprec(prec):
        v = _to_mpf(val)
        return Estimate(v, _to_mpf(err) + ulp_bound(v, prec))


def address_point(sys: CantorSystem, digits: Sequence[int]) -> Fraction:
    """The point of the attractor with the given finite address."""
    P = sys.radix
    return sum((Fraction(sys.f[d], P ** (r + 1)) for r, d in enumerate(digits)), Fraction(0))


def density_d(sys: CantorSystem, x, depth: int | None = None, prec: int | None = None) -> Estimate:
    prec = resolve_precision(prec)
    x = exact_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    g = cantor_function_g(sys, x, depth, prec + GUARD_BITS)
    with mp.workprec(prec + GUARD_BITS):
        den = _pow_alpha(sys, x, prec, inverse=True)
        v = g.value / den
        err = g.error / den
    with mp.workprec(prec):
        v = +v
        return Estimate(v, +err + ulp_bound(v, prec))


# -- local behaviour --------------------------------------------------------

@dataclass(frozen=True)
class ContinuityReport:
    classification: str
    value: mpf
    left_limit: mpf
    jump: mpf
    error_bound: mpf
    last_digit: int
    numeric_left: mpf | None = None


def continuity_probe(sys: CantorSystem, x0, prec: int | None = None, probe_depth: int = 30) -> ContinuityReport:
    """Left and right behaviour of lambda at an (m+1)-rational point."""
    prec = resolve_precision(prec)
    x = _as_expansion(sys, x0)
    if not x.rational_flag:
        raise NotRational("continuity probe needs a finite expansion")
    xv = x.exact
    if xv <= 0:
        raise ValueError("x0 must be positive")
    M = sys.src_base
    k = len(x.finite_digits())
    N = int(xv * M ** k)
    while N % M == 0:
        N //= M
    d = N % M
    C1, C0 = cantor_value(sys, N), cantor_value(sys, N - 1)
    tail = Fraction(sys.f[-1], sys.radix - 1)  # D of an all-m tail
    gap = C1 - C0 - tail
    with mp.workprec(prec + GUARD_BITS):
        Na = sys.scale.power(N, prec + GUARD_BITS)
        value = C1 / Na
        left = _to_mpf(C0 + tail) / Na
        jump = _to_mpf(gap) / Na
    # lambda just left of x0, from a long tail of m's
    eps = Fraction(1, M ** (k + probe_depth))
    numeric = lambda_value(sys, xv - eps, prec=prec).value if xv > eps else None
    with mp.workprec(prec):
        err = ulp_bound(value, prec) + ulp_bound(left, prec)
        cls = "left_and_right" if gap == 0 else "right_only"
        return ContinuityReport(cls, +value, +left, +jump, err, d, numeric)


@dataclass(frozen=True)
class HolderReport:
    exponent: float
    lambda_slope: float
    points: int
    block_deviation: dict
    normal_like: bool
    meets_bound: bool | None


def _fit_slope(h: list[float], y: list[float]) -> float:
    lx, ly = np.log(h), np.log(y)
    return float(np.polyfit(lx, ly, 1)[0])


def block_statistics(digits: Sequence[int], base: int, max_len: int = 3) -> dict:
    """max over blocks B of |N(k, B)/k - base^-l| for block lengths l <= max_len."""
    k = len(digits)
    out = {}
    for ell in range(1, max_len + 1):
        counts: dict[tuple, int] = {}
        for i in range(k - ell + 1):
            key = tuple(digits[i:i + ell])
            counts[key] = counts.get(key, 0) + 1
        expected = base ** -ell
        dev = max(abs(counts.get(b, 0) / k - expected) for b in _all_blocks(base, ell))
        out[ell] = dev
    return out


def _all_blocks(base: int, ell: int):
    if ell == 0:
        yield ()
        return
    for head in _all_blocks(base, ell - 1):
        for d in range(base):
            yield head + (d,)


def holder_probe(sys: CantorSystem, x0, h_grid: Sequence, delta: float | None = None,
                 depth: int | None = None, prec: int | None = None) -> HolderReport:
    """Log-log slope of |N(x0+h) - N(x0)| with N = C_floor + D, the numerator of lambda.

    The slope of lambda itself is reported too; the smooth factor x^-alpha
    makes it close to 1 whatever the digit structure.
    """
    prec = resolve_precision(prec)
    x = _as_expansion(sys, x0)
    hs = [exact_fraction(h) for h in h_grid]
    if any(not 0 < h < 1 for h in hs):
        raise ValueError("h values must lie in (0, 1)")
    M = sys.src_base
    hmin = min(hs) if hs else Fraction(1)
    R = depth or (math.ceil(-math.log(float(hmin)) / math.log(M)) + 60)
    digs = x.prefix(R)
    xr = x.integer_part + Fraction(sum(d * M ** (R - 1 - i) for i, d in enumerate(digs)), M ** R)
    if hs and xr + max(hs) >= x.integer_part + 1:
        raise ValueError("x0 + h must stay below the next integer")

    def numer(v: Fraction) -> Fraction:
        ip = math.floor(v)
        e = FractionalExpansion(M, ip, v - ip)
        return cantor_value(sys, ip) + d_series(sys, e.prefix(R))

    n0 = numer(xr)
    with mp.workprec(prec):
        lam0 = _to_mpf(n0) / _pow_alpha(sys, xr, prec)
    hd, dd, hl, dl = [], [], [], []
    for h in hs:
        n1 = numer(xr + h)
        diff = abs(n1 - n0)
        if diff:
            hd.append(float(h))
            dd.append(float(diff))
        with mp.workprec(prec):
            lam1 = _to_mpf(n1) / _pow_alpha(sys, xr + h, prec)
            dl_ = abs(lam1 - lam0)
        if dl_ > 0:
            hl.append(float(h))
            dl.append(float(dl_))
    if len(hd) < 4:
        raise DegenerateGrid(f"only {len(hd)} usable points")
    slope = _fit_slope(hd, dd)
    lslope = _fit_slope(hl, dl) if len(hl) >= 2 else float("nan")
    # block frequencies need far more digits than the difference quotients do
    stats = block_statistics(x.prefix(max(R, 4096)), M)
    normal_like = all(v < 0.05 for v in stats.values())
    meets = None if delta is None else slope >= float(sys.alpha) - delta
    return HolderReport(slope, lslope, len(hd), stats, normal_like, meets)


# -- logarithmic Fourier series ---------------------------------------------

@dataclass(frozen=True)
class FourierCoefficient:
    n: int
    value: complex
    error_bound: float
    refinement_delta: float | None = None


def _cell_data(sys: CantorSystem, depth: int):
    M = sys.src_base
    J0, J1 = M ** depth, M ** (depth + 1)
    C = cantor_table(sys, J1)
    dC = np.diff(C[J0:J1 + 1].astype(float))          # Delta C_J, J = J0+1..J1
    w0, w1 = float(C[J0]), float(C[J1 - 1])
    lnJ = np.log(np.arange(J0, J1 + 1, dtype=float))
    return J0, J1, w0, w1, dC, lnJ


def _coefficients(sys: CantorSystem, ns: Sequence[int], depth: int) -> list[FourierCoefficient]:
    M, P = sys.src_base, sys.radix
    lnM = math.log(M)
    a = float(sys.alpha)
    dbar = sys.sum_f / (M * (P - 1))
    dtop = sys.f[-1] / (P - 1)
    J0, J1, w0, w1, dC, lnJ = _cell_data(sys, depth)
    # cells [J, J+1] / M^depth carry the numerator (C_J + D) / P^depth;
    # D is replaced by its mean and the remainder bounded
    trunc = max(dbar, dtop - dbar) * (1 - M ** -a) / (a * lnM) / float(P) ** depth
    eps = np.finfo(float).eps
    out = []
    for n in ns:
        theta = 2 * math.pi * n / lnM
        s = complex(a, theta)
        E = np.exp(-s * lnJ)                       # J^-s, J = J0..J1
        # sum_J (C_J + dbar)(J^-s - (J+1)^-s), summed by parts
        total = (w0 + dbar) * E[0] - (w1 + dbar) * E[-1] + np.dot(dC[:-1], E[1:-1])
        value = total / (s * lnM)
        mag = (abs(w0) + abs(w1) + 2) * abs(E[0]) + float(np.dot(np.abs(dC[:-1]), np.abs(E[1:-1])))
        rnd = 4 * eps * (1 + abs(theta) * lnJ[-1]) * mag / (abs(s) * lnM)
        out.append(FourierCoefficient(int(n), complex(value), trunc + rnd))
    return out


def fourier_coefficient(sys: CantorSystem, n: int, resolution: int = 12) -> FourierCoefficient:
    """c_n of lambda(M^u) on [0, 1), from exact cell integrals at depth ``resolution``.

    The difference from depth ``resolution - 1`` is attached as a refinement check.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    fine = _coefficients(sys, [n], resolution)[0]
    coarse = _coefficients(sys, [n], resolution - 1)[0]
    return FourierCoefficient(n, fine.value, fine.error_bound, abs(fine.value - coarse.value))


def fourier_coefficients(sys: CantorSystem, n_max: int, resolution: int = 12) -> dict[int, FourierCoefficient]:
    """c_n for -n_max <= n <= n_max, each computed independently."""
    ns = list(range(-n_max, n_max + 1))
    return {c.n: c for c in _coefficients(sys, ns, resolution)}


def log_phase(sys: CantorSystem, x) -> float:
    """frac(log_{m+1} x), after an exact reduction of x into [1, m+1)."""
    x = exact_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    M = sys.src_base
    while x >= M:
        x /= M
    while x < 1:
        x *= M
    with mp.workprec(80):
        return float(mp.log(_to_mpf(x)) / mp.log(M))


def cesaro_sum(sys: CantorSystem, x, N: int, coeffs) -> float:
    """Fejer mean of the log-Fourier series of lambda at x."""
    u = log_phase(sys, x)
    if N == 0:
        return complex(_coef(coeffs, 0)).real
    ns = np.arange(-N, N + 1)
    c = np.array([complex(_coef(coeffs, int(k))) for k in ns])
    wts = 1 - np.abs(ns) / (N + 1)
    return float(np.real(np.sum(wts * c * np.exp(2j * math.pi * ns * u))))


def _coef(coeffs, n):
    c = coeffs[n]
    return c.value if isinstance(c, FourierCoefficient) else c
