"""Command-line front end.  Every subcommand writes one table as CSV or JSON."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys as _sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from mpmath import mp, mpf

from . import __version__
from .core import CantorSystem, cantor_value, make_system, quadratic_system, ratio, to_digits
from .errors import CantorError, IoError, UsageError
from .hp import default_precision

SUBCOMMANDS = ("seq", "extrema", "lambda", "gcantor", "fourier", "dist", "logdist", "mellin", "verify")
FORMATS = ("csv", "json")
MIN_PRECISION = 64


@dataclass
class RunConfig:
    system: str | None            # "table:v0,...,vm;p=P" or "quad:a,b,m"
    precision: int
    format: str = "csv"
    output: str | None = None
    seed: int = 0
    n_max: int | None = None
    scan_cap: int | None = None
    options: dict = field(default_factory=dict)

    def build_system(self) -> CantorSystem:
        if self.system is None:
            raise UsageError("a system is required (--table or --quad)")
        kind, _, body = self.system.partition(":")
        if kind == "quad":
            a, b, m = _int_list(body, 3)
            return quadratic_system(a, b, m)
        vals, _, p = body.partition(";p=")
        return make_system(_int_list(vals), int(p) if p else None)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _int_list(text: str, count: int | None = None) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} integers, got {text!r}")
    return vals


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("system")
    g.add_argument("--table", help="digit map values f(0),...,f(m)")
    g.add_argument("--p", type=int, help="target digit bound (default: max of the table)")
    g.add_argument("--quad", help="a,b,m for f(x) = a x^2 + b x")
    p.add_argument("--precision", type=int, help="working precision in bits (default 128, env CANTORLAB_PRECISION)")
    p.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--seed", type=int, help="seed for sampled probes (default 0)")
    p.add_argument("--n-max", type=int, help="size parameter; meaning depends on the subcommand")
    p.add_argument("--scan-cap", type=int, help="largest exhaustive scan allowed")
    p.add_argument("--config", help="JSON file with the same keys as the flags; flags win")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="cantorlab", description="Cantor-integer sequences: tables and diagnostics.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", parser_class=_Parser)
    helps = {
        "seq": "C_n with both digit strings and C_n/n^alpha, n = 1..n-max (default 100)",
        "extrema": "sup and inf of C_n/n^alpha by every applicable method",
        "lambda": "samples of the limit function on [1, m+1] (n-max samples, default 256)",
        "gcantor": "generalized Cantor function g and d(t) = g(t)/t^(1/alpha) on (0, 1]",
        "fourier": "log-Fourier coefficients c_n of lambda, |n| <= n-max (default 64)",
        "dist": "A_N/N along N = t (m+1)^k for several phases t",
        "logdist": "logarithmic distribution L(gamma) over a gamma grid",
        "mellin": "exact S(n), the closed formula, residuals and G(n)",
        "verify": "cross-module invariant suite; nonzero exit on failure",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        _common(p)
        if name == "extrema":
            p.add_argument("--method", choices=("all", "theorem", "closed", "brute"), default="all")
        if name == "fourier":
            p.add_argument("--resolution", type=int, default=12, help="cell depth k (cells of width M^-k)")
        if name == "dist":
            p.add_argument("--gamma", type=float, default=1.3)
            p.add_argument("--k-list", default="6,8,10,12")
            p.add_argument("--phases", type=int, default=8)
        if name == "logdist":
            p.add_argument("--points", type=int, default=20)
            p.add_argument("--resolution", type=int, default=10 ** 5)
        if name == "mellin":
            p.add_argument("--n-list", help="explicit n values (default: powers of m+1 up to n-max)")
            p.add_argument("--k-trunc", default="0,50,200", help="truncation orders K")
    return top


_COMMON_KEYS = {"table", "p", "quad", "precision", "format", "output", "seed", "n_max", "scan_cap"}


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv: Sequence[str]) -> tuple[str, RunConfig]:
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    if ns.command is None:
        raise UsageError(parser.format_usage())
    values = vars(ns).copy()
    if ns.config:
        for k, v in _load_config(ns.config).items():
            if k in values and values[k] is None:
                values[k] = v
    if values["quad"] is not None and (values["table"] is not None or values["p"] is not None):
        raise UsageError("give exactly one system: --quad or --table [--p]")
    if values["p"] is not None and values["table"] is None:
        raise UsageError("--p needs --table")
    if values["quad"] is not None:
        system = f"quad:{values['quad']}"
    elif values["table"] is not None:
        system = f"table:{values['table']}" + (f";p={values['p']}" if values["p"] is not None else "")
    else:
        system = None
    if system is None and ns.command != "verify":
        raise UsageError("a system is required (--table or --quad)")
    prec = values["precision"] if values["precision"] is not None else default_precision()
    if int(prec) < MIN_PRECISION:
        raise UsageError(f"precision must be at least {MIN_PRECISION} bits")
    fmt = values["format"] or "csv"
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    extra = {k: v for k, v in values.items() if k not in _COMMON_KEYS | {"command", "config"}}
    cfg = RunConfig(system, int(prec), fmt, values["output"], int(values["seed"] or 0),
                    values["n_max"], values["scan_cap"], extra)
    if system is not None:
        cfg.build_system()          # validate now so bad maps are usage errors
    return ns.command, cfg


# -- output -------------------------------------------------------------------

def _digits_for(prec: int) -> int:
    return math.ceil(prec * math.log10(2)) + 1


def _cell(v: Any, prec: int, json_mode: bool):
    if isinstance(v, bool):
        return v if json_mode else str(v).lower()
    if isinstance(v, int):
        if json_mode and abs(v) <= 2 ** 53:
            return v
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mpf):
        return mp.nstr(v, _digits_for(prec), strip_zeros=False, min_fixed=-6, max_fixed=20)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if json_mode and math.isfinite(v):
            return v
        return repr(v)
    if isinstance(v, (np.integer,)):
        return _cell(int(v), prec, json_mode)
    if v is None:
        return None if json_mode else ""
    return str(v)


def emit_table(rows: list[dict], fmt: str, path: str | None, meta: dict | None = None,
               prec: int = 128) -> int:
    """Write rows; returns 0.  Rows must share their keys."""
    meta = meta or {}
    cols = list(rows[0].keys()) if rows else list(meta.get("columns", []))
    for r in rows:
        if list(r.keys()) != cols:
            raise ValueError("rows are not homogeneous")
    if fmt == "json":
        doc = {"meta": {k: _cell(v, prec, True) for k, v in meta.items() if k != "columns"},
               "rows": [{c: _cell(r[c], prec, True) for c in cols} for r in rows]}
        text = json.dumps(doc, indent=1, ensure_ascii=False) + "\n"
    else:
        buf = io.StringIO()
        for k, v in meta.items():
            if k != "columns":
                buf.write(f"# {k}={_cell(v, prec, False)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r[c], prec, False) for c in cols])
        text = buf.getvalue()
    try:
        if path is None:
            _sys.stdout.write(text)
            _sys.stdout.flush()
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return 0


def _meta(cfg: RunConfig, sys: CantorSystem | None, command: str) -> dict:
    out = {"command": command, "system": sys.label() if sys else "reference systems"}
    if sys is not None:
        with mp.workprec(cfg.precision):
            out["alpha"] = sys.alpha_at(cfg.precision)
        out["alpha_expr"] = f"log({sys.p}+1)/log({sys.m}+1)"
    out.update(precision=cfg.precision, seed=cfg.seed, version=__version__)
    return out


# -- subcommands ----------------------------------------------------------------

def _digit_string(digits: Sequence[int], base: int) -> str:
    return ("" if base <= 10 else ".").join(map(str, digits))


def _run_seq(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    n_max = cfg.n_max or 100
    rows = []
    for n in range(1, n_max + 1):
        w = to_digits(n, sys.src_base)
        rows.append({"n": n, "digits_src": _digit_string(w.digits, sys.src_base),
                     "digits_dst": _digit_string([sys.f[d] for d in w.digits], sys.radix),
                     "C_n": cantor_value(sys, n), "ratio": ratio(sys, n, cfg.precision)})
    return rows


def _run_extrema(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .core import QuadraticFamily
    from .extrema import SCAN_CAP, brute_force_extrema, infimum_thm, quadratic_extrema, supremum_thm, ell0
    from .extrema import ExtremaResult

    method = cfg.options.get("method", "all")
    prec = cfg.precision
    cap = cfg.scan_cap or SCAN_CAP
    rows = []
    if method in ("all", "theorem") and sys.theorem_scope:
        s = supremum_thm(sys, prec)
        i = infimum_thm(sys, prec, scan_cap=cap)
        rows.append(ExtremaResult("theorem", s.value, s.witness, i.value, i.witness, ell0(sys, prec)).as_row())
    if method in ("all", "closed") and cfg.system.startswith("quad:"):
        a, b, m = _int_list(cfg.system[5:], 3)
        rows.append(quadratic_extrema(QuadraticFamily(a, b, m), prec).as_row())
    if method in ("all", "brute"):
        N = cfg.n_max or min(cap, sys.src_base ** 10)
        if N > cap:
            raise UsageError(f"--n-max {N} exceeds the scan cap {cap}")
        rows.append(brute_force_extrema(sys, N, prec).as_row())
    if not rows:
        raise UsageError(f"method {method!r} does not apply to {sys.label()}")
    return rows


def _run_lambda(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .limit import lambda_value
    count = cfg.n_max or 256
    M = sys.src_base
    rows = []
    for j in range(count):
        x = 1 + Fraction(j * (M - 1), count)
        e = lambda_value(sys, x, prec=cfg.precision)
        rows.append({"x": x, "x_decimal": float(x), "lambda": e.value, "error": e.error})
    return rows


def _run_gcantor(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .limit import cantor_function_g, density_d
    count = cfg.n_max or 256
    rows = []
    for j in range(1, count + 1):
        t = Fraction(j, count)
        g = cantor_function_g(sys, t, prec=cfg.precision)
        d = density_d(sys, t, prec=cfg.precision)
        rows.append({"t": t, "g": g.value, "g_error": g.error, "d": d.value, "d_error": d.error})
    return rows


def _run_fourier(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .limit import fourier_coefficients
    n_max = cfg.n_max if cfg.n_max is not None else 64
    co = fourier_coefficients(sys, n_max, cfg.options.get("resolution", 12))
    return [{"n": n, "re": c.value.real, "im": c.value.imag, "abs": abs(c.value),
             "n_abs": abs(n) * abs(c.value), "error_bound": c.error_bound} for n, c in sorted(co.items())]


def _run_dist(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .distribution import empirical_cdf_probe
    ks = _int_list(str(cfg.options.get("k_list", "6,8,10,12")))
    rep = empirical_cdf_probe(sys, cfg.options.get("gamma", 1.3), ks, int(cfg.options.get("phases", 8)))
    return [{"k": k, "t": t, "N": N, "fraction": v, "spread_at_k": rep.spreads[k]} for k, t, N, v in rep.rows]


def _run_logdist(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .distribution import extremal_interval, log_distribution_sweep
    lo, hi = (float(v) for v in extremal_interval(sys, cfg.precision))
    pts = int(cfg.options.get("points", 20))
    if pts < 2:
        raise UsageError("--points must be at least 2")
    pad = 0.05 * (hi - lo)
    gammas = [lo - pad + (hi - lo + 2 * pad) * j / (pts - 1) for j in range(pts)]
    res = log_distribution_sweep(sys, gammas, int(cfg.options.get("resolution", 10 ** 5)))
    return [{"gamma": r.gamma, "L": r.L_value, "error_estimate": r.error_estimate} for r in res]


def _run_mellin(sys: CantorSystem, cfg: RunConfig) -> list[dict]:
    from .mellin import residual_report
    if cfg.options.get("n_list"):
        ns = _int_list(str(cfg.options["n_list"]))
    else:
        top = cfg.n_max or sys.src_base ** 10
        ns, v = [], sys.src_base
        while v <= top:
            ns.append(v)
            v *= sys.src_base
    Ks = _int_list(str(cfg.options.get("k_trunc", "0,50,200")))
    rep = residual_report(sys, ns, Ks)
    return [{"n": r["n"], "K": r["K"], "S_exact": r["S_exact"], "formula": r["formula"],
             "residual": r["residual"], "G_n": r["G_n"]} for r in rep.rows]


RUNNERS = {"seq": _run_seq, "extrema": _run_extrema, "lambda": _run_lambda, "gcantor": _run_gcantor,
           "fourier": _run_fourier, "dist": _run_dist, "logdist": _run_logdist, "mellin": _run_mellin}


def run(command: str, cfg: RunConfig) -> int:
    if command == "verify":
        from .verify import run_invariants
        systems = [cfg.build_system()] if cfg.system else None
        res = run_invariants(systems, cfg.precision)
        rows = [{"check": r.name, "system": r.system, "passed": r.passed, "detail": r.detail} for r in res]
        emit_table(rows, cfg.format, cfg.output, _meta(cfg, systems[0] if systems else None, command),
                   cfg.precision)
        return 0 if all(r.passed for r in res) else 1
    sys = cfg.build_system()
    with mp.workprec(cfg.precision):
        rows = RUNNERS[command](sys, cfg)
    return emit_table(rows, cfg.format, cfg.output, _meta(cfg, sys, command), cfg.precision)


def main(argv: Sequence[str] | None = None) -> int:
    argv = _sys.argv[1:] if argv is None else argv
    try:
        command, cfg = parse_args(argv)
        return run(command, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=_sys.stderr)
        return 2
    except CantorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
