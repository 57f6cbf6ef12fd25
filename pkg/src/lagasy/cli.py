"""Command-line interface: ``lagasy <command> [options]``.

Commands: ``tables``, ``eval``, ``oracle``, ``mrs``, ``quad``, ``sweep`` and
``verify``.  The global options ``--weight``, ``--json`` and ``--out`` may be
given before or after the command.  Exit codes: 0 success, 2 usage error
(bad arguments or weight spec), 3 numerical failure or failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from typing import List, Optional

from .errors import LagasyError
from .evaluate import Evaluator, ScaledValue, classify
from .mrs import exp_beta_residual, mrs_beta, mrs_integral, mrs_poly_expansion
from .oracle import oracle_p, oracle_table, oracle_eval
from .quadrature import gauss_rule
from .rseries import TABLE_ENV, build_u, s_series, table_filename, table_key
from .suites import KINDS, SUITES, X_RULES, SweepSpec, run_suite, slopes, sweep_rows
from .weight import WeightSpec, parse_weight

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
DEFAULT_WEIGHT = "alpha=0;Q=classical"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: Optional[str]) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _csv(rows: List[dict], columns: List[str]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for r in rows:
        wr.writerow([r[c] for c in columns])
    return buf.getvalue()


def _weight(args) -> WeightSpec:
    return parse_weight(args.weight)


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"expected <re> or <re,im>, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise UsageError(f"expected comma separated integers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_tables(args) -> int:
    """Build and serialize the U, Q and W tableaux."""
    w = _weight(args)
    if args.regime == "fixed" and not w.monomial_like and args.n is None:
        raise UsageError("this field needs --n in the fixed regime")
    n = None if (args.regime == "fixed" and w.monomial_like) else args.n
    t0 = time.perf_counter()
    tab = build_u(w, n, args.regime, args.K)
    wtab = {s: s_series(w, s, n, args.regime, args.K).to_json() for s in ("left", "right")}
    seconds = time.perf_counter() - t0
    payload = {"u": tab.to_json(), "q": tab.Qtab.to_json() if tab.Qtab else None, "w": wtab}
    out = args.out
    if out is None:
        d = os.environ.get(TABLE_ENV)
        if not d:
            raise UsageError(f"give --out or set {TABLE_ENV}")
        os.makedirs(d, exist_ok=True)
        out = os.path.join(d, table_filename(table_key(w, n, args.regime, args.K)))
    with open(out, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    info = {"file": out, "build_seconds": seconds, "K": args.K, "regime": args.regime,
            "weight": w.render()}
    if args.json:
        _dump(info, None)
    else:
        print(f"wrote {out} (K={args.K}, {args.regime}) in {seconds:.3f} s")
    return EXIT_OK


def cmd_eval(args) -> int:
    w = _weight(args)
    if (args.x is None) == (args.z is None):
        raise UsageError("give exactly one of --x and --z")
    ev = Evaluator(w, args.n, K=max(args.K, (args.terms or 1) - 1), regime=args.regime)
    z = complex(args.x) / ev.beta if args.x is not None else _complex(args.z)
    val = ev.at_z(z, args.terms, normalization=args.normalization)
    res = val.to_json()
    res.update({"region": classify(z).value, "terms": args.terms, "n": args.n,
                "beta": ev.beta, "normalization": args.normalization})
    if args.json:
        _dump(res, args.out)
    else:
        m = val.mantissa
        _emit(f"p_{args.n} = ({m.real:.17g}{m.imag:+.17g}j) * exp({val.log_scale:.17g})"
              f"  [{res['region']}]\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    w = _weight(args)
    if w.is_classical_type and w.coeffs[1] == 1.0:
        val = ScaledValue(*oracle_p(w, args.n, args.x, scaled=True))
        source = "classical recurrence"
    else:
        tbl = oracle_table(w, max(args.n, 1), args.digits)
        val = ScaledValue(*oracle_eval(tbl, args.n, args.x, scaled=True))
        source = f"Stieltjes {args.digits} digits"
    res = val.to_json()
    res.update({"n": args.n, "x": args.x, "digits": args.digits, "source": source})
    if args.json:
        _dump(res, args.out)
    else:
        _emit(f"p_{args.n}({args.x:.17g}) = {val.mantissa.real:.17g} * exp({val.log_scale:.17g})"
              f"  [{source}]\n", args.out)
    return EXIT_OK


def cmd_mrs(args) -> int:
    w = _weight(args)
    beta = mrs_beta(w, args.n, args.method)
    if w.name == "exp":
        residual = abs(exp_beta_residual(args.n, beta)) / (8 * args.n)
    else:
        residual = abs(mrs_integral(w, beta) - 2 * math.pi * args.n) / (2 * math.pi * args.n)
    method = args.method
    if method == "auto":
        method = "mono" if w.monomial_like else ("poly" if w.is_polynomial else "numeric")
    res = {"beta": beta, "method": method, "residual": residual}
    if args.order is not None:
        exp = mrs_poly_expansion(w, args.order)
        res["expansion"] = {"m": exp.m, "coeffs": list(exp.coeffs),
                            "value": exp.evaluate(args.n)}
    _dump(res, args.out)
    return EXIT_OK


def cmd_quad(args) -> int:
    w = _weight(args)
    rule = gauss_rule(w, args.n, args.terms, K=args.K)
    fmt = "json" if args.json else args.format
    if fmt == "json":
        _dump({"n": rule.n, "alpha": rule.alpha, "weight": w.render(), "terms": rule.T,
               "mu0": rule.mu0, "nodes": [float(x) for x in rule.nodes],
               "weights": [float(x) for x in rule.weights]}, args.out)
    else:
        lines = ["node,weight"]
        lines += [f"{x:.17g},{v:.17g}" for x, v in zip(rule.nodes, rule.weights)]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    w = _weight(args)
    if args.value is None and args.kind != "beta":
        raise UsageError("--value is required")
    value = _complex(args.value) if args.value is not None else 0j
    spec = SweepSpec(w, args.rule, value, _int_list(args.ns), _int_list(args.terms),
                     args.digits, args.kind, args.K)
    rows = sweep_rows(spec)
    if args.json:
        _dump({"rows": rows, "slopes": {str(k): v for k, v in slopes(rows).items()}}, args.out)
    else:
        fmt = [dict(r, relative_error=f"{r['relative_error']:.6e}") for r in rows]
        _emit(_csv(fmt, ["n", "T", "region", "relative_error"]), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    reports = [run_suite(name) for name in names]
    ok = all(r["passed"] for r in reports)
    if args.json:
        _dump({"passed": ok, "suites": reports}, args.out)
    else:
        lines = []
        for r in reports:
            lines.append(f"{'PASS' if r['passed'] else 'FAIL'} {r['suite']}")
            for c in r["checks"]:
                lines.append(f"  {'ok ' if c['passed'] else 'BAD'} {c['name']}: "
                             f"{c['value']:.3e} (tol {c['tol']:.1e})")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_globals(p: argparse.ArgumentParser, sub: bool) -> None:
    d = argparse.SUPPRESS
    p.add_argument("--weight", default=d if sub else DEFAULT_WEIGHT,
                   help="weight spec, e.g. 'alpha=0;Q=classical' or 'alpha=2.8;Q=mono:3,0.7,-1.5'")
    p.add_argument("--json", action="store_true", default=d if sub else False,
                   help="machine readable output")
    p.add_argument("--out", default=d if sub else None, help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lagasy", description=__doc__.splitlines()[0])
    _add_globals(ap, False)
    sp = ap.add_subparsers(dest="command", required=True)

    def sub(name, help_text):
        p = sp.add_parser(name, help=help_text)
        _add_globals(p, True)
        return p

    p = sub("tables", "build and save U/Q/W tableaux")
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--regime", choices=("fixed", "polynomial"), default="fixed")
    p.set_defaults(func=cmd_tables)

    p = sub("eval", "evaluate p_n by the asymptotic expansion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--z", help="z = x / beta_n as re,im")
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--regime", choices=("fixed", "polynomial"), default="fixed")
    p.add_argument("--normalization", choices=("orthonormal", "monic"), default="orthonormal")
    p.set_defaults(func=cmd_eval)

    p = sub("oracle", "evaluate p_n by the recurrence oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--digits", type=int, choices=(16, 32), default=32)
    p.set_defaults(func=cmd_oracle)

    p = sub("mrs", "MRS number beta_n")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--method", choices=("auto", "mono", "poly", "numeric"), default="auto")
    p.add_argument("--order", type=int, default=None, help="also return the expansion to this order")
    p.set_defaults(func=cmd_mrs)

    p = sub("quad", "Gauss rule for the weight")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_quad)

    p = sub("sweep", "relative errors against the oracle over n and T (CSV)")
    p.add_argument("--rule", choices=X_RULES, default="z")
    p.add_argument("--value", help="z (re,im), x/beta_n, x/n or x depending on --rule")
    p.add_argument("--ns", default="32,64,128,256")
    p.add_argument("--terms", default="1,2,3")
    p.add_argument("--digits", type=int, choices=(16, 32), default=32)
    p.add_argument("--kind", choices=KINDS, default="poly")
    p.add_argument("--K", type=int, default=8)
    p.set_defaults(func=cmd_sweep)

    p = sub("verify", "run a named verification suite")
    p.add_argument("suite", help=f"one of all, {', '.join(SUITES)}")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lagasy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LagasyError as exc:
        usage = isinstance(exc, (ValueError, TypeError, KeyError, IndexError))
        print(f"lagasy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE if usage else EXIT_NUMERIC
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"lagasy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"lagasy: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
