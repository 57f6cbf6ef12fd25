"""Error sweeps and the named verification suites behind ``lagasy verify``.

Each suite returns ``{"suite": name, "passed": bool, "checks": [...]}`` where
every check records the measured value, its tolerance and the verdict.
Nothing here draws random numbers; test points come from fixed lattices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .appendix import appendix_u
from .auxfun import make_context, p_inf
from .errors import MalformedSpec
from .evaluate import Evaluator, ScaledValue, classify, hermite_eval
from .mrs import h_taylor, mrs_beta, mrs_exp_asymptotic, mrs_numeric
from .oracle import classical_eval, hermite_recurrence, oracle_eval, oracle_p, oracle_table
from .quadrature import check_rule, gauss_rule, oracle_rule
from .rseries import build_u, delta_direct, delta_series, s_recursive, s_series
from .weight import WeightSpec, classical, monomial, polynomial

# errors below this level sit on the roundoff floor and carry no slope information
SATURATION_FLOOR = 1e-13

X_RULES = ("z", "ratio", "per-n", "x")
KINDS = ("poly", "hermite", "beta")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepSpec:
    """Grid of an error sweep.

    ``rule`` places the evaluation point: ``z`` fixes ``z = x / beta_n``
    (``value`` may be complex), ``ratio`` fixes a real ``x / beta_n``,
    ``per-n`` sets ``x = value * n`` and ``x`` is absolute.  For
    ``kind='hermite'`` the rule places ``x^2``, the Laguerre-side variable,
    and the Hermite degree is ``2n`` (``alpha = -1/2``) or ``2n + 1``
    (``alpha = 1/2``).  ``kind='beta'`` compares the asymptotic MRS number of
    the exponential field with the numerical one and ignores ``T``.
    """

    weight: WeightSpec
    rule: str
    value: complex
    ns: Sequence[int]
    Ts: Sequence[int] = (1, 2, 3)
    digits: int = 32
    kind: str = "poly"
    K: int = 8

    def __post_init__(self):
        if self.rule not in X_RULES:
            raise MalformedSpec(f"unknown x rule {self.rule!r}")
        if self.kind not in KINDS:
            raise MalformedSpec(f"unknown sweep kind {self.kind!r}")
        ns = [int(n) for n in self.ns]
        if any(n < 1 for n in ns) or ns != sorted(ns):
            raise MalformedSpec("n-list must be positive and ascending")
        self.ns = ns
        if any(int(T) < 1 or int(T) > self.K + 1 for T in self.Ts):
            raise MalformedSpec(f"terms must lie in 1..{self.K + 1}")
        self.Ts = [int(T) for T in self.Ts]


def _point(rule: str, value: complex, n: int, beta: float) -> complex:
    if rule in ("z", "ratio"):
        return complex(value) * beta
    if rule == "per-n":
        return complex(value) * n
    return complex(value)


def _reference(w: WeightSpec, n: int, x: complex, digits: int) -> ScaledValue:
    if w.is_classical_type and w.coeffs[1] == 1.0:
        m, l = classical_eval(w.alpha, n, x, w.q0, scaled=True)
        return ScaledValue(m, l)
    return ScaledValue(*oracle_eval(oracle_table(w, max(n, 1), digits), n, x, scaled=True))


def sweep_rows(spec: SweepSpec) -> List[dict]:
    """Rows ``{n, T, region, relative_error}`` in ascending ``(n, T)`` order."""
    rows = []
    w = spec.weight
    if spec.kind == "beta":
        for n in spec.ns:
            exact = mrs_numeric(w, n)
            rows.append({"n": n, "T": 0, "region": "beta",
                         "relative_error": abs(mrs_exp_asymptotic(n) - exact) / exact})
        return rows
    for n in spec.ns:
        if spec.kind == "hermite":
            odd = w.alpha > 0
            ev = Evaluator(w, n, K=spec.K)
            y = _point(spec.rule, spec.value, n, ev.beta).real
            x = math.sqrt(y)
            nh = 2 * n + (1 if odd else 0)
            if w.coeffs == (0.0, 1.0):
                ref = ScaledValue(*hermite_recurrence(nh, x, scaled=True))
            else:
                ref = _reference(w, n, y, spec.digits) * (x if odd else 1.0)
            region = classify(y / ev.beta).value
            for T in spec.Ts:
                v = hermite_eval(nh, x, T, coeffs=w.coeffs, K=spec.K)
                rows.append({"n": n, "T": T, "region": region, "relative_error": v.rel_diff(ref)})
            continue
        ev = Evaluator(w, n, K=spec.K)
        x = _point(spec.rule, spec.value, n, ev.beta)
        xx = x.real if x.imag == 0 else x
        ref = _reference(w, n, xx, spec.digits)
        region = classify(x / ev.beta).value
        for T in spec.Ts:
            rows.append({"n": n, "T": T, "region": region,
                         "relative_error": ev.at_x(xx, T).rel_diff(ref)})
    return rows


def fit_slope(ns, errs, floor: float = SATURATION_FLOOR) -> float:
    """Least-squares slope of ``log err`` against ``log n`` over the unsaturated points."""
    ns, errs = np.asarray(ns, dtype=float), np.asarray(errs, dtype=float)
    keep = np.isfinite(errs) & (errs > floor)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(ns[keep]), np.log(errs[keep]), 1)[0])


def slopes(rows: List[dict]) -> Dict[int, float]:
    out = {}
    for T in sorted({r["T"] for r in rows}):
        sel = [r for r in rows if r["T"] == T]
        out[T] = fit_slope([r["n"] for r in sel], [r["relative_error"] for r in sel])
    return out


# ---------------------------------------------------------------------------
# suite plumbing
# ---------------------------------------------------------------------------

def _check(name: str, value: float, tol: float, passed: Optional[bool] = None, **info) -> dict:
    ok = bool(value <= tol) if passed is None else bool(passed)
    return {"name": name, "value": float(value), "tol": float(tol), "passed": ok, **info}


def _slope_checks(prefix: str, rows: List[dict], width: float) -> List[dict]:
    out = []
    for T, s in slopes(rows).items():
        out.append(_check(f"{prefix} slope T={T}", abs(s + T), width, passed=abs(s + T) <= width,
                          slope=s))
    return out


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

_APPENDIX_CLASSICAL = [("left", 1, 1), ("left", 2, 1), ("left", 3, 1), ("left", 3, 2),
                       ("right", 1, 1), ("right", 1, 2), ("right", 2, 1), ("right", 2, 2),
                       ("right", 2, 3), ("right", 3, 1), ("right", 3, 2), ("right", 3, 3),
                       ("right", 3, 4), ("right", 3, 5)]
_APPENDIX_GENERAL = [e for e in _APPENDIX_CLASSICAL if e[1] <= 2]


def appendix_errors(w: WeightSpec, n: Optional[float], entries, method: str = "EUW") -> Dict[str, float]:
    """Relative deviation of the recursive ``U`` from the closed forms, per entry."""
    K = max(k for _, k, _ in entries)
    tab = build_u(w, n, K=K, method=method)
    if w.is_classical_type and w.coeffs[1] == 1.0:
        c, d0 = (4.0, 0.0, 0.0), 4.0
    else:
        beta = mrs_beta(w, n)
        c = h_taylor(w, n, beta, "right", 3)
        d0 = h_taylor(w, n, beta, "left", 1)[0]
    return {f"{s}{k}{q}": _rel(tab.u(s, k, q), appendix_u(s, k, q, w.alpha, c=c, d0=d0))
            for s, k, q in entries}


def suite_appendix() -> dict:
    checks = []
    t0 = time.perf_counter()
    for alpha in (0.0, 0.3, 2.8):
        for method in ("EUW", "EUpole"):
            errs = appendix_errors(classical(alpha), None, _APPENDIX_CLASSICAL, method)
            checks.append(_check(f"classical alpha={alpha} {method}", max(errs.values()), 1e-12))
        errs = appendix_errors(monomial(alpha, 2, 1.0), 100.0, _APPENDIX_GENERAL)
        checks.append(_check(f"Q=x^2 alpha={alpha}", max(errs.values()), 1e-12))
    checks.append(_check("runtime seconds", time.perf_counter() - t0, 5.0))
    return _finish("appendixA", checks)


def convergence_rows(ns=tuple(2 ** k for k in range(5, 11)), Ts=(1, 2, 3)) -> List[dict]:
    """Classical weight at ``x = 4n/1000`` against the double precision recurrence."""
    return sweep_rows(SweepSpec(classical(0.0), "per-n", 0.004, ns, Ts))


def suite_convergence() -> dict:
    t0 = time.perf_counter()
    rows = convergence_rows()
    checks = _slope_checks("classical x=4n/1000", rows, 0.3)
    last = [r for r in rows if r["n"] == 1024 and r["T"] == 3][0]
    checks.append(_check("n=1024 T=3 relative error", last["relative_error"], 1e-9))
    checks.append(_check("runtime seconds", time.perf_counter() - t0, 30.0))
    return _finish("convergence", checks)


def hermite_identity_error(nmax: int = 50) -> float:
    """``max |H_{2n}(x) - p_n^{(-1/2)}(x^2)|`` relative, both from recurrences."""
    xs = np.linspace(0.05, 1.0, 20)
    worst = 0.0
    w = classical(-0.5)
    for n in range(nmax + 1):
        x = xs * math.sqrt(4 * n + 2)
        h = hermite_recurrence(2 * n, x)
        p = oracle_p(w, n, x * x)
        worst = max(worst, float(np.max(np.abs(h - p)) / np.max(np.abs(h))))
    return worst


def hermite_rows(ns=tuple(2 ** k for k in range(5, 11)), Ts=(1, 2, 3)) -> List[dict]:
    """``H_{2n}`` of ``exp(-x^2)`` at ``x = sqrt(3.88 n)`` through the Laguerre side."""
    return sweep_rows(SweepSpec(classical(-0.5), "per-n", 3.88, ns, Ts, kind="hermite"))


def suite_hermite() -> dict:
    checks = [_check("H_2n = p_n^(-1/2)(x^2), n <= 50", hermite_identity_error(), 1e-10)]
    checks += _slope_checks("H_2n at x=sqrt(3.88n)", hermite_rows(), 0.3)
    return _finish("hermite", checks)


def suite_quadrature(large: bool = True) -> dict:
    w = classical(0.0)
    checks = []
    for n in (100, 1000):
        rule = gauss_rule(w, n)
        rep = check_rule(rule, 21)
        checks.append(_check(f"n={n} |sum w - 1|", rep["mass_error"], 1e-12))
        checks.append(_check(f"n={n} moments <= 21", rep["max_residual"], 1e-11))
        checks.append(_check(f"n={n} positive and increasing", 0.0, 0.0,
                             passed=rep["positive"] and rep["increasing"]))
        if n == 100:
            ref = oracle_rule(w, n)
            checks.append(_check("n=100 nodes vs recurrence roots",
                                 float(np.max(np.abs(rule.nodes / ref.nodes - 1))), 1e-10))
    if large:
        t0 = time.perf_counter()
        gauss_rule(w, 1000)
        t3 = time.perf_counter() - t0
        t0 = time.perf_counter()
        gauss_rule(w, 10 ** 6)
        t6 = time.perf_counter() - t0
        checks.append(_check("n=1e6 wall seconds", t6, 10.0))
        checks.append(_check("per-node time ratio 1e6 / 1e3", (t6 / 1e6) / (t3 / 1e3), 3.0))
    return _finish("quadrature", checks)


def _lattice(count: int) -> np.ndarray:
    """Deterministic points spread over the annulus 0.05 < |z - 1/2| < 2 off the real axis."""
    k = np.arange(1, count + 1)
    golden = (math.sqrt(5) - 1) / 2
    r = 0.05 + 1.95 * ((k * golden) % 1.0)
    th = 2 * math.pi * ((k * math.sqrt(2)) % 1.0)
    z = 0.5 + r * np.exp(1j * th)
    return np.where(np.abs(z.imag) < 1e-3, z + 0.01j, z)


def det_pinf_error(alphas=(0.0, 0.3, 2.8, -0.5)) -> float:
    worst = 0.0
    for a in alphas:
        for z in _lattice(100):
            worst = max(worst, abs(np.linalg.det(p_inf(a, z)) - 1))
    return worst


def realness_error(w: WeightSpec, n: int, T: Optional[int] = 3, count: int = 2000) -> float:
    """``|Im p_n| / local envelope`` on a grid of (0, 1) in the ``z`` variable."""
    ev = Evaluator(w, n)
    z = np.linspace(0.0, 1.0, count + 2)[1:-1]
    m, l = ev.at_z(z, T)
    mag = np.exp(l - l.max())
    width = max(2, count // n)
    env = np.array([mag[max(0, i - width):i + width + 1].max() for i in range(count)])
    return float(np.max(np.abs(m.imag) * mag / env))


def tableau_residuals(w: WeightSpec, n: Optional[float], K: int = 6) -> dict:
    tab = build_u(w, n, K=K)
    return {"pole": tab.pole_residual, "parity": tab.parity_residual}


def engine_disagreement(w: WeightSpec, n: Optional[float], K: int = 6) -> float:
    a = build_u(w, n, K=K, method="EUW")
    b = build_u(w, n, K=K, method="EUpole")
    scale = max(np.max(np.abs(a.U[s])) for s in ("left", "right"))
    return max(float(np.max(np.abs(a.U[s] - b.U[s]))) for s in ("left", "right")) / scale


def s_check_error(w: WeightSpec, n: float, depth: int = 4) -> float:
    """Trace-form ``s_k`` tableau against recursive inversion of the pointwise ``Delta_k``."""
    ctx = make_context(w, n)
    worst = 0.0
    for side, c in (("right", 1.0), ("left", 0.0)):
        S = s_series(w, side, n, K=depth)
        D = delta_series(w, side, n, K=depth)
        for z in (c + 0.03 * np.exp(0.7j), c + 0.05 * np.exp(2.5j)):
            dd = [delta_direct(ctx, side, k, z) for k in range(1, depth + 1)]
            sr = s_recursive(dd)
            for k in range(1, depth + 1):
                worst = max(worst, _rel(S.eval(k, z), sr[k - 1]), _rel(D.eval(k, z), dd[k - 1]))
    return worst


def left_vanishing(alpha: float, K: int = 6) -> float:
    return float(np.max(np.abs(build_u(classical(alpha), None, K=K).U["left"])))


def suite_invariants() -> dict:
    weights = [(classical(0.3), None), (monomial(2.8, 3, 0.7, -1.5), None),
               (polynomial(1.2, [0.0, 1.0, -0.3, 0.5]), 100.0)]
    checks = [_check("det P_inf = 1", det_pinf_error(), 1e-12)]
    checks.append(_check("p_n real on (0,1), classical", realness_error(classical(0.3), 200), 1e-9))
    checks.append(_check("p_n real on (0,1), monomial",
                         realness_error(monomial(2.8, 3, 0.7, -1.5), 150), 1e-9))
    for w, n in weights:
        res = tableau_residuals(w, n)
        name = w.render()
        checks.append(_check(f"pole orders {name}", res["pole"], 1e-12))
        checks.append(_check(f"odd powers cancel {name}", res["parity"], 1e-12))
        checks.append(_check(f"EUW vs EUpole {name}", engine_disagreement(w, n), 1e-12))
        checks.append(_check(f"s_k trace vs recursive {name}", s_check_error(w, n or 100.0), 1e-11))
    for a in (0.5, -0.5):
        checks.append(_check(f"left tableau vanishes alpha={a}", left_vanishing(a), 1e-14))
    return _finish("invariants", checks)


def _finish(name: str, checks: List[dict]) -> dict:
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}


SUITES: Dict[str, Callable[[], dict]] = {
    "appendixA": suite_appendix,
    "convergence": suite_convergence,
    "hermite": suite_hermite,
    "quadrature": suite_quadrature,
    "invariants": suite_invariants,
}


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise MalformedSpec(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name]()
