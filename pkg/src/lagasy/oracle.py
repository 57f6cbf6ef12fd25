"""Reference values independent of the asymptotic machinery.

* :func:`classical_eval` runs the exact three-term recurrence of the
  orthonormal Laguerre polynomials in double precision.
* :func:`stieltjes_coeffs` computes recurrence coefficients of a general
  weight by the discretized Stieltjes procedure in double-double arithmetic.
* :func:`oracle_eval` evaluates a polynomial from such a table.
* :func:`integrate_weight` integrates ``f w`` in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np
from mpmath.calculus.quadrature import GaussLegendre

from . import ddarith as dd
from .errors import DegreeExceedsTable, PrecisionUnreachable, TailTruncationFailure
from .mrs import mrs_beta
from .weight import WeightSpec, require_integrable

MAX_N = 256
_LN10 = math.log(10.0)


# ---------------------------------------------------------------------------
# classical recurrence
# ---------------------------------------------------------------------------

def classical_coeffs(alpha: float, N: int):
    """Exact ``a_k = 2k + alpha + 1`` and ``b_k = sqrt((k+1)(k+1+alpha))``."""
    k = np.arange(N, dtype=float)
    return 2 * k + alpha + 1, np.sqrt((k + 1) * (k + 1 + alpha))


def classical_eval(alpha: float, n: int, x, q0: float = 0.0, scaled: bool = False):
    """Orthonormal ``p_n(x)`` for ``x^alpha exp(-x - q0)`` by forward recurrence.

    Works elementwise on arrays and for complex ``x``.  With ``scaled=True``
    the result is returned as ``(mantissa, log_scale)`` arrays, renormalizing
    whenever the iterates grow large, so no overflow occurs.  Relative
    accuracy saturates near 1e-14.
    """
    x = np.asarray(x)
    dtype = complex if np.iscomplexobj(x) else float
    log_mu0 = math.lgamma(alpha + 1) - q0
    p_prev = np.zeros(x.shape, dtype=dtype)
    p = np.full(x.shape, math.exp(-0.5 * log_mu0), dtype=dtype)
    logs = np.zeros(x.shape)
    b_prev = 0.0
    for k in range(n):
        a = 2 * k + alpha + 1
        b = math.sqrt((k + 1) * (k + 1 + alpha))
        p, p_prev = ((x - a) * p - b_prev * p_prev) / b, p
        b_prev = b
        if scaled:
            big = np.maximum(np.abs(p), np.abs(p_prev))
            fix = big > 1e100
            if np.any(fix):
                s = np.where(fix, big, 1.0)
                p = p / s
                p_prev = p_prev / s
                logs = logs + np.log(s)
    if not scaled:
        return p[()] if p.ndim == 0 else p
    mag = np.abs(p)
    nz = mag > 0
    mant = np.where(nz, p / np.where(nz, mag, 1.0), 0).astype(complex)
    logs = logs + np.log(np.where(nz, mag, 1.0))
    if mant.ndim == 0:
        return complex(mant), float(logs)
    return mant, logs


# ---------------------------------------------------------------------------
# discretized Stieltjes procedure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceTable:
    """Orthonormal recurrence ``b_k p_{k+1} = (x - a_k) p_k - b_{k-1} p_{k-1}``.

    ``a_lo``/``b_lo``/``mu0_lo`` hold the low parts of double-double values.
    """

    a: np.ndarray
    b: np.ndarray
    precision_digits: int
    mu0: float
    a_lo: Optional[np.ndarray] = None
    b_lo: Optional[np.ndarray] = None
    mu0_lo: float = 0.0
    X: float = math.inf

    def __post_init__(self):
        if np.any(np.asarray(self.b) <= 0):
            raise ValueError("recurrence coefficients b_k must be positive")

    @property
    def N(self) -> int:
        return len(self.a)

    def mp_coeffs(self):
        """Coefficients as mpmath numbers carrying both double-double parts."""
        alo = self.a_lo if self.a_lo is not None else np.zeros_like(self.a)
        blo = self.b_lo if self.b_lo is not None else np.zeros_like(self.b)
        a = [mpmath.mpf(float(h)) + mpmath.mpf(float(l)) for h, l in zip(self.a, alo)]
        b = [mpmath.mpf(float(h)) + mpmath.mpf(float(l)) for h, l in zip(self.b, blo)]
        return a, b, mpmath.mpf(self.mu0) + mpmath.mpf(self.mu0_lo)


def _q_mp(w: WeightSpec, x):
    if w.is_polynomial:
        return mpmath.polyval(list(w.coeffs)[::-1], x)
    if w.name == "exp":
        return mpmath.exp(x)
    return mpmath.mpf(float(np.real(w.Q(float(x)))))


def truncation_point(w: WeightSpec, digits: int) -> float:
    """Solve ``Q(X) - alpha log X = (digits + 5) log 10`` by Newton."""
    target = (digits + 5) * _LN10
    X = max(w.Q_inverse(target), 1.0)
    for _ in range(60):
        f = float(np.real(w.Q(X))) - w.alpha * math.log(X) - target
        df = float(np.real(w.dQ(X))) - w.alpha / X
        step = f / df if df > 0 else -X
        X_new = X - step
        if X_new <= 0:
            X_new = 0.5 * X
        if abs(X_new - X) <= 1e-14 * X:
            return X_new
        X = X_new
    return X


def _gauss_nodes(degree: int, dps: int):
    """Gauss-Legendre nodes on [-1, 1] as ``(t + 1, weight)`` pairs."""
    with mpmath.workdps(dps):
        return [(t + 1, wt) for t, wt in GaussLegendre(mpmath.mp).calc_nodes(degree, mpmath.mp.prec)]


def _tanh_sinh_nodes(h: float, dps: int):
    """Tanh-sinh nodes on [-1, 1] as ``(t + 1, weight)`` pairs.

    ``t + 1`` is formed as ``e^s / cosh s`` so nodes crowding at -1 keep
    their relative accuracy.
    """
    out = []
    with mpmath.workdps(dps):
        hm = mpmath.mpf(h)
        tiny = mpmath.mpf(10) ** (-dps - 5)
        k = 0
        while True:
            done = True
            for kk in ((k,) if k == 0 else (k, -k)):
                s = mpmath.pi / 2 * mpmath.sinh(kk * hm)
                wt = hm * mpmath.pi / 2 * mpmath.cosh(kk * hm) / mpmath.cosh(s) ** 2
                if wt > tiny:
                    done = False
                    out.append((mpmath.exp(s) / mpmath.cosh(s), wt))
            if done:
                return out
            k += 1


def _discretize(w: WeightSpec, X: float, N: int, beta: float, digits: int, density: float):
    """Nodes and weights of a discrete measure approximating ``w`` on ``[0, X]``.

    Works in ``u = sqrt(x)``, where the zeros of ``p_N`` are nearly uniformly
    spaced from the hard edge to the soft edge.  The panel at ``u = 0``
    uses tanh-sinh nodes to absorb the ``u^(2 alpha + 1)`` endpoint factor;
    the others use Gauss-Legendre.
    """
    dps = digits + 8
    U = math.sqrt(X)
    per_panel = 3.0 / density
    npan = int(math.ceil(max(N, 4) * U / math.sqrt(beta) / per_panel)) + 4
    gl = _gauss_nodes(5 if digits <= 16 else 6, dps)       # 48 or 96 points
    ts = _tanh_sinh_nodes((1 / 16 if digits <= 16 else 1 / 32) / density, dps)
    xs, ws = [], []
    with mpmath.workdps(dps):
        h = mpmath.mpf(U) / npan
        two_a1 = 2 * mpmath.mpf(w.alpha) + 1
        for j in range(npan):
            lo = j * h
            rule = ts if j == 0 else gl
            for t1, wt in rule:
                u = lo + t1 * h / 2
                if u <= 0:
                    continue
                x = u * u
                val = 2 * u ** two_a1 * mpmath.exp(-_q_mp(w, x)) * wt * h / 2
                xs.append(x)
                ws.append(val)
        xh = np.array([float(v) for v in xs])
        xl = np.array([float(v - mpmath.mpf(float(v))) for v in xs])
        wh = np.array([float(v) for v in ws])
        wl = np.array([float(v - mpmath.mpf(float(v))) for v in ws])
    keep = wh > 0
    return (xh[keep], xl[keep]), (wh[keep], wl[keep])


def _stieltjes(x, W, N: int):
    mu0 = dd.total(W)
    q_prev = dd.dd(np.zeros_like(x[0]))
    inv = dd.div(dd.dd(1.0), dd.sqrt(dd.dd(mu0[0], mu0[1])))
    q = dd.dd(np.full_like(x[0], float(inv[0])), np.full_like(x[0], float(inv[1])))
    a_hi, a_lo, b_hi, b_lo = (np.zeros(N) for _ in range(4))
    b_prev = (0.0, 0.0)
    for k in range(N):
        wq = dd.mul(W, q)
        ak = dd.total(dd.mul(wq, dd.mul(x, q)))
        r = dd.mul(dd.sub(x, dd.dd(ak[0], ak[1])), q)
        r = dd.sub(r, dd.mul(dd.dd(b_prev[0], b_prev[1]), q_prev))
        bk2 = dd.total(dd.mul(W, dd.mul(r, r)))
        bk = dd.sqrt(dd.dd(bk2[0], bk2[1]))
        bk = (float(bk[0]), float(bk[1]))
        a_hi[k], a_lo[k] = ak
        b_hi[k], b_lo[k] = bk
        q_prev, q = q, dd.div(r, dd.dd(bk[0], bk[1]))
        b_prev = bk
    return a_hi, a_lo, b_hi, b_lo, mu0


def _log_tail(tbl: RecurrenceTable, w: WeightSpec, x: float) -> float:
    """``log(p_N(x)^2 w(x) x)`` with ``p_N`` from the table (the tail size)."""
    m, ls = _mp_recurrence(tbl, tbl.N, mpmath.mpf(x))
    return float(2 * ls + w.alpha * math.log(x) - float(np.real(w.Q(x))) + math.log(x))


def stieltjes_coeffs(w: WeightSpec, N: int, digits: int = 32, density: float = 1.0,
                     X: Optional[float] = None) -> RecurrenceTable:
    """Recurrence coefficients ``a_0..a_{N-1}``, ``b_0..b_{N-1}`` of ``w``.

    The weight is discretized on ``[0, X]``, with ``X`` first taken from the
    weight tail and then enlarged until ``p_N^2 w`` is negligible there;
    the Stieltjes procedure then runs in double-double arithmetic.
    ``density`` scales the number of quadrature nodes (refinement checks).
    """
    require_integrable(w)
    if digits not in (16, 32):
        raise PrecisionUnreachable(f"digits must be 16 or 32, got {digits}")
    if not w.is_polynomial and w.name != "exp" and digits > 16:
        raise PrecisionUnreachable("general fields are evaluated in double precision only")
    if N > MAX_N:
        raise PrecisionUnreachable(f"N={N} exceeds the supported maximum {MAX_N}")
    beta = mrs_beta(w, max(N, 1))
    limit = -(digits + 5) * _LN10
    fixed = X is not None
    if X is None:
        X = max(truncation_point(w, digits), 1.5 * beta)
    for _ in range(6):
        xs, W = _discretize(w, X, N + 1, beta, digits, density)
        a_hi, a_lo, b_hi, b_lo, mu0 = _stieltjes(xs, W, N + 1)
        tbl = RecurrenceTable(a_hi[:N], b_hi[:N], digits, mu0[0], a_lo[:N], b_lo[:N],
                              mu0[1], X)
        if fixed:
            return tbl
        full = RecurrenceTable(a_hi, b_hi, digits, mu0[0], a_lo, b_lo, mu0[1], X)
        if _log_tail(full, w, X) < limit:
            return tbl
        grid = X * 1.15 ** np.arange(1, 40)
        for Xn in grid:
            if _log_tail(full, w, Xn) < limit - 5:
                break
        X = float(Xn)
    raise TailTruncationFailure(f"no truncation point found up to X={X:g}")


# ---------------------------------------------------------------------------
# table evaluation
# ---------------------------------------------------------------------------

def _mp_recurrence(tbl: RecurrenceTable, n: int, x):
    """``p_n(x)`` at 34 digits as ``(unit mantissa, log magnitude)``."""
    with mpmath.workdps(34):
        a, b, mu0 = tbl.mp_coeffs()
        p_prev = mpmath.mpf(0)
        p = 1 / mpmath.sqrt(mu0)
        for k in range(n):
            bp = b[k - 1] if k else mpmath.mpf(0)
            p, p_prev = ((x - a[k]) * p - bp * p_prev) / b[k], p
        mag = abs(p)
        if mag == 0:
            return 0j, 0.0
        return complex(p / mag), float(mpmath.log(mag))


def oracle_eval(tbl: RecurrenceTable, n: int, x, scaled: bool = False):
    """Orthonormal ``p_n(x)`` from a recurrence table (real or complex ``x``).

    The recurrence runs in 34-digit arithmetic on the double-double
    coefficients.  ``scaled=True`` returns ``(mantissa, log_scale)``.
    """
    if n < 0 or n > tbl.N:
        raise DegreeExceedsTable(f"degree {n} needs a table with N >= {n}, have {tbl.N}")
    xs = np.asarray(x)
    flat = xs.ravel()
    out = [_mp_recurrence(tbl, n, mpmath.mpmathify(complex(v)) if np.iscomplexobj(flat)
                          else mpmath.mpf(float(v))) for v in flat]
    mant = np.array([o[0] for o in out], dtype=complex).reshape(xs.shape)
    logs = np.array([o[1] for o in out]).reshape(xs.shape)
    if scaled:
        return (complex(mant), float(logs)) if xs.ndim == 0 else (mant, logs)
    val = mant * np.exp(logs)
    if not np.iscomplexobj(xs):
        val = val.real
    return val[()] if xs.ndim == 0 else val


@lru_cache(maxsize=16)
def _cached_table(w_key, N: int, digits: int) -> RecurrenceTable:
    return stieltjes_coeffs(WeightSpec.from_json(w_key), N, digits)


def oracle_table(w: WeightSpec, N: int, digits: int = 32) -> RecurrenceTable:
    """Memoized :func:`stieltjes_coeffs` for serializable weights."""
    import json
    if N <= MAX_N:
        N = min(MAX_N, 32 * int(math.ceil(max(N, 1) / 32)))
    return _cached_table(json.dumps(w.to_json(), sort_keys=True), N, digits)


def oracle_p(w: WeightSpec, n: int, x, scaled: bool = False):
    """Reference ``p_n(x)``: exact classical recurrence when ``Q = x + q0``,
    otherwise a 32-digit Stieltjes table."""
    require_integrable(w)
    if w.is_classical_type and w.coeffs[1] == 1.0:
        return classical_eval(w.alpha, n, x, w.q0, scaled=scaled)
    return oracle_eval(oracle_table(w, max(n, 1)), n, x, scaled=scaled)


def hermite_recurrence(n: int, x, scaled: bool = False):
    """Orthonormal Hermite polynomial for ``exp(-x^2)`` on the real line.

    ``H_0 = pi^{-1/4}``, ``H_{k+1} = x sqrt(2/(k+1)) H_k - sqrt(k/(k+1)) H_{k-1}``.
    """
    x = np.asarray(x)
    dtype = complex if np.iscomplexobj(x) else float
    h_prev = np.zeros(x.shape, dtype=dtype)
    h = np.full(x.shape, math.pi ** -0.25, dtype=dtype)
    logs = np.zeros(x.shape)
    for k in range(n):
        h, h_prev = x * math.sqrt(2.0 / (k + 1)) * h - math.sqrt(k / (k + 1)) * h_prev, h
        big = np.maximum(np.abs(h), np.abs(h_prev))
        fix = big > 1e100
        if np.any(fix):
            s = np.where(fix, big, 1.0)
            h, h_prev, logs = h / s, h_prev / s, logs + np.log(s)
    if not scaled:
        out = h * np.exp(logs)
        return out[()] if out.ndim == 0 else out
    mag = np.abs(h)
    nz = mag > 0
    mant = np.where(nz, h / np.where(nz, mag, 1.0), 0).astype(complex)
    logs = logs + np.log(np.where(nz, mag, 1.0))
    return (complex(mant), float(logs)) if mant.ndim == 0 else (mant, logs)


# ---------------------------------------------------------------------------
# weighted integration
# ---------------------------------------------------------------------------

def integrate_weight(w: WeightSpec, f: Optional[Callable] = None, digits: int = 16,
                     pieces: int = 16) -> float:
    """``int_0^X f(x) w(x) dx`` with ``X`` from the tail cut.

    ``f`` receives mpmath numbers.  The interval is split into ``pieces``
    equal panels, each integrated by mpmath's adaptive tanh-sinh rule,
    which also handles the ``x^alpha`` endpoint factor.
    """
    require_integrable(w)
    X = truncation_point(w, digits)
    with mpmath.workdps(digits + 5):
        a = mpmath.mpf(w.alpha)

        def g(x):
            v = x ** a * mpmath.exp(-_q_mp(w, x))
            return v if f is None else v * f(x)

        pts = mpmath.linspace(0, X, pieces + 1)
        return float(mpmath.quad(g, pts))
