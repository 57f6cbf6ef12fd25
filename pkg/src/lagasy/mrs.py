"""MRS numbers beta_n and the field data (H_n, l_n, Taylor data of h_n) derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .constants import a_k
from .errors import ContourPole, NoBracket, QuadratureStall, WrongKind
from .specfun import lambert_w0
from .weight import WeightSpec


# ---------------------------------------------------------------------------
# fractional-power expansion for polynomial fields
# ---------------------------------------------------------------------------

def _series_mul(a, b, n):
    out = np.zeros(n)
    for i in range(min(len(a), n)):
        if a[i] != 0:
            j = min(len(b), n - i)
            out[i:i + j] += a[i] * b[:j]
    return out


@dataclass(frozen=True)
class MrsExpansion:
    """``beta_n ~ n^{1/m} sum_k beta^{1,k} n^{-k/m}``."""

    m: int
    coeffs: tuple
    K: int

    def evaluate(self, n: float) -> float:
        eps = float(n) ** (-1.0 / self.m)
        return float(n) ** (1.0 / self.m) * float(np.polynomial.polynomial.polyval(eps, self.coeffs))

    def power_table(self) -> np.ndarray:
        """Array ``P[k, l] = beta^{k,l}`` for 0 <= k <= m (row 0 is the unit series)."""
        L = self.K + 1
        b = np.asarray(self.coeffs, dtype=float)
        P = np.zeros((self.m + 1, L))
        P[0, 0] = 1.0
        for k in range(1, self.m + 1):
            P[k] = _series_mul(P[k - 1], b, L)
        return P


def _require_poly(w: WeightSpec):
    if not w.is_polynomial:
        raise WrongKind("operation requires a polynomial field")


def mrs_monomial(w: WeightSpec, n: float) -> float:
    """Closed form ``beta_n = n^{1/m} (m q_m A_m / 2)^{-1/m}`` for ``Q = q_m x^m + q_0``."""
    if not w.monomial_like:
        raise WrongKind("closed form requires a monomial field")
    m, qm = w.m, w.coeffs[-1]
    return float(n) ** (1.0 / m) * (m * qm * a_k(m) / 2.0) ** (-1.0 / m)


def mrs_poly_expansion(w: WeightSpec, K: Optional[int] = None) -> MrsExpansion:
    """Coefficients ``beta^{1,k}``, k = 0..K, for a polynomial field.

    With ``eps = n^{-1/m}`` and ``beta_n = n^{1/m} B(eps)`` the defining
    identity ``sum_k k q_k A_k beta_n^k = 2n`` becomes
    ``sum_k k q_k A_k eps^{m-k} B(eps)^k = 2`` and is solved order by order.
    """
    _require_poly(w)
    m, q = w.m, w.coeffs
    if K is None:
        K = 2 * m
    if K < 0:
        raise ValueError("K must be non-negative")
    L = K + 1
    qm = q[m]
    b = np.zeros(L)
    b[0] = (m * qm * a_k(m) / 2.0) ** (-1.0 / m)
    denom = m * m * qm * a_k(m) * b[0] ** (m - 1)
    for j in range(1, L):
        # residual at order j with b_j = 0
        res = 0.0
        pw = np.zeros(j + 1)
        pw[0] = 1.0
        bj = b[:j + 1]
        for k in range(1, m + 1):
            pw = _series_mul(pw, bj, j + 1)
            shift = m - k
            if shift <= j:
                res += k * q[k] * a_k(k) * pw[j - shift]
        b[j] = -res / denom
    return MrsExpansion(m, tuple(float(x) for x in b), K)


def mrs_quadratic_exact(w: WeightSpec, n: float) -> float:
    """Positive root ``(-q_1 + sqrt(q_1^2 + 24 q_2 n)) / (3 q_2)`` for degree-2 fields."""
    if not w.is_polynomial or w.m != 2:
        raise WrongKind("quadratic formula requires m = 2")
    q1, q2 = w.coeffs[1], w.coeffs[2]
    disc = q1 * q1 + 24 * q2 * n
    # cancellation-free form of the positive root
    if q1 >= 0:
        return 8 * n / (q1 + math.sqrt(disc))
    return (-q1 + math.sqrt(disc)) / (3 * q2)


def mrs_poly_root(w: WeightSpec, n: float) -> float:
    """Largest positive root of ``sum_k k q_k A_k beta^k = 2n`` (any polynomial field)."""
    _require_poly(w)
    if w.monomial_like:
        return mrs_monomial(w, n)
    if w.m == 2:
        return mrs_quadratic_exact(w, n)
    c = np.array([k * w.coeffs[k] * a_k(k) for k in range(w.m + 1)])
    c[0] = -2.0 * n
    roots = np.roots(c[::-1])
    cand = [r.real for r in roots if r.real > 0 and abs(r.imag) <= 1e-7 * abs(r)]
    if not cand:
        raise NoBracket("no positive root of the MRS identity")
    x = max(cand)
    # Newton polish in double precision
    dc = np.polynomial.polynomial.polyder(c)
    for _ in range(3):
        f = np.polynomial.polynomial.polyval(x, c)
        fp = np.polynomial.polynomial.polyval(x, dc)
        if fp == 0:
            break
        x -= f / fp
    return float(x)


def mrs_integral(w: WeightSpec, beta: float, npts: Optional[int] = None) -> float:
    """``int_0^beta Q'(x) sqrt(x/(beta-x)) dx`` via ``x = beta sin^2(theta)``."""
    def rule(k):
        t, wt = np.polynomial.legendre.leggauss(k)
        th = (t + 1) * (math.pi / 4)
        s2 = np.sin(th) ** 2
        vals = np.real(w.dQ(beta * s2)) * 2 * beta * s2
        return float(np.dot(wt, vals) * math.pi / 4), float(np.dot(wt, np.abs(vals)) * math.pi / 4)

    if npts is not None:
        return rule(npts)[0]
    prev, _ = rule(32)
    k = 32
    while k < 4096:
        k *= 2
        cur, mag = rule(k)
        if abs(cur - prev) <= 1e-14 * max(mag, 1e-300):
            return cur
        prev = cur
    raise QuadratureStall("MRS integral did not converge")


def mrs_numeric(w: WeightSpec, n: float, tol: float = 1e-13) -> float:
    """Solve ``int_0^beta Q'(x) sqrt(x/(beta-x)) dx = 2 pi n`` for beta."""
    target = 2 * math.pi * n
    b0 = w.Q_inverse(n + (w.q0 if w.is_polynomial else 0.0))
    if not (b0 > 0 and math.isfinite(b0)):
        b0 = 1.0
    lo, hi = b0 / 8, 8 * b0
    f = lambda b: mrs_integral(w, b) - target
    flo, fhi = f(lo), f(hi)
    if not (flo < 0 < fhi):
        raise NoBracket(f"MRS equation not bracketed on [{lo:g}, {hi:g}]")
    beta = optimize.brentq(f, lo, hi, xtol=1e-15 * hi, rtol=1e-15, maxiter=200)
    res = abs(f(beta))
    if res > max(tol, 1e-15) * target * 10:
        raise QuadratureStall(f"MRS residual {res:g} above tolerance")
    return float(beta)


def mrs_exp_asymptotic(n: float) -> float:
    """``W_0(8 pi n^2) / 2`` for the field ``Q = exp``."""
    return 0.5 * lambert_w0(8 * math.pi * n * n)


def exp_beta_residual(n: float, beta: float) -> float:
    """Residual of ``8n = 2 beta e^{beta/2} (I_0(beta/2) + I_1(beta/2))``."""
    from scipy.special import i0, i1
    return 2 * beta * math.exp(beta / 2) * (i0(beta / 2) + i1(beta / 2)) - 8 * n


def mrs_beta(w: WeightSpec, n: float, method: str = "auto") -> float:
    """Dispatch: closed form for monomials, exact root for polynomials, quadrature otherwise."""
    if method == "auto":
        method = "mono" if w.monomial_like else ("poly" if w.is_polynomial else "numeric")
    if method == "mono":
        return mrs_monomial(w, n)
    if method == "poly":
        return mrs_poly_root(w, n)
    if method == "numeric":
        return mrs_numeric(w, n)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# H_n, l_n and Taylor data of h_n
# ---------------------------------------------------------------------------

def hn_poly(w: WeightSpec, n: Optional[float] = None, beta_source=None) -> np.ndarray:
    """Coefficients (ascending) of ``H_n(z)``.

    Monomial fields give the n-independent ``(2/(m A_m)) sum_k A_{m-1-k} z^k``.
    Otherwise ``beta_source`` is either a number ``beta_n`` or a
    :class:`MrsExpansion` evaluated at ``n``.
    """
    _require_poly(w)
    m = w.m
    if w.monomial_like and beta_source is None:
        return np.array([2.0 / (m * a_k(m)) * a_k(m - 1 - k) for k in range(m)])
    if beta_source is None:
        beta = mrs_poly_root(w, n)
    elif isinstance(beta_source, MrsExpansion):
        beta = beta_source.evaluate(n)
    else:
        beta = float(beta_source)
    q = w.coeffs
    out = np.zeros(m)
    for k in range(m):
        out[k] = sum(q[j] * beta ** j * a_k(j - k - 1) for j in range(k + 1, m + 1)) / n
    return out


def h_poly(w: WeightSpec, n: float, beta: float) -> np.ndarray:
    """Coefficients of the equilibrium-density polynomial ``h_n`` for a polynomial field.

    ``h_n(z) = sum_k z^k sum_{j>k} j q_j beta^j A_{j-1-k} / n``; it differs from
    ``H_n`` by the factor ``j`` inside the sum and coincides with it only for
    linear Q.
    """
    _require_poly(w)
    m, q = w.m, w.coeffs
    out = np.zeros(m)
    for k in range(m):
        out[k] = sum(j * q[j] * beta ** j * a_k(j - k - 1) for j in range(k + 1, m + 1)) / n
    return out


def hn_eps_series(w: WeightSpec, L: int, exp: Optional[MrsExpansion] = None) -> np.ndarray:
    """``H_n`` coefficients as power series in ``eps = n^{-1/m}``: array ``(m, L)``.

    ``d_k(eps) = sum_{j>k} q_j A_{j-k-1} eps^{m-j} B(eps)^j``.
    """
    _require_poly(w)
    m, q = w.m, w.coeffs
    if exp is None or exp.K + 1 < L:
        exp = mrs_poly_expansion(w, max(L - 1, 2 * m))
    P = exp.power_table()[:, :L]
    out = np.zeros((m, L))
    for k in range(m):
        for j in range(k + 1, m + 1):
            shift = m - j
            if shift < L:
                out[k, shift:] += q[j] * a_k(j - k - 1) * P[j, :L - shift]
    return out


def h_eps_series(w: WeightSpec, L: int, exp: Optional[MrsExpansion] = None) -> np.ndarray:
    """Coefficients of ``h_n`` as power series in ``eps = n^{-1/m}``: array ``(m, L)``."""
    _require_poly(w)
    m, q = w.m, w.coeffs
    if exp is None or exp.K + 1 < L:
        exp = mrs_poly_expansion(w, max(L - 1, 2 * m))
    P = exp.power_table()[:, :L]
    out = np.zeros((m, L))
    for k in range(m):
        for j in range(k + 1, m + 1):
            shift = m - j
            if shift < L:
                out[k, shift:] += j * q[j] * a_k(j - k - 1) * P[j, :L - shift]
    return out


def ln_coeff(w: WeightSpec, n: float, beta: float) -> float:
    """The constant ``l_n``."""
    if w.monomial_like:
        return -2.0 / w.m - 4 * math.log(2) - w.q0 / n
    if w.is_polynomial:
        return -4 * math.log(2) - sum(w.coeffs[k] * beta ** k * a_k(k) for k in range(w.m + 1)) / n
    return ln_integral(w, n, beta)


def _hfun(w: WeightSpec, n: float, beta: float):
    def f(y):
        return np.sqrt(y) * beta * w.dQ(beta * y) / n / np.sqrt(y - 1)
    return f


def _contour(w, n, beta, radius, npts):
    th = 2 * math.pi * np.arange(npts) / npts
    e = np.exp(1j * th)
    y = 0.5 + radius * e
    with np.errstate(all="ignore"):
        fy = _hfun(w, n, beta)(y)
    if not np.all(np.isfinite(fy)):
        raise ContourPole("field derivative not finite on the contour")
    return y, fy * radius * e


def _contour_sum(w, n, beta, kernel, radius=1.0, tol=1e-13, shrink=True):
    """Periodic trapezoid rule for ``(1/2 pi i) oint f(y) kernel(y) dy`` with doubling.

    Convergence is judged per output column against the mean magnitude of
    the summands, which is the attainable roundoff level.
    """
    tries = 5 if shrink else 1
    r = radius
    last_err = None
    for _ in range(tries):
        try:
            prev = None
            npts = 32
            while npts <= 1 << 15:
                y, fw = _contour(w, n, beta, r, npts)
                terms = fw[:, None] * kernel(y)
                cur = np.mean(terms, axis=0)
                mag = np.mean(np.abs(terms), axis=0)
                if prev is not None and np.all(np.abs(cur - prev) <= tol * np.maximum(mag, 1e-300)):
                    return cur
                prev = cur
                npts *= 2
            raise QuadratureStall("contour rule did not converge")
        except ContourPole as exc:
            last_err = exc
            r = 0.5 + (r - 0.5) * 0.6
    raise last_err


def h_taylor(w: WeightSpec, n: float, beta: float, side: str, L: int,
             radius: float = 1.0) -> np.ndarray:
    """Taylor coefficients of ``h_n`` at 0 (``side='left'``, d_l) or at 1 (``'right'``, c_l).

    Uses a circle centred at 1/2 that encloses [0, 1]; for polynomial fields
    the result coincides with the coefficients of :func:`h_poly`.
    """
    a = 0.0 if side.lower().startswith("l") else 1.0
    ls = np.arange(L)
    kern = lambda y: 1.0 / (y[:, None] - a) ** (ls[None, :] + 1)
    out = _contour_sum(w, n, beta, kern, radius)
    return np.real(out)


def h_eval(w: WeightSpec, n: float, beta: float, z) -> np.ndarray:
    """``h_n(z)`` by the Cauchy integral over a circle enclosing [0, 1] and z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    radius = max(1.0, float(np.max(np.abs(z - 0.5))) + 0.5)
    kern = lambda y: 1.0 / (y[:, None] - z[None, :])
    return _contour_sum(w, n, beta, kern, radius)


def ln_integral(w: WeightSpec, n: float, beta: float) -> float:
    """``l_n = 2 int_0^1 log|1/2-y| sqrt(1-y)/(2 pi sqrt y) h_n(y) dy - Q(beta/2)/n``."""
    if w.is_polynomial:
        hc = h_poly(w, n, beta)
        h = lambda y: np.polynomial.polynomial.polyval(y, hc)
    else:
        h = lambda y: float(np.real(h_eval(w, n, beta, y)[0]))

    # y = sin^2(t) removes the endpoint singularities
    def g(t):
        return math.log(abs(math.cos(2 * t)) / 2) * math.cos(t) ** 2 * h(math.sin(t) ** 2) / math.pi

    i1, e1 = integrate.quad(g, 0, math.pi / 4, limit=200, epsabs=1e-14, epsrel=1e-13)
    i2, e2 = integrate.quad(g, math.pi / 4, math.pi / 2, limit=200, epsabs=1e-14, epsrel=1e-13)
    if max(e1, e2) > 1e-9:
        raise QuadratureStall("l_n integral did not converge")
    return 2 * (i1 + i2) - float(np.real(w.Q(beta / 2))) / n


def taylor_shift(coeffs, a: float) -> np.ndarray:
    """Coefficients of ``p(x + a)`` from those of ``p(x)`` (ascending)."""
    c = np.array(coeffs, dtype=float)
    n = len(c)
    out = np.zeros(n)
    from math import comb
    for k in range(n):
        out[k] = sum(c[j] * comb(j, k) * a ** (j - k) for j in range(k, n))
    return out


@dataclass(frozen=True)
class FieldData:
    """beta_n with H_n (polynomial fields), l_n and Taylor data of h_n at 0 (d) and 1 (c)."""

    n: float
    beta: float
    ln: float
    hn_poly: Optional[tuple]
    c: tuple
    d: tuple

    def H(self, z):
        if self.hn_poly is None:
            raise WrongKind("H_n only exists for polynomial fields")
        return np.polynomial.polynomial.polyval(z, self.hn_poly)


def field_data(w: WeightSpec, n: float, L: int = 40, beta: Optional[float] = None) -> FieldData:
    """Assemble :class:`FieldData` at degree ``n``."""
    if beta is None:
        beta = mrs_beta(w, n)
    if w.is_polynomial:
        hp = hn_poly(w, n, beta if not w.monomial_like else None)
        hh = h_poly(w, n, beta)
        d = np.zeros(L)
        d[:len(hh)] = hh[:L]
        c = np.zeros(L)
        sh = taylor_shift(hh, 1.0)
        c[:len(sh)] = sh[:L]
        ln = ln_coeff(w, n, beta)
        return FieldData(float(n), float(beta), float(ln), tuple(float(x) for x in hp),
                         tuple(c), tuple(d))
    d = h_taylor(w, n, beta, "left", L)
    c = h_taylor(w, n, beta, "right", L)
    ln = ln_integral(w, n, beta)
    return FieldData(float(n), float(beta), float(ln), None, tuple(c), tuple(d))
