"""Gauss quadrature rules for Laguerre-type weights from the asymptotic expansions.

Nodes are found by Newton's method on ``sqrt(w(x)) p_n(x)``, seeded from the
leading-order zero conditions: Bessel zeros near the hard edge, Airy zeros
near the soft edge and the equidistributed phase of the bulk expansion in
between.  Each node costs a fixed number of evaluations, independent of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as _sp

from .auxfun import PhaseContext, lam, upper, xi_upper
from .errors import NewtonDivergence, NodeCollision
from .evaluate import Evaluator
from .oracle import classical_coeffs, integrate_weight, oracle_table
from .specfun import airy_zeros, bessel_zeros_mcmahon
from .weight import WeightSpec, classical, require_integrable

MIN_ASYMPTOTIC_N = 8
NEWTON_TOL = 1e-14
MAX_NEWTON = 10


@dataclass(frozen=True)
class QuadRule:
    """``sum_k weights[k] f(nodes[k])`` approximates ``int_0^inf f(x) w(x) dx``.

    ``log_weights`` keeps the weights that underflow in double precision.
    """

    nodes: np.ndarray
    weights: np.ndarray
    n: int
    alpha: float
    weight: WeightSpec
    T: Optional[int]
    mu0: float
    log_weights: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f) -> float:
        return float(np.sum(self.weights * f(self.nodes)))


def weight_mass(w: WeightSpec) -> float:
    """``mu_0 = int_0^inf w``."""
    require_integrable(w)
    if w.is_classical_type:
        q1 = w.coeffs[1]
        return math.exp(math.lgamma(w.alpha + 1) - (w.alpha + 1) * math.log(q1) - w.q0)
    return integrate_weight(w)


# ---------------------------------------------------------------------------
# rules straight from recurrence coefficients
# ---------------------------------------------------------------------------

def _sign_changes(a, b, x):
    """Number of zeros of ``p_n`` above ``x`` (Sturm count via ratios)."""
    n = len(a)
    r = (x - a[0]) / b[0]
    count = (r < 0).astype(int)
    for k in range(1, n):
        r = np.where(r == 0, 1e-300, r)
        r = ((x - a[k]) - b[k - 1] / r) / b[k]
        count += r < 0
    return count


def _recurrence_values(a, b, mu0, x):
    """``p_{n-1}, p_n, p_n'`` at ``x`` with a common log scale (returned last)."""
    n = len(a)
    x = np.asarray(x, dtype=float)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1 / math.sqrt(mu0))
    d_prev = np.zeros_like(x)
    d = np.zeros_like(x)
    logs = np.zeros_like(x)
    for k in range(n):
        bp = b[k - 1] if k else 0.0
        p_new = ((x - a[k]) * p - bp * p_prev) / b[k]
        d_new = ((x - a[k]) * d + p - bp * d_prev) / b[k]
        p_prev, p, d_prev, d = p, p_new, d, d_new
        big = np.maximum(np.abs(p), np.abs(d))
        fix = big > 1e100
        if np.any(fix):
            s = np.where(fix, big, 1.0)
            p, p_prev, d, d_prev = p / s, p_prev / s, d / s, d_prev / s
            logs = logs + np.log(s)
    return p_prev, p, d, logs


def recurrence_rule(a, b, mu0: float, iters: int = 80):
    """Nodes and weights of the ``n = len(a)`` point rule from recurrence data.

    Each zero is isolated by Sturm-count bisection, then polished by Newton
    on the recurrence values; the weight is ``1 / (b_{n-1} p_n' p_{n-1})``.
    Cost is O(n^2); this is the reference path, not the fast one.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    bb = np.concatenate([[0.0], b[:n - 1]])
    lo = np.full(n, float(np.min(a - bb - b[:n])))
    hi = np.full(n, float(np.max(a + bb + b[:n])))
    idx = np.arange(1, n + 1)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = n - _sign_changes(a, b, mid)
        go_up = below < idx
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
        if np.all(hi - lo <= 1e-15 * np.maximum(np.abs(hi), 1e-300)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(3):
        _, p, d, _ = _recurrence_values(a, b, mu0, x)
        x = x - p / d
    pm, p, d, logs = _recurrence_values(a, b, mu0, x)
    lw = -2 * logs - np.log(b[n - 1] * d * pm)
    return x, lw


def oracle_rule(w: WeightSpec, n: int) -> QuadRule:
    """Reference rule from exact (classical) or 32-digit Stieltjes coefficients."""
    if w.is_classical_type and w.coeffs[1] == 1.0:
        a, b = classical_coeffs(w.alpha, n)
        mu0 = weight_mass(w)
    else:
        tbl = oracle_table(w, n)
        a, b = tbl.a[:n], tbl.b[:n]
        mu0 = tbl.mu0
    x, lw = recurrence_rule(a, b, mu0)
    return QuadRule(x, np.exp(lw), n, w.alpha, w, None, mu0, lw)


# ---------------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------------

def _bulk_phase(ctx: PhaseContext, z):
    """Leading-order bulk phase ``Y(z)``; the zeros satisfy ``cos Y = 0``."""
    zu, _ = upper(np.asarray(z, dtype=float) + 0j)
    A = np.real(-2j * lam(zu))
    X = np.real(-1j * ctx.n * xi_upper(ctx, zu))
    return (1 + ctx.alpha) * A / 2 + X - math.pi / 4


def _invert(fun, targets, s, zmap, refine: int = 3):
    """Solve ``fun(zmap(s)) = target`` for a monotone function.

    ``s`` is an increasing parameter grid in which ``fun`` is close to
    linear; the solution is interpolated in ``s`` and refined by
    secant-type steps with the grid slope.  Returns ``z``.
    """
    v = fun(zmap(s))
    order = np.argsort(v)
    t = np.interp(targets, v[order], s[order])
    slope_grid = np.gradient(v, s)
    for _ in range(refine):
        slope = np.interp(t, s, slope_grid)
        t = np.clip(t - (fun(zmap(t)) - targets) / slope, s[0], s[-1])
    return zmap(t)


def bessel_zeros(nu: float, k: int) -> np.ndarray:
    """First ``k`` positive zeros of ``J_nu``: McMahon guesses polished by Newton."""
    j = bessel_zeros_mcmahon(nu, np.arange(1, k + 1))
    for _ in range(6):
        j = j - _sp.jv(nu, j) / _sp.jvp(nu, j)
    return j


def seeds(ctx: PhaseContext, n: int) -> np.ndarray:
    """Leading-order approximations of all ``n`` zeros, in ``z = x / beta_n``.

    Every zero solves ``Y(z) = target`` for the bulk phase ``Y``.  In the bulk
    the targets are ``(k - 1/2) pi`` for the ``k``-th largest zero.  Near the
    edges they follow the uniform Bessel and Airy approximations: the
    phase counted from the hard edge equals ``j_{alpha,k}`` and
    ``Y + pi/4 = (2/3) |a_k|^{3/2}`` at the soft edge.  Both keep the
    ``alpha`` dependent part of the phase, which shifts the edge zeros by
    a fraction of the local spacing that decays only like ``n^{-1/3}``.
    """
    a = ctx.alpha
    m = min(max(1, int(math.ceil(n ** (1 / 3)))), n // 3)
    y0 = (1 + a) * math.pi / 2 + n * math.pi - math.pi / 4
    tgt = (n + 0.5 - np.arange(1, n + 1)) * math.pi
    tgt[:m] = y0 - bessel_zeros(a, m)
    tgt[n - m:] = (2 / 3 * np.abs(airy_zeros(m)) ** 1.5 - math.pi / 4)[::-1]
    G = 4096 + int(20 * math.sqrt(n))
    th = np.linspace(0, math.pi, G + 2)[1:-1]
    # the smallest zeros sit at theta ~ 1/n, below the uniform grid
    th = np.concatenate([np.geomspace(0.01 / n, th[0], 64, endpoint=False), th])
    return _invert(lambda t: _bulk_phase(ctx, t), tgt, th, lambda u: (1 - np.cos(u)) / 2,
                   refine=4)


# ---------------------------------------------------------------------------
# Newton iterations
# ---------------------------------------------------------------------------

def _ratio(m1, l1, m2, l2):
    """Real part of ``(m1 e^{l1}) / (m2 e^{l2})``."""
    return np.real(m1 / m2 * np.exp(l1 - l2))


def _check_nodes(x, x0, spacing):
    bad = ~np.isfinite(x) | (np.abs(x - x0) > 0.5 * spacing)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise NewtonDivergence(f"Newton left the basin of node {k} (seed {x0[k]:.6g})",
                               index=k, seed=float(x0[k]))
    gaps = np.diff(x)
    if np.any(gaps <= 1e-13 * np.abs(x[1:])):
        k = int(np.argmin(gaps / np.abs(x[1:])))
        raise NodeCollision(f"nodes {k} and {k + 1} coincide; increase the number of terms")


def _newton_laguerre(w: WeightSpec, n: int, x0, T, K):
    """Newton for ``Q = x + q0`` using ``p_n' = sqrt(n) p_{n-1}^{(alpha+1)}``.

    The second derivative follows from the Laguerre equation
    ``x p'' + (alpha + 1 - x) p' + n p = 0``, which gives an a-posteriori
    estimate of the error left after each step, so a node stops as soon as
    that estimate is below tolerance.  Returns the nodes and ``log |p_n'|``
    at the nodes.
    """
    a = w.alpha
    ev = Evaluator(w, n, K=K)
    evd = Evaluator(classical(a + 1, w.q0), n - 1, K=K)
    x = np.array(x0, dtype=float)
    logd = np.zeros(n)
    active = np.ones(n, dtype=bool)
    for _ in range(MAX_NEWTON):
        xa = x[active]
        m, l = ev.at_x(xa, T)
        md, ld = evd.at_x(xa, T)
        ld = ld + 0.5 * math.log(n)
        r = _ratio(m, l, md, ld)                      # p / p'
        c = a / (2 * xa) - 0.5                        # (log sqrt w)'
        step = r / (1 + r * c)
        pp2 = -((a + 1 - xa) + n * r) / xa           # p'' / p'
        curv = pp2 + 2 * c                            # f'' / f' at the root
        xn = xa - step
        err = 0.5 * np.abs(curv) * step ** 2
        # p'(x_new) = p'(x) (1 - pp2 * step) to second order
        logd[active] = ld + np.log(np.abs(np.real(md) * (1 - pp2 * step)))
        x[active] = xn
        done = (err <= NEWTON_TOL * np.abs(xn)) | (np.abs(step) <= NEWTON_TOL * np.abs(xn))
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not np.any(active):
            return x, logd
    k = int(np.flatnonzero(active)[0])
    raise NewtonDivergence(f"node {k} did not converge in {MAX_NEWTON} steps", index=k,
                           seed=float(x0[k]))


def _scaled_combo(vals, coeffs):
    """``sum c_j v_j`` for scaled values ``v_j = (m_j, l_j)`` sharing a rough scale."""
    l0 = np.max([v[1] for v in vals], axis=0)
    tot = sum(c * np.real(v[0] * np.exp(v[1] - l0)) for c, v in zip(coeffs, vals))
    return tot, l0


def _newton_general(w: WeightSpec, n: int, x0, spacing, T, K):
    """Newton with a five-point difference derivative (any weight)."""
    ev = Evaluator(w, n, K=K)
    x = np.array(x0, dtype=float)
    active = np.ones(n, dtype=bool)
    for it in range(MAX_NEWTON + 1):
        xa = x[active]
        h = 1e-3 * spacing[active]
        vals = [ev.at_x(xa + j * h, T) for j in (-2, -1, 1, 2)]
        d, ld = _scaled_combo(vals, (1 / 12, -2 / 3, 2 / 3, -1 / 12))
        m, l = ev.at_x(xa, T)
        r = np.real(m) * np.exp(l - ld) / (d / h)
        c = w.alpha / (2 * xa) - 0.5 * np.real(w.dQ(xa))
        step = r / (1 + r * c)
        if it == MAX_NEWTON:
            break
        x[active] = xa - step
        done = np.abs(step) <= NEWTON_TOL * np.abs(xa)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not np.any(active):
            break
    if np.any(active):
        k = int(np.flatnonzero(active)[0])
        raise NewtonDivergence(f"node {k} did not converge in {MAX_NEWTON} steps", index=k,
                               seed=float(x0[k]))
    h = 1e-3 * spacing
    vals = [ev.at_x(x + j * h, T) for j in (-2, -1, 1, 2)]
    d, ld = _scaled_combo(vals, (1 / 12, -2 / 3, 2 / 3, -1 / 12))
    d = d / h
    mm, lm = Evaluator(w, n - 1, K=K).at_x(x, T)
    b = ev.recurrence(T)[1]
    lw = -(math.log(b) + ld + lm + np.log(np.abs(d * np.real(mm))))
    if np.any(d * np.real(mm) <= 0):
        raise NewtonDivergence("non-positive weight: p_n' p_{n-1} changed sign")
    return x, lw


def gauss_rule(w: WeightSpec, n: int, T: Optional[int] = None, K: int = 8) -> QuadRule:
    """``n``-point Gauss rule for ``w`` from the asymptotic expansions.

    ``T`` counts expansion terms (``None`` uses all ``K + 1`` stored).
    Degrees below 8 use the recurrence reference path.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    require_integrable(w)
    if n < MIN_ASYMPTOTIC_N:
        return oracle_rule(w, n)
    ev = Evaluator(w, n, K=K)
    z0 = seeds(ev.ctx, n)
    x0 = ev.beta * z0
    spacing = np.gradient(x0)
    if w.is_classical_type and w.coeffs[1] == 1.0:
        x, logd = _newton_laguerre(w, n, x0, T, K)
        # x p_n' = n p_n + b_{n-1} p_{n-1} turns 1/(b p_n' p_{n-1}) into 1/(x p_n'^2)
        lw = -np.log(x) - 2 * logd
    else:
        x, lw = _newton_general(w, n, x0, spacing, T, K)
    _check_nodes(x, x0, spacing)
    return QuadRule(x, np.exp(lw), n, w.alpha, w, T, weight_mass(w), lw)


def check_rule(rule: QuadRule, max_poly_degree: int = 20) -> dict:
    """Moment residuals ``|sum w_k x_k^j - int x^j w| / int x^j w`` and positivity."""
    w = rule.weight
    deg = min(max_poly_degree, 2 * rule.n - 1)
    lw = rule.log_weights if rule.log_weights is not None else np.log(rule.weights)
    lx = np.log(rule.nodes)
    res = []
    for j in range(deg + 1):
        if w.is_classical_type:
            q1 = w.coeffs[1]
            exact_log = math.lgamma(j + w.alpha + 1) - (j + w.alpha + 1) * math.log(q1) - w.q0
        else:
            exact_log = math.log(integrate_weight(w, lambda t, j=j: t ** j))
        approx = np.sum(np.exp(lw + j * lx - exact_log))
        res.append(abs(approx - 1.0))
    return {"degree": deg, "residuals": res, "max_residual": max(res),
            "positive": bool(np.all(np.isfinite(lw))),
            "increasing": bool(np.all(np.diff(rule.nodes) > 0)),
            "mass_error": abs(float(np.sum(rule.weights)) - rule.mu0) / rule.mu0}
