"""Evaluation of the orthonormal polynomials ``p_n(beta_n z)``.

The complex plane is split into four regions around the rescaled support
[0, 1]: the lens (bulk of the interval), the two endpoint disks and the
outer region.  Each has its own closed-form expression in terms of the
phase functions, Airy/Bessel functions and the correction matrix ``R``.

Values are returned as :class:`ScaledValue` so that the huge factors
``beta_n^n``, ``gamma_n`` and ``exp(n (V_n + l_n)/2)`` never have to be
formed in floating point.  Points on the real axis are evaluated as limits
from the upper half plane; points below the axis use ``p(conj z) = conj p(z)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import specfun
from .auxfun import (PhaseContext, airy_arg_upper, lam, make_context,
                     phibar_series, sqrt_zm1, upper, xi_upper)
from .errors import NegativeRadicand, RegionMismatch, WrongKind
from .rseries import UTableau, cached_u, r_disk, r_outer
from .weight import WeightSpec, polynomial

_LOG2 = math.log(2.0)


class Region(enum.Enum):
    LENS = "lens"
    OUTER = "outer"
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class Regions:
    """Region geometry in the rescaled variable ``z = x / beta_n``."""

    r_left: float = 0.3
    r_right: float = 0.3
    lens_halfwidth: float = 0.1

    def __post_init__(self):
        if not (0 < self.r_left < 0.5 and 0 < self.r_right < 0.5):
            raise ValueError("disk radii must lie in (0, 0.5)")
        if self.lens_halfwidth <= 0:
            raise ValueError("lens half-width must be positive")


DEFAULT_REGIONS = Regions()


def classify(z, regions: Regions = DEFAULT_REGIONS) -> Region:
    """Region containing ``z``; disks take precedence over the lens."""
    z = complex(z)
    if abs(z) < regions.r_left:
        return Region.LEFT
    if abs(z - 1) < regions.r_right:
        return Region.RIGHT
    if regions.r_left < z.real < 1 - regions.r_right and abs(z.imag) < regions.lens_halfwidth:
        return Region.LENS
    return Region.OUTER


def classify_array(z, regions: Regions = DEFAULT_REGIONS) -> np.ndarray:
    """Vectorized :func:`classify` returning the region value strings."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, Region.OUTER.value, dtype=object)
    lens = ((z.real > regions.r_left) & (z.real < 1 - regions.r_right)
            & (np.abs(z.imag) < regions.lens_halfwidth))
    out[lens] = Region.LENS.value
    out[np.abs(z - 1) < regions.r_right] = Region.RIGHT.value
    out[np.abs(z) < regions.r_left] = Region.LEFT.value
    return out


@dataclass(frozen=True)
class ScaledValue:
    """``mantissa * exp(log_scale)``, renormalized so that ``|mantissa| = 1``."""

    mantissa: complex
    log_scale: float

    def __post_init__(self):
        m = complex(self.mantissa)
        ls = float(self.log_scale)
        a = abs(m)
        if a != 0 and math.isfinite(a):
            m /= a
            ls += math.log(a)
        elif a == 0:
            ls = 0.0
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "log_scale", ls)

    def value(self) -> complex:
        if self.mantissa == 0:
            return 0j
        return self.mantissa * math.exp(self.log_scale)

    @property
    def real(self) -> float:
        return float(self.value().real)

    def log_abs(self) -> float:
        return -math.inf if self.mantissa == 0 else self.log_scale

    def __mul__(self, other):
        if isinstance(other, ScaledValue):
            return ScaledValue(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
        return ScaledValue(self.mantissa * other, self.log_scale)

    __rmul__ = __mul__

    def rel_diff(self, other) -> float:
        """``|self - other| / |other|`` computed without overflow."""
        if not isinstance(other, ScaledValue):
            other = ScaledValue(complex(other), 0.0)
        if other.mantissa == 0:
            return math.inf if self.mantissa != 0 else 0.0
        d = self.log_scale - other.log_scale
        return abs(self.mantissa * math.exp(d) - other.mantissa) if d < 700 else math.inf

    def to_json(self) -> dict:
        return {"value_mantissa": [self.mantissa.real, self.mantissa.imag],
                "log_scale": self.log_scale}


# ---------------------------------------------------------------------------
# gamma_n and recurrence coefficients
# ---------------------------------------------------------------------------

def _u_sums(tabs: UTableau, n: float, T: Optional[int]):
    """Weighted sums over powers: ``S1 = sum eps^p (U^right + U^left)_{p,1}``,
    the (1,2) entries of ``U^left_{p,2}``, ``U^right_{p,2}`` and ``U^right_{p,1}``."""
    pc = tabs.order_count(T)
    eps = tabs.expansion_variable(n)
    w = eps ** np.arange(1, pc + 1)
    UR, UL = tabs.U["right"][1:pc + 1], tabs.U["left"][1:pc + 1]
    S1 = np.einsum("p,pab->ab", w, UR[:, 1] + UL[:, 1])
    SR1 = np.einsum("p,p->", w, UR[:, 1, 0, 1])
    SL2 = np.einsum("p,p->", w, UL[:, 2, 0, 1]) if UL.shape[1] > 2 else 0.0
    SR2 = np.einsum("p,p->", w, UR[:, 2, 0, 1]) if UR.shape[1] > 2 else 0.0
    return S1, SL2, SR2, SR1


def _gamma_reduced(ctx: PhaseContext, tabs: UTableau, T: Optional[int]) -> float:
    """``log gamma_n + n log beta_n + n l_n / 2``, free of O(n) terms."""
    a, n = ctx.alpha, ctx.n
    S1 = _u_sums(tabs, n, T)[0]
    rad = 1 - 4j * 4.0 ** a * S1[0, 1]
    if rad.real <= 0:
        raise NegativeRadicand(f"gamma_n radicand {rad.real:.3e} <= 0 at T={T}", terms=T)
    return float((-a / 2 - 0.5) * math.log(ctx.beta) + 0.5 * math.log(2 / math.pi)
                 + a * _LOG2 - 0.5 * math.log(rad.real))


def gamma_n_log(ctx: PhaseContext, tabs: UTableau, T: Optional[int] = None) -> Tuple[float, int]:
    """``(log gamma_n, sign)`` for the leading coefficient of ``p_n``."""
    red = _gamma_reduced(ctx, tabs, T)
    return red - ctx.n * math.log(ctx.beta) - ctx.n * ctx.field.ln / 2, 1


def recurrence_coeffs(ctx: PhaseContext, tabs: UTableau, T: Optional[int] = None) -> Tuple[float, float]:
    """``(a_n, b_{n-1})`` of the three-term recurrence ``b_n p_{n+1} = (x - a_n) p_n - b_{n-1} p_{n-1}``."""
    a, n, beta = ctx.alpha, ctx.n, ctx.beta
    S1, SL2, SR2, SR1 = _u_sums(tabs, n, T)
    q = 4.0 ** (-a - 1) * 1j
    num = (4.0 ** (-a) * 1j * (a + 2) / 16 + SL2 + SR2 + SR1
           + S1[0, 0] * q + S1[0, 1] * a / 4)
    an = beta * (-a / 4 + S1[0, 0] + num / (q + S1[0, 1]))
    rad = 1 + 4j * (S1[1, 0] * 4.0 ** (-a) - 4.0 ** a * S1[0, 1]) + 16 * S1[1, 0] * S1[0, 1]
    if rad.real <= 0:
        raise NegativeRadicand(f"b_(n-1) radicand {rad.real:.3e} <= 0 at T={T}", terms=T)
    return float(an.real), float(beta / 4 * math.sqrt(rad.real))


# ---------------------------------------------------------------------------
# region formulas (vectorized, upper half plane)
# ---------------------------------------------------------------------------

def _common_log(ctx: PhaseContext, zu, lgam):
    """``log(beta^n gamma_n) + n (V_n(z) + l_n)/2`` (complex).

    ``lgam`` is the reduced constant from :func:`_gamma_reduced`, so the
    O(n) parts of ``log gamma_n`` and ``n log beta_n`` never meet in
    floating point.
    """
    return lgam + ctx.n * ctx.V(zu) / 2


def _first_row(R):
    return R[:, 0, 0], R[:, 0, 1]


def _cos_scaled(Y):
    """``cos(Y) * exp(-|Im Y|)``."""
    s = np.abs(np.imag(Y))
    return 0.5 * (np.exp(1j * Y - s) + np.exp(-1j * Y - s))


def _lens(ctx, tabs, zu, T, lgam):
    a, n = ctx.alpha, ctx.n
    A = -2j * lam(zu)
    X = -1j * n * xi_upper(ctx, zu)
    Y1 = A * (1 + a) / 2 + X - math.pi / 4
    Y2 = A * (a - 1) / 2 + X - math.pi / 4
    s = np.maximum(np.abs(Y1.imag), np.abs(Y2.imag))
    c1 = _cos_scaled(Y1) * np.exp(np.abs(Y1.imag) - s)
    c2 = _cos_scaled(Y2) * np.exp(np.abs(Y2.imag) - s)
    R11, R12 = _first_row(r_outer(tabs, zu, n, T))
    body = R11 * 2.0 ** (-a) * c1 + R12 * (-1j) * 2.0 ** a * c2
    logpre = _common_log(ctx, zu, lgam) - 0.25 * np.log(zu) - 0.25 * np.log(1 - zu) \
        - a / 2 * np.log(zu)
    return body, logpre + s


def _outer(ctx, tabs, zu, T, lgam):
    a, n = ctx.alpha, ctx.n
    lm = lam(zu)
    u = np.exp(lm)
    R11, R12 = _first_row(r_outer(tabs, zu, n, T))
    body = R11 * 2.0 ** (-a) * u + R12 * (-1j) * 2.0 ** a / u
    t = sqrt_zm1(zu)
    logpre = (lgam + n * (ctx.V(zu) / 2 + xi_upper(ctx, zu))
              + a * lm - _LOG2 - 0.25 * np.log(zu) - 0.5 * np.log(t) - a / 2 * np.log(zu))
    return body, logpre


def _right(ctx, tabs, zu, T, lgam):
    a, n = ctx.alpha, ctx.n
    zu = np.where(np.abs(zu - 1) < 1e-15, 1 + 1e-15 + 0j, zu)
    A = -2j * lam(zu)
    f = airy_arg_upper(ctx, zu)
    ai, aip, zeta = specfun.airy_scaled(f)
    f4 = f ** 0.25
    Aif = ai * f4
    Aipf = aip / f4
    R11, R12 = _first_row(r_disk(tabs, "right", zu, n, T))
    v1 = 2.0 ** (-a) * (np.cos((a + 1) * A / 2) * Aif - 1j * np.sin((a + 1) * A / 2) * Aipf)
    v2 = 2.0 ** a * (-1j * np.cos((a - 1) * A / 2) * Aif - np.sin((a - 1) * A / 2) * Aipf)
    body = R11 * v1 + R12 * v2
    t = sqrt_zm1(zu)
    logpre = (_common_log(ctx, zu, lgam) - a / 2 * np.log(zu) + 0.5 * math.log(math.pi)
              - 0.25 * np.log(zu) - 0.5 * np.log(t) - zeta)
    return body, logpre


def _left(ctx, tabs, zu, T, lgam):
    a, n = ctx.alpha, ctx.n
    zu = np.where(np.abs(zu) < 1e-20, 1e-20 + 0j, zu)
    A = -2j * lam(zu)
    small = np.abs(zu) < 0.02
    pb = np.empty(zu.shape, dtype=complex)
    if np.any(small):
        pb[small] = phibar_series(ctx, zu[small])
    if np.any(~small):
        pb[~small] = xi_upper(ctx, zu[~small]) / 2 - 0.5j * math.pi
    x = 2j * n * pb
    J, Jp = specfun.bessel_j_scaled(a, x)
    a1 = (a + 1) * A / 2 - math.pi * a / 2
    a2 = (a - 1) * A / 2 - math.pi * a / 2
    R11, R12 = _first_row(r_disk(tabs, "left", zu, n, T))
    v1 = 2.0 ** (-a) * (np.sin(a1) * J + np.cos(a1) * Jp)
    v2 = -1j * 2.0 ** a * (np.sin(a2) * J + np.cos(a2) * Jp)
    body = R11 * v1 + R12 * v2
    if int(n) % 2:
        body = -body
    logpre = (_common_log(ctx, zu, lgam) + 0.5 * np.log(1j * n * math.pi * pb)
              - 0.25 * np.log(zu) - 0.25 * np.log(1 - zu) - a / 2 * np.log(zu) + np.abs(x.imag))
    return body, logpre


_FORMULAS = {Region.LENS: _lens, Region.OUTER: _outer, Region.RIGHT: _right, Region.LEFT: _left}


def eval_array(ctx: PhaseContext, tabs: UTableau, z, T: Optional[int] = None,
               regions: Regions = DEFAULT_REGIONS, region: Optional[Region] = None,
               normalization: str = "orthonormal"):
    """Vectorized evaluation: returns ``(mantissa, log_scale)`` arrays, value = m * exp(log_scale)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zu, fl = upper(z)
    if normalization not in ("orthonormal", "monic"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if normalization == "orthonormal":
        lgam = _gamma_reduced(ctx, tabs, T)
    else:
        lgam = ctx.n * math.log(ctx.beta) + ctx.n * ctx.field.ln / 2
    mant = np.empty(z.shape, dtype=complex)
    logs = np.empty(z.shape, dtype=float)
    if region is None:
        labels = classify_array(zu, regions)
    else:
        labels = np.full(z.shape, Region(region).value, dtype=object)
    for reg, fn in _FORMULAS.items():
        mask = labels == reg.value
        if not np.any(mask):
            continue
        body, lp = fn(ctx, tabs, zu[mask], T, lgam)
        mant[mask] = body * np.exp(1j * np.imag(lp))
        logs[mask] = np.real(lp)
    # renormalize mantissas to unit modulus where possible
    am = np.abs(mant)
    ok = (am > 0) & np.isfinite(am)
    logs[ok] += np.log(am[ok])
    mant[ok] /= am[ok]
    mant = np.where(fl, np.conj(mant), mant)
    return mant, logs


def _single(region: Region):
    def f(ctx: PhaseContext, tabs: UTableau, z, T: Optional[int] = None,
          regions: Regions = DEFAULT_REGIONS, strict: bool = True) -> ScaledValue:
        if strict and classify(z, regions) is not region:
            raise RegionMismatch(f"z={z} is not in the {region.value} region")
        m, l = eval_array(ctx, tabs, z, T, regions, region)
        return ScaledValue(complex(m[0]), float(l[0]))
    f.__name__ = f"eval_{region.value}"
    return f


eval_lens = _single(Region.LENS)
eval_lens.__doc__ = "Bulk expansion: oscillatory cosines times ``R^O``."
eval_outer = _single(Region.OUTER)
eval_outer.__doc__ = "Exterior expansion with the exponential ``exp(n xi_n)`` growth."
eval_right = _single(Region.RIGHT)
eval_right.__doc__ = "Soft-edge expansion with Airy functions of ``f_n(z)``."
eval_left = _single(Region.LEFT)
eval_left.__doc__ = "Hard-edge expansion with Bessel functions of ``2 i n phibar_n(z)``."


# ---------------------------------------------------------------------------
# convenience layer
# ---------------------------------------------------------------------------

class Evaluator:
    """Bundle of phase context and tableaux for one weight and degree."""

    def __init__(self, w: WeightSpec, n: int, K: int = 8, regime: str = "fixed",
                 regions: Regions = DEFAULT_REGIONS, tabs: Optional[UTableau] = None):
        self.weight = w
        self.n = int(n)
        self.regions = regions
        self.ctx = make_context(w, n)
        self.tabs = tabs if tabs is not None else cached_u(w, n, regime, K)

    @property
    def beta(self) -> float:
        return self.ctx.beta

    def at_z(self, z, T: Optional[int] = None, normalization: str = "orthonormal"):
        m, l = eval_array(self.ctx, self.tabs, z, T, self.regions, normalization=normalization)
        if np.ndim(z) == 0:
            return ScaledValue(complex(m[0]), float(l[0]))
        return m, l

    def at_x(self, x, T: Optional[int] = None, normalization: str = "orthonormal"):
        return self.at_z(np.asarray(x) / self.beta, T, normalization)

    def gamma_log(self, T: Optional[int] = None) -> float:
        return gamma_n_log(self.ctx, self.tabs, T)[0]

    def recurrence(self, T: Optional[int] = None):
        return recurrence_coeffs(self.ctx, self.tabs, T)


def evaluate(w: WeightSpec, n: int, x, T: Optional[int] = None, K: int = 8) -> ScaledValue:
    """``p_n(x)`` for the weight ``w``."""
    return Evaluator(w, n, K=max(K, T or 0)).at_x(x, T)


def hermite_eval(n_h: int, x: float, T: Optional[int] = None, coeffs=(0.0, 1.0),
                 K: int = 8) -> ScaledValue:
    """Orthonormal Hermite-type polynomial for ``exp(-sum_k q_k x^{2k})``.

    Degree ``2n`` maps to the Laguerre-type weight with ``alpha = -1/2`` and
    ``Q(y) = sum q_k y^k`` at ``y = x^2``; degree ``2n+1`` is ``x`` times the
    ``alpha = 1/2`` partner.
    """
    odd = n_h % 2
    n = n_h // 2
    w = polynomial(0.5 if odd else -0.5, coeffs)
    if n == 0:
        from .oracle import oracle_p
        val = oracle_p(w, 0, x * x)
        return ScaledValue(val * (x if odd else 1.0), 0.0)
    v = Evaluator(w, n, K=max(K, T or 0)).at_x(x * x, T)
    return v * x if odd else v


def deriv_pn(w: WeightSpec, n: int, x, T: Optional[int] = None, K: int = 8,
             evaluator_plus1: Optional[Evaluator] = None):
    """``d/dx p_n(x) = sqrt(n) p_{n-1}^{(alpha+1)}(x)`` for the weight ``x^alpha e^{-x + q0}``."""
    if not (w.is_classical_type and w.coeffs[1] == 1.0):
        raise WrongKind("derivative identity needs Q(x) = x + q0")
    if n == 0:
        return ScaledValue(0j, 0.0)
    if n == 1:
        from .oracle import oracle_p
        from .weight import classical
        val = oracle_p(classical(w.alpha + 1, w.q0), 0, 0.0)
        return ScaledValue(val, 0.0) if np.ndim(x) == 0 else (np.full(np.shape(x), val + 0j),
                                                                np.zeros(np.shape(x)))
    ev = evaluator_plus1
    if ev is None:
        from .weight import classical
        ev = Evaluator(classical(w.alpha + 1, w.q0), n - 1, K=max(K, T or 0))
    res = ev.at_x(x, T)
    if isinstance(res, ScaledValue):
        return res * math.sqrt(n)
    m, l = res
    return m, l + 0.5 * math.log(n)
