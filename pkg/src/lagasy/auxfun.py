"""Phase functions, conformal map and global parametrix.

Internally every function is evaluated on the closed upper half plane, with
points on the real axis read as limits from above.  The key quantity is

    lam(z) = log(sqrt(z) + sqrt(z-1)),

in terms of which ``phi(z) = exp(2 lam)`` and ``arccos(2z-1) = -2i lam``.
Values in the lower half plane follow from conjugate symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import a_k, binom, nu_k, nu_k_ratio_form, poch_airy_bessel  # noqa: F401
from .errors import OnCut
from .mrs import FieldData, field_data, h_eval
from .weight import WeightSpec

SERIES_RADIUS = 0.02
_XI_TERMS = 24


def theta(z) -> int:
    """+1 when ``arg(z-1) > 0`` and -1 otherwise (principal argument)."""
    return 1 if np.angle(complex(z) - 1) > 0 else -1


def upper(z):
    """Map points to the closed upper half plane; returns ``(zu, flipped)``.

    Real points get an imaginary part of exactly +0.0.
    """
    z = np.asarray(z, dtype=complex)
    flipped = np.imag(z) < 0
    zu = np.array(np.where(flipped, np.conj(z), z), dtype=complex, ndmin=1)
    zu.imag = np.abs(zu.imag)
    return zu, np.atleast_1d(flipped)


def sqrt_zm1(zu):
    """``sqrt(z-1)`` continued from the upper half plane (``i sqrt(1-x)`` for real x < 1)."""
    w = zu - 1
    w = np.array(w, dtype=complex)
    w.imag = np.abs(np.imag(zu))
    return np.sqrt(w)


def lam(zu):
    """``log(sqrt z + sqrt(z-1))`` on the closed upper half plane.

    Near ``z = 1`` the equivalent ``arcsinh(sqrt(z-1))`` keeps full relative
    accuracy of the small result.
    """
    zu = np.asarray(zu, dtype=complex)
    t = sqrt_zm1(zu)
    near = np.abs(zu - 1) < 0.5
    return np.where(near, np.arcsinh(t), np.log(np.sqrt(zu) + t))


def _on_cut(z):
    z = np.asarray(z, dtype=complex)
    return np.any((np.abs(np.imag(z)) <= 1e-14) & (np.real(z) >= -1e-14) & (np.real(z) <= 1 + 1e-14))


def phi_conformal(z):
    """``phi(z) = 2z - 1 + 2 sqrt(z) sqrt(z-1)`` with principal roots (|phi| >= 1)."""
    if _on_cut(z):
        raise OnCut("phi is two-valued on [0, 1]")
    z = np.asarray(z, dtype=complex)
    out = 2 * z - 1 + 2 * np.sqrt(z) * np.sqrt(z - 1)
    return out if out.ndim else complex(out)


def p_inf(alpha: float, z) -> np.ndarray:
    """Global parametrix ``P^(inf)(z)`` as a 2x2 complex matrix (principal branches)."""
    if _on_cut(z):
        raise OnCut("global parametrix is not defined on [0, 1]")
    z = complex(z)
    ph = phi_conformal(z)
    sp = np.sqrt(ph)
    pre = 1.0 / (2 * z ** 0.25 * (z - 1) ** 0.25)
    core = np.array([[sp, 1j / sp], [-1j / sp, sp]])
    d = (z ** (alpha / 2) / ph ** (alpha / 2)) ** -1
    left = np.diag([2.0 ** -alpha, 2.0 ** alpha])
    return pre * left @ core @ np.diag([d, 1 / d])


# ---------------------------------------------------------------------------
# phase context
# ---------------------------------------------------------------------------

def xi_right_coeffs(c) -> np.ndarray:
    """``-xi_n(1+w) = w^{3/2} sum_j Xi_j w^j`` with ``Xi_j = (1/(2j+3)) sum_l binom(-1/2,l) c_{j-l}``."""
    c = np.asarray(c, dtype=float)
    out = np.zeros(len(c))
    for j in range(len(c)):
        out[j] = sum(binom(-0.5, l) * c[j - l] for l in range(j + 1)) / (2 * j + 3)
    return out


def phibar_left_coeffs(d) -> np.ndarray:
    """``phibar_n(z) = -i sqrt(z) sum_j F_j z^j`` with ``F_j = (1/(2(2j+1))) sum_l (-1)^l binom(1/2,l) d_{j-l}``."""
    d = np.asarray(d, dtype=float)
    out = np.zeros(len(d))
    for j in range(len(d)):
        out[j] = sum((-1) ** l * binom(0.5, l) * d[j - l] for l in range(j + 1)) / (2 * (2 * j + 1))
    return out


@dataclass(frozen=True)
class PhaseContext:
    """Weight, degree and field data bound together for phase evaluations."""

    weight: WeightSpec
    n: float
    field: FieldData
    xi_coeffs: tuple = ()
    phibar_coeffs: tuple = ()

    @property
    def beta(self) -> float:
        return self.field.beta

    @property
    def alpha(self) -> float:
        return self.weight.alpha

    def V(self, z):
        return self.weight.Q(self.beta * np.asarray(z)) / self.n


def make_context(w: WeightSpec, n: float, beta: Optional[float] = None, L: int = 40) -> PhaseContext:
    fd = field_data(w, n, L=L, beta=beta)
    return PhaseContext(w, float(n), fd, tuple(xi_right_coeffs(fd.c[:_XI_TERMS])),
                        tuple(phibar_left_coeffs(fd.d[:_XI_TERMS])))


def _xi_general(ctx: PhaseContext, zu, npts: int = 48):
    """``-(z-1)^{3/2} int_0^1 u^2 h(1+(z-1)u^2) / sqrt(1+(z-1)u^2) du``."""
    t, wt = np.polynomial.legendre.leggauss(npts)
    u = 0.5 * (t + 1)
    wt = 0.5 * wt
    w = zu - 1
    y = 1 + w[:, None] * u[None, :] ** 2
    h = h_eval(ctx.weight, ctx.n, ctx.beta, y.ravel()).reshape(y.shape)
    integ = (u ** 2)[None, :] * h / np.sqrt(y)
    sw = sqrt_zm1(zu)
    return -(w * sw) * (integ @ wt)


def xi_upper(ctx: PhaseContext, zu):
    """``xi_n`` continued analytically from the upper half plane."""
    zu = np.asarray(zu, dtype=complex)
    out = np.empty(zu.shape, dtype=complex)
    w = zu - 1
    near1 = np.abs(w) < SERIES_RADIUS
    near0 = np.abs(zu) < SERIES_RADIUS
    rest = ~(near1 | near0)
    if np.any(near1):
        ww = w[near1]
        t = sqrt_zm1(zu[near1])
        out[near1] = -t ** 3 * np.polynomial.polynomial.polyval(ww, ctx.xi_coeffs)
    if np.any(near0):
        out[near0] = 2 * phibar_series(ctx, zu[near0]) + 1j * math.pi
    if np.any(rest):
        zr = zu[rest]
        if ctx.field.hn_poly is not None:
            s = sqrt_zm1(zr)
            rz = np.sqrt(zr)
            out[rest] = -ctx.field.H(zr) * rz * s / 2 + 2 * np.log(rz + s)
        else:
            out[rest] = _xi_general(ctx, zr)
    return out


def phibar_series(ctx: PhaseContext, zu):
    return -1j * np.sqrt(zu) * np.polynomial.polynomial.polyval(zu, ctx.phibar_coeffs)


def xi_n(ctx: PhaseContext, z):
    """``xi_n(z) = -i (H_n sqrt z sqrt(1-z)/2 - 2 arccos sqrt z)`` with principal branches.

    On (0, 1) the value is purely imaginary; off the axis ``xi_n(conj z) = -conj(xi_n(z))``.
    """
    zu, fl = upper(z)
    v = xi_upper(ctx, zu)
    v = np.where(fl, -np.conj(v), v)
    return v if np.ndim(z) else complex(v[0])


def phibar_n(ctx: PhaseContext, z):
    """``phibar_n = xi_n/2 - i pi/2``."""
    v = xi_n(ctx, z)
    return v / 2 - 0.5j * math.pi


def airy_arg_upper(ctx: PhaseContext, zu):
    """``f_n(z) = n^{2/3} (z-1) (3 Xi(z)/2)^{2/3}`` with ``-xi = (z-1)^{3/2} Xi``."""
    zu = np.asarray(zu, dtype=complex)
    w = zu - 1
    near = np.abs(w) < SERIES_RADIUS
    Xi = np.empty(zu.shape, dtype=complex)
    if np.any(near):
        Xi[near] = np.polynomial.polynomial.polyval(w[near], ctx.xi_coeffs)
    if np.any(~near):
        t = sqrt_zm1(zu[~near])
        Xi[~near] = -xi_upper(ctx, zu[~near]) / t ** 3
    f = ctx.n ** (2.0 / 3.0) * w * (1.5 * Xi) ** (2.0 / 3.0)
    f = np.array(f, dtype=complex)
    real_axis = np.imag(zu) == 0
    f.imag = np.where(real_axis, 0.0, f.imag)
    return f


def airy_arg(ctx: PhaseContext, z):
    """Soft-edge Airy argument ``f_n``; real on the real axis and conjugate symmetric."""
    zu, fl = upper(z)
    v = airy_arg_upper(ctx, zu)
    v = np.where(fl, np.conj(v), v)
    return v if np.ndim(z) else complex(v[0])
