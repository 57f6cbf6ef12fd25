"""Special functions used by the expansions.

Airy and Bessel functions, I_0/I_1, log-Gamma and the principal Lambert W
branch.  The heavy lifting is done by :mod:`scipy.special` (AMOS / Cephes);
this module fixes the argument conventions, range checks and the scaled
variants the evaluator needs to stay in log space.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError, OrderOutOfRange, RangeExceeded

MAX_ARG = 1e4


def _as_arg(z):
    # real input stays real so real-axis values carry no spurious imaginary part
    z = np.asarray(z)
    return z.astype(float) if np.isrealobj(z) else z.astype(complex)


def _check_range(z, limit=MAX_ARG):
    if np.any(np.abs(z) >= limit):
        raise RangeExceeded(f"argument modulus exceeds {limit:g}")


def airy_ai(z, check=True):
    """Airy function Ai(z) for complex z."""
    z = _as_arg(z)
    if check:
        _check_range(z)
    out = _sp.airy(z)[0].astype(complex)
    return out if out.ndim else complex(out)


def airy_ai_prime(z, check=True):
    """Derivative Ai'(z) for complex z."""
    z = _as_arg(z)
    if check:
        _check_range(z)
    out = _sp.airy(z)[1].astype(complex)
    return out if out.ndim else complex(out)


def airy_scaled(z):
    """Return ``(Ai(z) e^{zeta}, Ai'(z) e^{zeta}, zeta)`` with ``zeta = 2 z^{3/2}/3``.

    The exponential factor is returned separately so callers can fold it into
    a log-scale; ``zeta`` uses the principal branch.
    """
    z = np.asarray(z, dtype=complex)
    ai, aip, _, _ = _sp.airye(z)
    zeta = 2.0 / 3.0 * z * np.sqrt(z)
    return ai, aip, zeta


def airy_zeros(k: int) -> np.ndarray:
    """First ``k`` zeros a_1 > a_2 > ... of Ai."""
    return _sp.ai_zeros(k)[0]


def _jv(nu, z):
    # negative real arguments need the complex routine for the branch of z^nu
    if np.isrealobj(z) and np.all(z >= 0):
        return _sp.jv(nu, z).astype(complex)
    return _sp.jv(nu, z.astype(complex))


def bessel_j(nu: float, z, check=True):
    """Bessel function of the first kind J_nu(z), real order nu > -1."""
    if nu <= -1:
        raise OrderOutOfRange(f"order must exceed -1, got {nu}")
    z = _as_arg(z)
    if check:
        _check_range(z)
    out = _jv(nu, z)
    return out if out.ndim else complex(out)


def bessel_j_prime(nu: float, z, check=True):
    """J_nu'(z) = (J_{nu-1}(z) - J_{nu+1}(z)) / 2."""
    if nu <= -1:
        raise OrderOutOfRange(f"order must exceed -1, got {nu}")
    z = _as_arg(z)
    if check:
        _check_range(z)
    out = 0.5 * (_jv(nu - 1, z) - _jv(nu + 1, z))
    return out if out.ndim else complex(out)


def bessel_j_scaled(nu: float, z):
    """Return ``(J_nu(z) e^{-|Im z|}, J_nu'(z) e^{-|Im z|})``."""
    z = np.asarray(z, dtype=complex)
    j = _sp.jve(nu, z)
    jp = 0.5 * (_sp.jve(nu - 1, z) - _sp.jve(nu + 1, z))
    return j, jp


def bessel_zeros_mcmahon(nu: float, k) -> np.ndarray:
    """McMahon's large-k approximation of the k-th positive zero of J_nu."""
    k = np.asarray(k, dtype=float)
    mu = 4.0 * nu * nu
    b = (k + nu / 2.0 - 0.25) * math.pi
    return (b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
            - 32 * (mu - 1) * (83 * mu ** 2 - 982 * mu + 3779) / (15 * (8 * b) ** 5))


def bessel_i01(k: int, x: float) -> float:
    """Modified Bessel function I_0 or I_1 at real x >= 0."""
    if not math.isfinite(x):
        raise DomainError("non-finite argument")
    if k == 0:
        return float(_sp.i0(x))
    if k == 1:
        return float(_sp.i1(x))
    raise ValueError("k must be 0 or 1")


def bessel_i01_scaled(k: int, x: float) -> float:
    """``I_k(x) e^{-x}`` for k in {0, 1}."""
    return float(_sp.i0e(x) if k == 0 else _sp.i1e(x))


def lambert_w0(x: float) -> float:
    """Principal branch W_0 of the Lambert W function on [-1/e, inf)."""
    if x < -1.0 / math.e - 1e-16:
        raise DomainError(f"W_0 undefined below -1/e, got {x}")
    if x == 0:
        return 0.0
    w = float(np.real(_sp.lambertw(max(x, -1.0 / math.e), 0)))
    # one Halley polish keeps |w e^w - x| at roundoff level
    if x > 0:
        ew = math.exp(w)
        f = w * ew - x
        w -= f / (ew * (w + 1) - (w + 2) * f / (2 * w + 2))
    return w


def log_gamma(x):
    """log Gamma(x) for real x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log_gamma requires x > 0")
    out = _sp.gammaln(x)
    return out if out.ndim else float(out)
