"""Scalar coefficient families shared across the package."""

from __future__ import annotations

import math
from functools import lru_cache

from scipy.special import gammaln


def a_k(k: int) -> float:
    """``A_k = 4^{-k} binom(2k, k) = prod_{j<=k} (2j-1)/(2j)``."""
    if k < 0:
        return 0.0
    out = 1.0
    for j in range(1, k + 1):
        out *= (2 * j - 1) / (2 * j)
    return out


def nu_k(k: int) -> float:
    """Airy asymptotic constants ``nu_k = -Gamma(3k-1/2) 2^k / (2k 27^k sqrt(pi) Gamma(2k))``."""
    if k == 0:
        return 1.0
    lg = gammaln(3 * k - 0.5) + k * math.log(2) - math.log(2 * k) - k * math.log(27) \
        - 0.5 * math.log(math.pi) - gammaln(2 * k)
    return -math.exp(lg)


def nu_k_ratio_form(k: int) -> float:
    """Same constants via ``(1 - (6k+1)/(6k-1)) Gamma(3k+1/2) / (54^k k! Gamma(k+1/2))``."""
    lg = gammaln(3 * k + 0.5) - k * math.log(54) - gammaln(k + 1) - gammaln(k + 0.5)
    return (1 - (6 * k + 1) / (6 * k - 1)) * math.exp(lg)


def poch_airy_bessel(alpha: float, m: int) -> float:
    """Hankel symbol ``(alpha, m) = 4^{-m}/m! prod_{j=1}^m (4 alpha^2 - (2j-1)^2)``; 1 for m = 0.

    This is the coefficient of the large-argument Bessel expansion,
    ``Gamma(alpha + m + 1/2) / (m! Gamma(alpha - m + 1/2))``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    out = 1.0
    for j in range(1, m + 1):
        out *= (4 * alpha * alpha - (2 * j - 1) ** 2) / (4.0 * j)
    return out


@lru_cache(maxsize=None)
def _binom_cached(a: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def binom(a: float, k: int) -> float:
    """Generalized binomial coefficient ``binom(a, k)`` for real a, integer k (0 for k < 0)."""
    if k < 0:
        return 0.0
    return _binom_cached(float(a), int(k))
