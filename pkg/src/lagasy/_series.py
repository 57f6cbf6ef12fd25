"""Truncated power-series arithmetic.

Univariate series are 1-D complex arrays ``a[j]`` (coefficient of ``t**j``).
Bivariate series are 2-D arrays ``A[l, j]`` holding the coefficient of
``eps**l t**j``; both directions are truncated to the array shape.
"""

from __future__ import annotations

import numpy as np

from .constants import a_k


def mul(a, b, N=None):
    N = len(a) if N is None else N
    return np.convolve(a, b)[:N]


def exp_series(a, N=None):
    """``exp(a(t))``."""
    a = np.asarray(a, dtype=complex)
    N = len(a) if N is None else N
    a = a[:N]
    out = np.zeros(N, dtype=complex)
    out[0] = np.exp(a[0])
    j = np.arange(N)
    ja = j[:len(a)] * a[:N]
    for k in range(1, N):
        out[k] = np.dot(ja[1:k + 1], out[k - 1::-1][:len(ja[1:k + 1])]) / k
    return out


def pow_series(a, r: float, N=None):
    """``a(t)**r`` for ``a[0] != 0`` (principal power of the constant term)."""
    a = np.asarray(a, dtype=complex)
    N = len(a) if N is None else N
    ap = np.zeros(N, dtype=complex)
    ap[:min(N, len(a))] = a[:N]
    out = np.zeros(N, dtype=complex)
    out[0] = ap[0] ** r
    for k in range(1, N):
        j = np.arange(1, k + 1)
        out[k] = np.dot(((r + 1) * j - k) * ap[j], out[k - j]) / (k * ap[0])
    return out


def inv_series(a, N=None):
    a = np.asarray(a, dtype=complex)
    N = len(a) if N is None else N
    out = np.zeros(N, dtype=complex)
    out[0] = 1 / a[0]
    for k in range(1, N):
        m = min(k, len(a) - 1)
        out[k] = -np.dot(a[1:m + 1], out[k - 1::-1][:m]) / a[0]
    return out


def arcsin_coeffs(N):
    out = np.zeros(N)
    for j in range((N + 1) // 2):
        if 2 * j + 1 < N:
            out[2 * j + 1] = a_k(j) / (2 * j + 1)
    return out


def arcsinh_coeffs(N):
    out = arcsin_coeffs(N)
    out[3::4] *= -1
    return out


def inv_sqrt_coeffs(N, sign: int):
    """``(1 + sign t^2)^{-1/2}``."""
    out = np.zeros(N)
    for j in range((N + 1) // 2):
        out[2 * j] = a_k(j) * (-sign) ** j
    return out


def spread_even(a, N):
    """Series in ``z`` rewritten as a series in ``t`` with ``z = t**2``."""
    a = np.asarray(a)
    out = np.zeros(a.shape[:-1] + (N,), dtype=complex)
    m = min(a.shape[-1], (N + 1) // 2)
    out[..., 0:2 * m:2] = a[..., :m]
    return out


# -- bivariate --------------------------------------------------------------

def bi_mul(A, B):
    L, N = A.shape
    out = np.zeros((L, N), dtype=complex)
    for l1 in range(L):
        if not np.any(A[l1]):
            continue
        for l2 in range(L - l1):
            out[l1 + l2] += np.convolve(A[l1], B[l2])[:N]
    return out


def bi_scale(A, s):
    """Multiply every eps-row by the univariate series ``s``."""
    N = A.shape[1]
    return np.array([np.convolve(row, s)[:N] for row in A])


def _eps_toeplitz(col):
    L = len(col)
    T = np.zeros((L, L), dtype=complex)
    for i in range(L):
        T[i:, i] = col[:L - i]
    return T


def bi_inv(A):
    """Reciprocal of a bivariate series with ``A[0, 0] != 0``."""
    L, N = A.shape
    TA = np.array([_eps_toeplitz(A[:, j]) for j in range(N)])
    T0inv = np.linalg.inv(TA[0])
    G = np.zeros((L, N), dtype=complex)
    G[:, 0] = T0inv[:, 0]
    for j in range(1, N):
        acc = np.einsum("ikl,il->k", TA[1:j + 1], G[:, j - 1::-1].T)
        G[:, j] = -T0inv @ acc
    return G
